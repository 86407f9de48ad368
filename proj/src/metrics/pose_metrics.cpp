#include "bcsmile/metrics/pose_metrics.hpp"

#include <string>
#include <vector>

#include "bcsmile/error.hpp"
#include "bcsmile/simd/kernels.hpp"

namespace bcsmile::metrics {
namespace {

void check_shapes(const landmarks::LandmarkSequence& pred, const landmarks::LandmarkSequence& gt) {
  if (pred.size() != gt.size())
    throw Error("pose metrics: " + std::to_string(pred.size()) + " predicted frames vs " + std::to_string(gt.size()) +
                " ground-truth frames");
  if (pred.size() == 0) throw Error("pose metrics: empty sequences");
  for (std::size_t f = 0; f < pred.size(); ++f) {
    if (pred.frames[f].count() != gt.frames[f].count() || pred.frames[f].count() == 0)
      throw Error("pose metrics: landmark count mismatch at frame " + std::to_string(f));
  }
}

// Per-frame landmark distances, frame-major.
std::vector<std::vector<double>> distances(const landmarks::LandmarkSequence& pred,
                                           const landmarks::LandmarkSequence& gt) {
  check_shapes(pred, gt);
  const auto& k = simd::kernels();
  std::vector<std::vector<double>> out(pred.size());
  for (std::size_t f = 0; f < pred.size(); ++f) {
    out[f].resize(pred.frames[f].count());
    k.point_dist(pred.frames[f].xy.data(), gt.frames[f].xy.data(), out[f].size(), out[f].data());
  }
  return out;
}

double ape_from(const std::vector<std::vector<double>>& d) {
  double total = 0.0;
  for (const auto& frame : d) {
    double s = 0.0;
    for (double v : frame) s += v;
    total += s / static_cast<double>(frame.size());
  }
  return total / static_cast<double>(d.size());
}

double pck_from(const std::vector<std::vector<double>>& d, double sigma) {
  std::size_t hits = 0, n = 0;
  for (const auto& frame : d) {
    for (double v : frame) hits += v <= sigma ? 1 : 0;
    n += frame.size();
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace

double ape(const landmarks::LandmarkSequence& pred, const landmarks::LandmarkSequence& gt) {
  return ape_from(distances(pred, gt));
}

double pck(const landmarks::LandmarkSequence& pred, const landmarks::LandmarkSequence& gt, double sigma) {
  if (!(sigma > 0.0)) throw Error("pck: sigma must be positive");
  return pck_from(distances(pred, gt), sigma);
}

PoseErrorReport evaluate_pose(const landmarks::LandmarkSequence& pred, const landmarks::LandmarkSequence& gt,
                              std::span<const double> sigmas) {
  if (sigmas.empty()) throw Error("pose metrics: no sigma values");
  const auto d = distances(pred, gt);
  PoseErrorReport r;
  r.ape = ape_from(d);
  double sum = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0)) throw Error("pck: sigma must be positive");
    const double v = pck_from(d, s);
    r.pck_by_sigma[s] = v;
    sum += v;
  }
  r.pck_mean = sum / static_cast<double>(sigmas.size());
  r.k = gt.landmark_count();
  r.n_frames = gt.size();
  return r;
}

}  // namespace bcsmile::metrics
