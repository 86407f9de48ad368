#include "bcsmile/landmarks/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bcsmile/error.hpp"

namespace bcsmile::landmarks {

void validate(const LandmarkSequence& seq) {
  if (seq.frames.empty()) throw Error("landmark sequence is empty");
  if (!(seq.fps > 0)) throw Error("landmark sequence fps must be > 0");
  const std::size_t k = seq.landmark_count();
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto& f = seq.frames[i];
    if (f.xy.size() != 2 * k) throw Error("frame " + std::to_string(i) + " has a different landmark count");
    for (double v : f.xy) {
      if (!std::isfinite(v)) throw Error("frame " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

LandmarkFrame Similarity::apply(const LandmarkFrame& f) const {
  LandmarkFrame out;
  out.xy.resize(f.xy.size());
  for (std::size_t i = 0; i < f.count(); ++i) {
    const double x = f.xy[2 * i];
    const double y = f.xy[2 * i + 1];
    out.xy[2 * i] = a * x - b * y + tx;
    out.xy[2 * i + 1] = b * x + a * y + ty;
  }
  return out;
}

MeanFace compute_mean_face(std::span<const LandmarkSequence> sequences, std::vector<std::size_t> stable_subset) {
  if (sequences.empty()) throw Error("mean face needs at least one sequence");
  const std::size_t k = sequences.front().landmark_count();
  std::vector<double> sum(2 * k, 0.0);
  std::size_t n = 0;
  for (const auto& seq : sequences) {
    for (const auto& f : seq.frames) {
      if (f.count() != k) throw Error("mean face: sequences have different landmark counts");
      for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += f.xy[d];
      ++n;
    }
  }
  if (n == 0) throw Error("mean face needs at least one frame");
  if (stable_subset.empty()) throw Error("mean face: stable subset is empty");
  for (std::size_t i : stable_subset) {
    if (i >= k) throw Error("mean face: stable index " + std::to_string(i) + " out of range");
  }
  MeanFace mean;
  mean.points.xy.resize(2 * k);
  for (std::size_t d = 0; d < sum.size(); ++d) mean.points.xy[d] = sum[d] / static_cast<double>(n);
  mean.stable_subset = std::move(stable_subset);
  return mean;
}

MeanFace canonicalize(const MeanFace& mean, std::size_t left_point, std::size_t right_point) {
  const std::size_t k = mean.points.count();
  if (left_point >= k || right_point >= k) throw Error("canonicalize: reference point out of range");
  const double d = std::hypot(mean.points.x(right_point) - mean.points.x(left_point),
                              mean.points.y(right_point) - mean.points.y(left_point));
  if (!(d > 0.0)) throw Error("canonicalize: reference points coincide");
  double cx = 0.0, cy = 0.0;
  for (std::size_t i : mean.stable_subset) {
    cx += mean.points.x(i);
    cy += mean.points.y(i);
  }
  cx /= static_cast<double>(mean.stable_subset.size());
  cy /= static_cast<double>(mean.stable_subset.size());
  MeanFace out = mean;
  for (std::size_t i = 0; i < k; ++i) {
    out.points.xy[2 * i] = (mean.points.x(i) - cx) / d;
    out.points.xy[2 * i + 1] = (mean.points.y(i) - cy) / d;
  }
  return out;
}

Similarity fit_similarity(const LandmarkFrame& src, const LandmarkFrame& dst, std::span<const std::size_t> subset) {
  if (src.count() != dst.count()) throw Error("similarity fit: landmark counts differ");
  if (subset.empty()) throw Error("similarity fit: empty subset");
  const double m = static_cast<double>(subset.size());
  double sx = 0, sy = 0, dx = 0, dy = 0;
  for (std::size_t i : subset) {
    sx += src.x(i);
    sy += src.y(i);
    dx += dst.x(i);
    dy += dst.y(i);
  }
  sx /= m;
  sy /= m;
  dx /= m;
  dy /= m;
  double num_a = 0, num_b = 0, den = 0;
  for (std::size_t i : subset) {
    const double px = src.x(i) - sx, py = src.y(i) - sy;
    const double qx = dst.x(i) - dx, qy = dst.y(i) - dy;
    num_a += px * qx + py * qy;
    num_b += px * qy - py * qx;
    den += px * px + py * py;
  }
  if (den <= 1e-18) throw Error("similarity fit: degenerate stable subset (points coincide)");
  Similarity s;
  s.a = num_a / den;
  s.b = num_b / den;
  s.tx = dx - (s.a * sx - s.b * sy);
  s.ty = dy - (s.b * sx + s.a * sy);
  return s;
}

double subset_residual(const LandmarkFrame& a, const LandmarkFrame& b, std::span<const std::size_t> subset) {
  double r = 0.0;
  for (std::size_t i : subset) {
    const double ex = a.x(i) - b.x(i);
    const double ey = a.y(i) - b.y(i);
    r += ex * ex + ey * ey;
  }
  return r;
}

LandmarkFrame align_frame(const LandmarkFrame& frame, const MeanFace& mean) {
  return fit_similarity(frame, mean.points, mean.stable_subset).apply(frame);
}

LandmarkSequence align_to_mean_face(const LandmarkSequence& seq, const MeanFace& mean) {
  if (seq.landmark_count() != mean.points.count()) throw Error("alignment: landmark count differs from mean face");
  LandmarkSequence out;
  out.fps = seq.fps;
  out.t0 = seq.t0;
  out.frames.reserve(seq.frames.size());
  for (const auto& f : seq.frames) out.frames.push_back(align_frame(f, mean));
  return out;
}

LandmarkSequence downsample(const LandmarkSequence& seq, int factor) {
  if (factor < 1) throw Error("downsample factor must be >= 1");
  LandmarkSequence out;
  out.fps = seq.fps / factor;
  out.t0 = seq.t0;
  for (std::size_t i = 0; i < seq.frames.size(); i += static_cast<std::size_t>(factor)) out.frames.push_back(seq.frames[i]);
  return out;
}

DisplacementSequence to_displacements(const LandmarkSequence& seq) {
  if (seq.frames.size() < 2) throw Error("displacements need at least 2 frames");
  DisplacementSequence out;
  out.deltas.reserve(seq.frames.size() - 1);
  for (std::size_t i = 0; i + 1 < seq.frames.size(); ++i) {
    const auto& a = seq.frames[i].xy;
    const auto& b = seq.frames[i + 1].xy;
    if (a.size() != b.size()) throw Error("displacements: landmark count changes within sequence");
    std::vector<double> d(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) d[j] = b[j] - a[j];
    out.deltas.push_back(std::move(d));
  }
  return out;
}

DisplacementSequence minmax_normalize(const DisplacementSequence& disp) {
  if (disp.normalization) throw Error("displacements are already normalized");
  if (disp.deltas.empty()) throw Error("cannot normalize an empty displacement sequence");
  const std::size_t dims = disp.dims();
  NormalizationParams p;
  p.min.assign(dims, 0.0);
  p.max.assign(dims, 0.0);
  p.constant.assign(dims, false);
  for (std::size_t d = 0; d < dims; ++d) {
    double lo = disp.deltas[0][d], hi = lo;
    for (const auto& row : disp.deltas) {
      lo = std::min(lo, row[d]);
      hi = std::max(hi, row[d]);
    }
    p.min[d] = lo;
    p.max[d] = hi;
    p.constant[d] = !(hi > lo);
  }
  DisplacementSequence out;
  out.deltas = disp.deltas;
  for (auto& row : out.deltas) {
    for (std::size_t d = 0; d < dims; ++d) {
      row[d] = p.constant[d] ? 0.5 : std::clamp((row[d] - p.min[d]) / (p.max[d] - p.min[d]), 0.0, 1.0);
    }
  }
  out.normalization = std::move(p);
  return out;
}

DisplacementSequence denormalize(const DisplacementSequence& disp) {
  if (!disp.normalization) throw Error("displacements carry no normalization parameters");
  const auto& p = *disp.normalization;
  DisplacementSequence out;
  out.deltas = disp.deltas;
  for (auto& row : out.deltas) {
    if (row.size() != p.min.size()) throw Error("normalization parameters do not match displacement size");
    for (std::size_t d = 0; d < row.size(); ++d) {
      row[d] = p.constant[d] ? p.min[d] : p.min[d] + row[d] * (p.max[d] - p.min[d]);
    }
  }
  return out;
}

LandmarkSequence reconstruct(const LandmarkFrame& last_frame, const DisplacementSequence& disp, double fps) {
  const DisplacementSequence raw = denormalize(disp);
  LandmarkSequence out;
  out.fps = fps;
  out.frames.reserve(raw.deltas.size() + 1);
  out.frames.push_back(last_frame);
  for (const auto& d : raw.deltas) {
    if (d.size() != last_frame.xy.size()) throw Error("reconstruct: displacement size differs from frame size");
    LandmarkFrame next = out.frames.back();
    for (std::size_t j = 0; j < d.size(); ++j) next.xy[j] += d[j];
    out.frames.push_back(std::move(next));
  }
  return out;
}

}  // namespace bcsmile::landmarks
