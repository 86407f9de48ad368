#include "bcsmile/agent/adapter.hpp"

#include <algorithm>
#include <cmath>

#include "bcsmile/error.hpp"
#include "json.hpp"

namespace bcsmile::agent {
namespace {

void check_index(std::size_t i, std::size_t k, const char* what) {
  if (i >= k) throw Error(std::string("adapter: ") + what + " index " + std::to_string(i) + " out of range");
}

void check_map(const landmarks::LandmarkIndexMap& map, std::size_t k) {
  check_index(map.lip_corner_left, k, "left lip corner");
  check_index(map.lip_corner_right, k, "right lip corner");
  if (map.brow_left.empty() || map.brow_right.empty()) throw Error("adapter: index map has no eyebrow landmarks");
  for (std::size_t i : map.brow_left) check_index(i, k, "left brow");
  for (std::size_t i : map.brow_right) check_index(i, k, "right brow");
}

double mean_y(const landmarks::LandmarkFrame& f, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (std::size_t i : idx) s += f.y(i);
  return s / static_cast<double>(idx.size());
}

}  // namespace

std::size_t widest_smile_frame(const landmarks::LandmarkSequence& seq, const landmarks::LandmarkIndexMap& map) {
  if (seq.frames.empty()) throw Error("adapter: empty landmark sequence");
  check_map(map, seq.landmark_count());
  std::size_t best = 0;
  double best_width = -1.0;
  for (std::size_t f = 0; f < seq.size(); ++f) {
    const auto& fr = seq.frames[f];
    const double w = std::abs(fr.x(map.lip_corner_right) - fr.x(map.lip_corner_left));
    if (w > best_width) {
      best_width = w;
      best = f;
    }
  }
  return best;
}

AdapterResult landmarks_to_params(const landmarks::LandmarkSequence& seq, const landmarks::LandmarkIndexMap& map,
                                  double onset) {
  if (seq.size() < 2) throw Error("adapter: need at least two frames");
  if (!(seq.fps > 0.0)) throw Error("adapter: fps must be positive");
  check_map(map, seq.landmark_count());
  const std::size_t n = seq.size();
  const auto& f0 = seq.frames.front();

  // Outward for the lip corners, upward (image y decreasing) for the brows.
  std::array<std::vector<double>, 4> raw;
  for (auto& r : raw) r.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    const auto& fr = seq.frames[f];
    raw[0][f] = -(fr.x(map.lip_corner_left) - f0.x(map.lip_corner_left));
    raw[1][f] = fr.x(map.lip_corner_right) - f0.x(map.lip_corner_right);
    raw[2][f] = -(mean_y(fr, map.brow_left) - mean_y(f0, map.brow_left));
    raw[3][f] = -(mean_y(fr, map.brow_right) - mean_y(f0, map.brow_right));
  }

  AdapterResult out;
  std::array<std::vector<double>, 4> norm;
  for (std::size_t d = 0; d < 4; ++d) {
    const auto [lo, hi] = std::minmax_element(raw[d].begin(), raw[d].end());
    const double range = *hi - *lo;
    norm[d].resize(n);
    if (!(range > 0.0)) {
      out.neutral[d] = true;
      std::fill(norm[d].begin(), norm[d].end(), 0.5);
      continue;
    }
    for (std::size_t f = 0; f < n; ++f) norm[d][f] = std::clamp((raw[d][f] - *lo) / range, 0.0, 1.0);
  }
  out.frames.resize(n);
  for (std::size_t f = 0; f < n; ++f) out.frames[f] = FacialParamFrame{norm[0][f], norm[1][f], norm[2][f], norm[3][f]};
  out.widest_frame = widest_smile_frame(seq, map);
  out.command.params = out.frames[out.widest_frame];
  out.command.duration = static_cast<double>(n) / seq.fps;
  out.command.onset = onset;
  return out;
}

std::string to_json(const SmileCommand& cmd) {
  nlohmann::ordered_json j;
  j["type"] = "smile";
  j["onset_s"] = cmd.onset;
  j["duration_s"] = cmd.duration;
  j["params"] = {{"MOUTH_SMILE_LEFT", cmd.params.mouth_smile_left},
                 {"MOUTH_SMILE_RIGHT", cmd.params.mouth_smile_right},
                 {"BROW_UP_LEFT", cmd.params.brow_up_left},
                 {"BROW_UP_RIGHT", cmd.params.brow_up_right}};
  return j.dump();
}

SmileCommand parse_command(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.at("type").get<std::string>() != "smile") throw Error("command: unsupported type");
    SmileCommand cmd;
    cmd.onset = j.at("onset_s").get<double>();
    cmd.duration = j.at("duration_s").get<double>();
    const auto& p = j.at("params");
    cmd.params.mouth_smile_left = p.at("MOUTH_SMILE_LEFT").get<double>();
    cmd.params.mouth_smile_right = p.at("MOUTH_SMILE_RIGHT").get<double>();
    cmd.params.brow_up_left = p.at("BROW_UP_LEFT").get<double>();
    cmd.params.brow_up_right = p.at("BROW_UP_RIGHT").get<double>();
    return cmd;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("command: ") + e.what());
  }
}

}  // namespace bcsmile::agent
