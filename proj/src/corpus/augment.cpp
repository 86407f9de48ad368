#include <algorithm>
#include <cmath>

#include "bcsmile/corpus/corpus.hpp"
#include "bcsmile/error.hpp"
#include "bcsmile/rng.hpp"

namespace bcsmile::corpus {

std::vector<std::pair<double, double>> feasible_starts(const std::vector<double>& onsets, double video_duration,
                                                       double duration) {
  std::vector<std::pair<double, double>> intervals;
  const double last_start = video_duration - duration;
  if (last_start < 0) return intervals;
  intervals.emplace_back(0.0, last_start);
  for (double o : onsets) {
    // Remove the open interval (o - d, o + d).
    const double lo = o - kMinOnsetDistance;
    const double hi = o + kMinOnsetDistance;
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : intervals) {
      if (hi <= a || lo >= b) {
        next.emplace_back(a, b);
        continue;
      }
      if (a <= lo) next.emplace_back(a, lo);
      if (hi <= b) next.emplace_back(hi, b);
    }
    intervals = std::move(next);
  }
  return intervals;
}

namespace {

bool far_from_onsets(double start, const std::vector<double>& onsets) {
  return std::all_of(onsets.begin(), onsets.end(),
                     [&](double o) { return std::abs(start - o) >= kMinOnsetDistance; });
}

double sample_start(const std::vector<std::pair<double, double>>& intervals, const std::vector<double>& onsets,
                    Rng& rng) {
  double total = 0.0;
  for (auto [a, b] : intervals) total += b - a;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double target = unit(rng) * total;
  for (auto [a, b] : intervals) {
    const double len = b - a;
    if (target <= len) {
      double s = a + target;
      // Guard the closed endpoints against rounding in a + target.
      if (!far_from_onsets(s, onsets)) s = (target < len / 2) ? a : b;
      return s;
    }
    target -= len;
  }
  return intervals.back().second;
}

}  // namespace

std::vector<InstanceWindow> sample_nonsmile_windows(const std::vector<SmileAnnotation>& smiles,
                                                    const std::map<std::string, DyadTiming>& dyads,
                                                    std::size_t count, std::uint64_t seed) {
  std::vector<InstanceWindow> out;
  if (count == 0) return out;
  if (smiles.empty()) throw Error("cannot sample non-smile windows without smiles");
  if (count % smiles.size() != 0) {
    throw Error("non-smile count " + std::to_string(count) + " must be a multiple of the smile count " +
                std::to_string(smiles.size()) + " to match mean durations exactly");
  }

  std::map<std::string, std::vector<double>> onsets;
  for (const auto& s : smiles) onsets[s.dyad_id].push_back(s.onset);

  Rng rng(seed);
  const std::size_t rounds = count / smiles.size();
  out.reserve(count);
  for (std::size_t round = 0; round < rounds; ++round) {
    std::vector<std::size_t> perm(smiles.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    // Window i lives in smile i's dyad and borrows the duration of smile perm[i].
    for (std::size_t i = 0; i < smiles.size(); ++i) {
      const SmileAnnotation& anchor = smiles[i];
      const double duration = smiles[perm[i]].duration();
      auto dit = dyads.find(anchor.dyad_id);
      if (dit == dyads.end()) throw Error("no timing for dyad '" + anchor.dyad_id + "'");
      const auto& dyad_onsets = onsets[anchor.dyad_id];
      const auto intervals = feasible_starts(dyad_onsets, dit->second.video_duration, duration);
      if (intervals.empty()) {
        throw Error("dyad '" + anchor.dyad_id + "': no placement for a " + std::to_string(duration) +
                    " s non-smile window");
      }
      InstanceWindow w;
      w.dyad_id = anchor.dyad_id;
      w.listener_side = anchor.listener_side;
      w.kind = WindowKind::nonsmile;
      w.window_start = sample_start(intervals, dyad_onsets, rng);
      w.window_end = w.window_start + duration;
      out.push_back(std::move(w));
    }
  }
  return out;
}

}  // namespace bcsmile::corpus
