#include <algorithm>
#include <cmath>

#include "bcsmile/error.hpp"
#include "bcsmile/features/features.hpp"
#include "bcsmile/simd/kernels.hpp"

namespace bcsmile::features {

std::vector<double> track_pitch(std::span<const double> samples, double sample_rate, const PitchConfig& cfg) {
  if (!(sample_rate > 0)) throw Error("sample rate must be > 0");
  const auto window = static_cast<std::size_t>(std::lround(cfg.window_s * sample_rate));
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.hop_s * sample_rate)));
  const auto lag_min = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(sample_rate / cfg.f_max)));
  const auto lag_max = std::min<std::size_t>(window > 2 ? window - 2 : 0,
                                             static_cast<std::size_t>(std::ceil(sample_rate / cfg.f_min)));
  std::vector<double> f0;
  if (window < 4 || samples.size() < window || lag_max <= lag_min + 1) return f0;

  const auto& k = simd::kernels();
  std::vector<double> x(window);
  std::vector<double> prefix(window + 1);
  std::vector<double> r(lag_max + 2, 0.0);
  for (std::size_t start = 0; start + window <= samples.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < window; ++i) mean += samples[start + i];
    mean /= static_cast<double>(window);
    prefix[0] = 0.0;
    for (std::size_t i = 0; i < window; ++i) {
      x[i] = samples[start + i] - mean;
      prefix[i + 1] = prefix[i] + x[i] * x[i];
    }
    if (prefix[window] <= 0.0) {
      f0.push_back(0.0);
      continue;
    }
    // Normalized autocorrelation over the overlapping part of the window.
    for (std::size_t lag = lag_min - 1; lag <= lag_max + 1 && lag < window; ++lag) {
      const std::size_t n = window - lag;
      const double e_head = prefix[n];
      const double e_tail = prefix[window] - prefix[lag];
      const double denom = std::sqrt(e_head * e_tail);
      r[lag] = denom > 0 ? k.dot(x.data(), x.data() + lag, n) / denom : 0.0;
    }
    double best = -1.0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) best = std::max(best, r[lag]);
    // Earliest local maximum close to the global one avoids octave errors.
    std::size_t pick = 0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] >= 0.9 * best) {
        pick = lag;
        break;
      }
    }
    if (pick == 0 || r[pick] < cfg.voicing_threshold) {
      f0.push_back(0.0);
      continue;
    }
    const double a = r[pick - 1], b = r[pick], c = r[pick + 1];
    const double curv = a - 2.0 * b + c;
    const double shift = curv < 0 ? std::clamp(0.5 * (a - c) / curv, -0.5, 0.5) : 0.0;
    f0.push_back(sample_rate / (static_cast<double>(pick) + shift));
  }
  return f0;
}

ProsodyFeatures extract_prosody(std::span<const double> samples, double sample_rate, const PitchConfig& cfg) {
  if (samples.empty()) throw Error("prosody: empty audio");
  ProsodyFeatures out;
  double energy = 0.0;
  for (double s : samples) energy += s * s;
  out.rms_energy = std::sqrt(energy / static_cast<double>(samples.size()));

  const auto f0 = track_pitch(samples, sample_rate, cfg);
  double sum = 0.0, lo = 0.0, hi = 0.0;
  std::size_t voiced = 0;
  for (double f : f0) {
    if (f <= 0) continue;
    if (voiced == 0) lo = hi = f;
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    sum += f;
    ++voiced;
  }
  if (voiced > 0) out.mean_pitch = sum / static_cast<double>(voiced);
  if (voiced >= 2) out.pitch_range = hi - lo;
  return out;
}

}  // namespace bcsmile::features
