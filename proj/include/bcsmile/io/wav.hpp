#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace bcsmile::io {

struct Waveform {
  std::vector<double> samples;  // mono, [-1, 1)
  double sample_rate = 0.0;

  double duration() const { return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0; }
  // Samples in [start_s, end_s), clipped to the recording.
  std::span<const double> slice(double start_s, double end_s) const;
};

// 16-bit PCM mono WAV.
Waveform read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, std::span<const double> samples, int sample_rate);

}  // namespace bcsmile::io
