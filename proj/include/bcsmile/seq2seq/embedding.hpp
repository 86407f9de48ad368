#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace bcsmile::seq2seq {

inline constexpr double kEmbeddingHop = 0.96;
inline constexpr std::size_t kMaxEmbeddingFrames = 63;  // ceil(60 s / 0.96 s)
inline constexpr std::uint32_t kEmbeddingMagic = 0x31424D45;  // "EMB1" little-endian

// T frames of D values, frame i covering [i * hop, (i + 1) * hop) of its span.
struct EmbeddingSequence {
  std::size_t dim = 0;
  std::vector<double> values;
  double span_start = 0.0;
  double span_end = 0.0;

  std::size_t frames() const { return dim ? values.size() / dim : 0; }
  std::span<const double> frame(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::vector<double> mean() const;
  bool operator==(const EmbeddingSequence&) const = default;
};

// [magic u32][D u32][T u32][T*D float32], little-endian.
void write_embedding_file(const std::filesystem::path& path, const EmbeddingSequence& seq);
EmbeddingSequence read_embedding_file(const std::filesystem::path& path);

// Audio of one turn, optionally limited to [span_start, span_end] (seconds
// from the start of the recording).
struct TurnAudio {
  std::span<const double> samples;  // exactly the span
  double sample_rate = 16000.0;
  double turn_start = 0.0;
  double span_start = 0.0;
  double span_end = 0.0;
  std::filesystem::path precomputed;  // per-turn embedding file, if any
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  // Raw frames for the span; embed_audio applies the framing contract.
  virtual EmbeddingSequence compute(const TurnAudio& audio) const = 0;
};

// Reads precomputed per-turn files; frames are aligned to the turn start and
// those ending after span_end are dropped.
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  EmbeddingSequence compute(const TurnAudio& audio) const override;

 private:
  std::size_t dim_;
};

// Deterministic stand-in for a pretrained audio network: per hop, pooled log
// band energies on D log-spaced bands, mean-removed across bands.
class SyntheticEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit SyntheticEmbeddingProvider(std::size_t dim = 128) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  EmbeddingSequence compute(const TurnAudio& audio) const override;

 private:
  std::size_t dim_;
};

struct EmbedResult {
  EmbeddingSequence sequence;
  std::string warning;  // non-empty when the audio was empty
};

// One frame per full hop (at least one for non-empty audio), keeping only
// the most recent kMaxEmbeddingFrames; empty audio yields a single zero frame.
EmbedResult embed_audio(const EmbeddingProvider& provider, const TurnAudio& audio);

// Number of frames for a span of the given length under the framing rule.
std::size_t embedding_frame_count(double duration_s);

}  // namespace bcsmile::seq2seq
