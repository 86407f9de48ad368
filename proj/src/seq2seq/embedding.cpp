#include "bcsmile/seq2seq/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>

#include "bcsmile/error.hpp"

namespace bcsmile::seq2seq {
namespace {

void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<double> EmbeddingSequence::mean() const {
  std::vector<double> m(dim, 0.0);
  const std::size_t t = frames();
  if (t == 0) return m;
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t d = 0; d < dim; ++d) m[d] += values[i * dim + d];
  }
  for (auto& v : m) v /= static_cast<double>(t);
  return m;
}

void write_embedding_file(const std::filesystem::path& path, const EmbeddingSequence& seq) {
  std::string out;
  put32(out, kEmbeddingMagic);
  put32(out, static_cast<std::uint32_t>(seq.dim));
  put32(out, static_cast<std::uint32_t>(seq.frames()));
  for (double v : seq.values) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    put32(out, bits);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

EmbeddingSequence read_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embedding file " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || get32(buf.data()) != kEmbeddingMagic) {
    throw Error(path.string() + ": not an embedding file (bad magic)");
  }
  EmbeddingSequence seq;
  seq.dim = get32(buf.data() + 4);
  const std::size_t t = get32(buf.data() + 8);
  if (buf.size() != 12 + 4 * seq.dim * t) throw Error(path.string() + ": size does not match header");
  seq.values.resize(seq.dim * t);
  for (std::size_t i = 0; i < seq.values.size(); ++i) {
    const std::uint32_t bits = get32(buf.data() + 12 + 4 * i);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    seq.values[i] = f;
  }
  seq.span_end = static_cast<double>(t) * kEmbeddingHop;
  return seq;
}

std::size_t embedding_frame_count(double duration_s) {
  if (!(duration_s > 0)) return 0;
  // Tolerate representation error right at a hop boundary.
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(duration_s / kEmbeddingHop + 1e-9)));
}

EmbeddingSequence FileEmbeddingProvider::compute(const TurnAudio& audio) const {
  if (audio.precomputed.empty()) throw Error("file embedding provider: no embedding file for this turn");
  EmbeddingSequence all = read_embedding_file(audio.precomputed);
  if (all.dim != dim_) {
    throw Error(audio.precomputed.string() + ": embedding dimension " + std::to_string(all.dim) + ", expected " +
                std::to_string(dim_));
  }
  const std::size_t keep = std::min(all.frames(), embedding_frame_count(audio.span_end - audio.turn_start));
  EmbeddingSequence out;
  out.dim = dim_;
  out.values.assign(all.values.begin(), all.values.begin() + static_cast<long>(keep * dim_));
  out.span_start = audio.turn_start;
  out.span_end = audio.span_end;
  return out;
}

EmbeddingSequence SyntheticEmbeddingProvider::compute(const TurnAudio& audio) const {
  EmbeddingSequence out;
  out.dim = dim_;
  out.span_start = audio.span_start;
  out.span_end = audio.span_end;
  const double sr = audio.sample_rate;
  const std::size_t n = audio.samples.size();
  if (n == 0) return out;
  const std::size_t frames = embedding_frame_count(static_cast<double>(n) / sr);
  const auto hop = static_cast<std::size_t>(std::lround(kEmbeddingHop * sr));
  constexpr std::size_t kSub = 512;
  constexpr std::size_t kSubframes = 4;
  const double f_lo = 60.0, f_hi = 0.45 * sr;
  std::vector<double> coeff(dim_);
  for (std::size_t b = 0; b < dim_; ++b) {
    const double f = f_lo * std::pow(f_hi / f_lo, (static_cast<double>(b) + 0.5) / static_cast<double>(dim_));
    coeff[b] = 2.0 * std::cos(2.0 * std::numbers::pi * f / sr);
  }
  out.values.assign(frames * dim_, 0.0);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::size_t begin = i * hop;
    double* row = out.values.data() + i * dim_;
    for (std::size_t s = 0; s < kSubframes; ++s) {
      const std::size_t start = begin + s * (hop / kSubframes);
      for (std::size_t b = 0; b < dim_; ++b) {
        // Goertzel power at the band centre.
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < kSub; ++j) {
          const double x = start + j < n ? audio.samples[start + j] : 0.0;
          const double s0 = x + coeff[b] * s1 - s2;
          s2 = s1;
          s1 = s0;
        }
        const double power = s1 * s1 + s2 * s2 - coeff[b] * s1 * s2;
        row[b] += std::log(1e-8 + power / kSub) / kSubframes;
      }
    }
    double mean = 0.0;
    for (std::size_t b = 0; b < dim_; ++b) mean += row[b];
    mean /= static_cast<double>(dim_);
    for (std::size_t b = 0; b < dim_; ++b) row[b] = 0.1 * (row[b] - mean);
  }
  return out;
}

EmbedResult embed_audio(const EmbeddingProvider& provider, const TurnAudio& audio) {
  EmbedResult result;
  const bool empty = !(audio.span_end > audio.span_start) && audio.samples.empty();
  if (!empty) result.sequence = provider.compute(audio);
  if (empty || result.sequence.frames() == 0) {
    result.sequence.dim = provider.dim();
    result.sequence.values.assign(provider.dim(), 0.0);
    result.sequence.span_start = audio.span_start;
    result.sequence.span_end = audio.span_end;
    result.warning = "empty audio span; using a single zero frame";
    return result;
  }
  auto& seq = result.sequence;
  if (seq.frames() > kMaxEmbeddingFrames) {
    const std::size_t drop = seq.frames() - kMaxEmbeddingFrames;
    seq.values.erase(seq.values.begin(), seq.values.begin() + static_cast<long>(drop * seq.dim));
    seq.span_start += kEmbeddingHop * static_cast<double>(drop);
  }
  return result;
}

}  // namespace bcsmile::seq2seq
