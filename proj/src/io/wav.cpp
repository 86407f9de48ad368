#include "bcsmile/io/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "bcsmile/error.hpp"

namespace bcsmile::io {
namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

std::span<const double> Waveform::slice(double start_s, double end_s) const {
  const auto n = static_cast<double>(samples.size());
  const auto lo = static_cast<std::size_t>(std::clamp(std::floor(start_s * sample_rate), 0.0, n));
  const auto hi = static_cast<std::size_t>(std::clamp(std::floor(end_s * sample_rate), 0.0, n));
  if (hi <= lo) return {};
  return std::span<const double>(samples).subspan(lo, hi - lo);
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw Error(name + ": not a RIFF/WAVE file");
  }
  Waveform wav;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t size = le32(buf.data() + pos + 4);
    const unsigned char* body = buf.data() + pos + 8;
    if (pos + 8 + size > buf.size()) throw Error(name + ": truncated chunk");
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (size < 16) throw Error(name + ": short fmt chunk");
      const auto format = le16(body);
      const auto channels = le16(body + 2);
      const auto bits = le16(body + 14);
      if (format != 1 || bits != 16) throw Error(name + ": only 16-bit PCM is supported");
      if (channels != 1) throw Error(name + ": expected mono audio");
      wav.sample_rate = le32(body + 4);
      have_fmt = true;
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw Error(name + ": data chunk before fmt chunk");
      const std::size_t n = size / 2;
      wav.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto raw = static_cast<std::int16_t>(le16(body + 2 * i));
        wav.samples[i] = raw / 32768.0;
      }
      return wav;
    }
    pos += 8 + size + (size & 1);
  }
  throw Error(name + ": no data chunk");
}

void write_wav(const std::filesystem::path& path, std::span<const double> samples, int sample_rate) {
  std::string out;
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, 1);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(sample_rate));
  put32(out, static_cast<std::uint32_t>(sample_rate * 2));
  put16(out, 2);
  put16(out, 16);
  out += "data";
  put32(out, data_bytes);
  for (double s : samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 32767.0 / 32768.0) * 32768.0);
    put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace bcsmile::io
