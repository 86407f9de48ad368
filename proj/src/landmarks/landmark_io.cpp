#include <fstream>
#include <string>

#include "bcsmile/error.hpp"
#include "bcsmile/io/csv.hpp"
#include "bcsmile/landmarks/landmarks.hpp"

namespace bcsmile::landmarks {

LandmarkSequence read_landmark_csv(const std::filesystem::path& path, std::size_t k, double fps) {
  const auto table = io::read_csv(path);
  std::vector<std::string> header{"frame_idx", "t_s"};
  for (std::size_t i = 0; i < k; ++i) {
    header.push_back("x" + std::to_string(i));
    header.push_back("y" + std::to_string(i));
  }
  io::expect_header(table, header);
  LandmarkSequence seq;
  seq.fps = fps;
  seq.frames.resize(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.integer(r, 0) != static_cast<long long>(r)) {
      throw ParseError(table.source, table.lines[r], "frame_idx", "frames must be consecutive from 0");
    }
    auto& xy = seq.frames[r].xy;
    xy.resize(2 * k);
    for (std::size_t j = 0; j < 2 * k; ++j) xy[j] = table.number(r, j + 2);
  }
  if (!seq.frames.empty()) seq.t0 = table.number(0, 1);
  validate(seq);
  return seq;
}

void write_landmark_csv(const LandmarkSequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::size_t k = seq.landmark_count();
  out << "frame_idx,t_s";
  for (std::size_t i = 0; i < k; ++i) out << ",x" << i << ",y" << i;
  out << '\n';
  for (std::size_t r = 0; r < seq.frames.size(); ++r) {
    out << r << ',' << io::format_number(seq.t0 + static_cast<double>(r) / seq.fps);
    for (double v : seq.frames[r].xy) out << ',' << io::format_number(v);
    out << '\n';
  }
}

}  // namespace bcsmile::landmarks
