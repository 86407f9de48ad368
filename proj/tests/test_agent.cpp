#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "bcsmile/agent/adapter.hpp"
#include "bcsmile/agent/sink.hpp"
#include "bcsmile/error.hpp"
#include "doctest.h"

using namespace bcsmile;
using namespace bcsmile::agent;
namespace fs = std::filesystem;
using landmarks::LandmarkFrame;
using landmarks::LandmarkIndexMap;
using landmarks::LandmarkSequence;

namespace {

LandmarkSequence widening_mouth(std::size_t frames, double fps) {
  LandmarkSequence s;
  s.fps = fps;
  for (std::size_t f = 0; f < frames; ++f) {
    LandmarkFrame fr;
    fr.xy.assign(136, 0.0);
    const double w = 0.01 * static_cast<double>(f);
    fr.xy[2 * 48] = -0.3 - w;
    fr.xy[2 * 54] = 0.3 + w;
    for (std::size_t b = 17; b <= 26; ++b) fr.xy[2 * b + 1] = -0.5 - 0.5 * w;
    s.frames.push_back(fr);
  }
  return s;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("widest frame") {
  const LandmarkIndexMap map;
  CHECK(widest_smile_frame(widening_mouth(9, 25.0 / 3.0), map) == 8);

  LandmarkSequence flat = widening_mouth(1, 25.0);
  flat.frames.assign(5, flat.frames[0]);
  CHECK(widest_smile_frame(flat, map) == 0);

  std::mt19937_64 rng(71);
  std::normal_distribution<double> n(0.0, 0.1);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = widening_mouth(12, 25.0);
    for (auto& f : s.frames)
      for (auto& v : f.xy) v += n(rng);
    std::size_t best = 0;
    double bw = -1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double w = std::abs(s.frames[i].x(54) - s.frames[i].x(48));
      if (w > bw) {
        bw = w;
        best = i;
      }
    }
    CHECK(widest_smile_frame(s, map) == best);
  }
}

TEST_CASE("parameters from a monotone smile") {
  const auto r = landmarks_to_params(widening_mouth(9, 25.0 / 3.0), LandmarkIndexMap{}, 3.5);
  CHECK(r.command.duration == 9.0 / (25.0 / 3.0));
  CHECK(r.command.duration == doctest::Approx(1.08));
  CHECK(r.command.onset == 3.5);
  CHECK(r.widest_frame == 8);
  CHECK(r.command.params == FacialParamFrame{1.0, 1.0, 1.0, 1.0});
  CHECK(r.frames.front() == FacialParamFrame{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("no motion stays neutral") {
  auto s = widening_mouth(1, 25.0);
  s.frames.assign(4, s.frames[0]);
  const auto r = landmarks_to_params(s, LandmarkIndexMap{});
  for (bool b : r.neutral) CHECK(b);
  CHECK(r.command.params == FacialParamFrame{});
  CHECK_THROWS_AS(landmarks_to_params(widening_mouth(1, 25.0), LandmarkIndexMap{}), Error);
}

TEST_CASE("command json round trip") {
  SmileCommand c{{0.25, 0.75, 0.1, 1.0}, 0.96, 12.345};
  CHECK(parse_command(to_json(c)) == c);
  CHECK(to_json(c).find("MOUTH_SMILE_LEFT") != std::string::npos);
  CHECK_THROWS_AS(parse_command("{\"type\":\"nod\"}"), Error);
  CHECK_THROWS_AS(parse_command("not json"), Error);
}

TEST_CASE("file sink appends one line per command") {
  const auto path = fs::temp_directory_path() / "bcsmile_test_cmds.jsonl";
  fs::remove(path);
  FileSink sink(path);
  SmileCommand a{{0.1, 0.2, 0.3, 0.4}, 0.96, 1.0}, b{{0.5, 0.5, 0.5, 0.5}, 1.08, 2.0};
  CHECK(sink.emit(a).delivered);
  sink.emit(b);
  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 2);
  CHECK(parse_command(lines[0]) == a);
  CHECK(parse_command(lines[1]) == b);
  fs::remove(path);
}

TEST_CASE("endpoint delivers exactly one request per command") {
  StubServer server;
  server.start();
  const auto spool = fs::temp_directory_path() / "bcsmile_test_spool_ok.jsonl";
  fs::remove(spool);
  EndpointSink sink(EndpointOptions{server.url(), std::chrono::milliseconds(2000), 1, spool});
  for (int i = 0; i < 3; ++i) {
    const auto ack = sink.emit(SmileCommand{{0.5, 0.5, 0.5, 0.5}, 0.96, double(i)});
    CHECK(ack.delivered);
    CHECK(ack.status == 200);
    CHECK(ack.attempts == 1);
  }
  const auto got = server.received();
  REQUIRE(got.size() == 3);
  CHECK(parse_command(got[2]).onset == 2.0);
  CHECK(!fs::exists(spool));
  server.stop();
}

TEST_CASE("failed delivery spools the command") {
  int port = 0;
  {
    StubServer s;
    s.start();
    port = s.port();
    s.stop();
  }
  const auto spool = fs::temp_directory_path() / "bcsmile_test_spool.jsonl";
  fs::remove(spool);
  EndpointSink down(EndpointOptions{"http://127.0.0.1:" + std::to_string(port) + "/command",
                                    std::chrono::milliseconds(300), 1, spool});
  const SmileCommand c{{0.2, 0.4, 0.6, 0.8}, 0.96, 7.0};
  CHECK_THROWS_AS(down.emit(c), Error);
  auto lines = read_lines(spool);
  REQUIRE(lines.size() == 1);
  CHECK(parse_command(lines[0]) == c);

  StubServer failing;
  failing.start(500);
  EndpointSink bad(EndpointOptions{failing.url(), std::chrono::milliseconds(1000), 2, spool});
  CHECK_THROWS_AS(bad.emit(c), Error);
  CHECK(failing.received().size() == 3);
  CHECK(read_lines(spool).size() == 2);
  failing.stop();
  fs::remove(spool);
}

TEST_CASE("endpoint url validation") {
  CHECK_THROWS_AS(EndpointSink(EndpointOptions{"https://x/y", std::chrono::milliseconds(10), 0, {}}), Error);
  CHECK_THROWS_AS(EndpointSink(EndpointOptions{"http://", std::chrono::milliseconds(10), 0, {}}), Error);
}
