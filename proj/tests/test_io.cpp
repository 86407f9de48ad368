#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "bcsmile/error.hpp"
#include "bcsmile/io/csv.hpp"
#include "bcsmile/io/wav.hpp"
#include "bcsmile/rng.hpp"
#include "doctest.h"

using namespace bcsmile;
namespace fs = std::filesystem;

TEST_CASE("csv parsing with quotes and line numbers") {
  const auto t = io::parse_csv("a,b,c\n1,\"x,y\",3\n\n4,\"he said \"\"hi\"\"\",6\n", "mem.csv");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.text(0, 1) == "x,y");
  CHECK(t.text(1, 1) == "he said \"hi\"");
  CHECK(t.lines[1] == 4);
  CHECK(t.number(1, t.column("c")) == 6.0);
  CHECK(t.integer(0, 0) == 1);
  CHECK_THROWS_AS(t.column("missing"), ParseError);
  CHECK_THROWS_AS(t.number(0, 1), ParseError);
  CHECK_NOTHROW(io::expect_header(t, {"a", "b", "c"}));
  CHECK_THROWS(io::expect_header(t, {"a", "c", "b"}));
}

TEST_CASE("parse errors carry file, line and field") {
  const auto t = io::parse_csv("x,y\n1,oops\n", "f.csv");
  try {
    (void)t.number(0, 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.file() == "f.csv");
    CHECK(e.line() == 2);
    CHECK(e.field() == "y");
  }
}

TEST_CASE("number formatting round-trips") {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<double>(i % 20) - 10.0);
    CHECK(std::stod(io::format_number(v)) == v);
  }
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(2.0) == "2");
}

TEST_CASE("escape_field quotes only when needed") {
  CHECK(io::escape_field("plain") == "plain");
  CHECK(io::escape_field("a,b") == "\"a,b\"");
  CHECK(io::escape_field("q\"") == "\"q\"\"\"");
}

TEST_CASE("wav round trip within 16-bit quantization") {
  const auto path = fs::temp_directory_path() / "bcsmile_test_io.wav";
  std::vector<double> s(1600);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.6 * std::sin(2.0 * std::numbers::pi * 220.0 * i / 16000.0);
  io::write_wav(path, s, 16000);
  const auto w = io::read_wav(path);
  CHECK(w.sample_rate == 16000.0);
  REQUIRE(w.samples.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(w.samples[i] - s[i]) <= 1.0 / 32768.0);
  CHECK(w.duration() == doctest::Approx(0.1));
  CHECK(w.slice(0.05, 0.2).size() == 800);
  CHECK(w.slice(0.2, 0.3).empty());
  fs::remove(path);
}

TEST_CASE("reading a missing wav names the file") {
  CHECK_THROWS_WITH_AS(io::read_wav("/nonexistent/x.wav"), doctest::Contains("x.wav"), Error);
}
