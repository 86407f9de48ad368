#include <cmath>
#include <random>
#include <vector>

#include "bcsmile/error.hpp"
#include "bcsmile/metrics/comparison.hpp"
#include "bcsmile/metrics/pose_metrics.hpp"
#include "bcsmile/stats/linalg.hpp"
#include "doctest.h"

using namespace bcsmile;
using namespace bcsmile::metrics;
using landmarks::LandmarkFrame;
using landmarks::LandmarkSequence;

namespace {

LandmarkSequence seq_of(std::vector<std::vector<double>> frames) {
  LandmarkSequence s;
  for (auto& f : frames) s.frames.push_back(LandmarkFrame{std::move(f)});
  return s;
}

LandmarkSequence random_seq(std::mt19937_64& rng, std::size_t frames, std::size_t k, double spread) {
  std::normal_distribution<double> n(0.0, spread);
  LandmarkSequence s;
  for (std::size_t t = 0; t < frames; ++t) {
    LandmarkFrame f;
    f.xy.resize(2 * k);
    for (auto& v : f.xy) v = n(rng);
    s.frames.push_back(std::move(f));
  }
  return s;
}

double brute_ape(const LandmarkSequence& a, const LandmarkSequence& b) {
  double total = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    double frame = 0.0;
    for (std::size_t p = 0; p < a.frames[t].count(); ++p)
      frame += std::sqrt(std::pow(a.frames[t].x(p) - b.frames[t].x(p), 2) + std::pow(a.frames[t].y(p) - b.frames[t].y(p), 2));
    total += frame / static_cast<double>(a.frames[t].count());
  }
  return total / static_cast<double>(a.size());
}

double brute_pck(const LandmarkSequence& a, const LandmarkSequence& b, double sigma) {
  std::size_t hit = 0, n = 0;
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t p = 0; p < a.frames[t].count(); ++p) {
      const double d = std::sqrt(std::pow(a.frames[t].x(p) - b.frames[t].x(p), 2) +
                                 std::pow(a.frames[t].y(p) - b.frames[t].y(p), 2));
      hit += d <= sigma;
      ++n;
    }
  return static_cast<double>(hit) / static_cast<double>(n);
}

}  // namespace

TEST_CASE("ape examples") {
  const auto a = seq_of({{1.0, 2.0, 3.0, 4.0}});
  CHECK(ape(a, a) == 0.0);
  CHECK(ape(seq_of({{3.0, 4.0}}), seq_of({{0.0, 0.0}})) == 5.0);
  CHECK(ape(seq_of({{1.0, 0.0, 0.0, 2.0}}), seq_of({{0.0, 0.0, 0.0, 0.0}})) == 1.5);
}

TEST_CASE("pck examples") {
  const auto a = seq_of({{1.0, 2.0, 3.0, 4.0}});
  CHECK(pck(a, a, 0.1) == 1.0);
  CHECK(pck(seq_of({{0.05, 0.0, 0.2, 0.0}}), seq_of({{0.0, 0.0, 0.0, 0.0}}), 0.1) == 0.5);
  // The boundary counts as correct.
  CHECK(pck(seq_of({{0.5, 0.0}}), seq_of({{0.0, 0.0}}), 0.5) == 1.0);
}

TEST_CASE("metrics match brute force and pck is monotone in sigma") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_seq(rng, 50, 68, 0.1), b = random_seq(rng, 50, 68, 0.1);
    CHECK(std::abs(ape(a, b) - brute_ape(a, b)) < 1e-12);
    double last = 0.0;
    for (double s : {0.05, 0.1, 0.15, 0.2, 0.4}) {
      const double v = pck(a, b, s);
      CHECK(std::abs(v - brute_pck(a, b, s)) < 1e-12);
      CHECK(v >= last);
      last = v;
    }
  }
}

TEST_CASE("metrics reject mismatched inputs") {
  CHECK_THROWS_AS(ape(seq_of({{0.0, 0.0}}), seq_of({{0.0, 0.0}, {1.0, 1.0}})), Error);
  CHECK_THROWS_AS(pck(seq_of({{0.0, 0.0}}), seq_of({{0.0, 0.0, 1.0, 1.0}}), 0.1), Error);
  CHECK_THROWS_AS(pck(seq_of({{0.0, 0.0}}), seq_of({{0.0, 0.0}}), 0.0), Error);
}

TEST_CASE("evaluate_pose reports the mean over sigmas") {
  std::mt19937_64 rng(22);
  const auto a = random_seq(rng, 8, 68, 0.1), b = random_seq(rng, 8, 68, 0.1);
  const auto r = evaluate_pose(a, b);
  CHECK(r.k == 68);
  CHECK(r.n_frames == 8);
  CHECK(r.pck_mean == doctest::Approx((pck(a, b, 0.1) + pck(a, b, 0.2)) / 2.0));
}

TEST_CASE("paired t-test") {
  std::vector<double> z{0, 0, 0, 0}, d{1, 2, 3, 4};
  const auto r = compare_runs(z, d);
  CHECK(r.mean_diff == 2.5);
  CHECK(r.statistic == doctest::Approx(3.872983346207417));
  CHECK(r.p == doctest::Approx(0.030466291662170977).epsilon(1e-6));

  const auto same = compare_runs(d, d);
  CHECK(same.mean_diff == 0.0);
  CHECK(same.p == 1.0);

  std::mt19937_64 rng(23);
  std::normal_distribution<double> noise(0.0, 1e-3);
  std::vector<double> base(10), shifted(10);
  for (std::size_t i = 0; i < 10; ++i) {
    base[i] = noise(rng);
    shifted[i] = base[i] + 1.0 + noise(rng);
  }
  CHECK(compare_runs(base, shifted).p < 0.001);

  const auto deg = compare_runs(std::vector<double>{0, 0, 0}, std::vector<double>{1, 1, 1});
  CHECK(deg.degenerate);
  CHECK(deg.p == 0.0);
}

TEST_CASE("welch t-test") {
  const auto r = compare_runs(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 4, 6, 9, 11}, false);
  CHECK(r.statistic == doctest::Approx(2.2234347239869643));
  CHECK(r.p == doctest::Approx(0.07491274505659243).epsilon(1e-5));
}

TEST_CASE("wilcoxon signed-rank exact p") {
  std::vector<double> z5(5, 0.0), d5{1, 2, 3, 4, 5};
  CHECK(wilcoxon_signed_rank(z5, d5).p == doctest::Approx(0.0625));
  std::vector<double> z8(8, 0.0), d8{1, -2, 3, 4, 5, 6, -7, 8};
  CHECK(wilcoxon_signed_rank(z8, d8).p == doctest::Approx(0.25));
}

TEST_CASE("significance markers") {
  CHECK(significance_marker(0.01) == "*");
  CHECK(significance_marker(0.07) == ".");
  CHECK(significance_marker(0.5).empty());
}

TEST_CASE("ablation comparison rows and table") {
  AblationResults res;
  for (auto a : seq2seq::kAllAblations) {
    ConfigRuns runs;
    for (int r = 0; r < 5; ++r) {
      const double shift = a == seq2seq::Ablation::speaker_listener_cond ? -0.5 : 0.0;
      runs.ape.push_back(9.5 + shift + 0.01 * r * (a == seq2seq::Ablation::speaker_only ? 1.0 : 1.1));
      runs.pck_mean.push_back(0.22 - shift / 100.0 + 0.0001 * r);
      runs.pck_by_sigma[0.1] = runs.pck_mean;
      runs.pck_by_sigma[0.2] = runs.pck_mean;
    }
    res[a] = runs;
  }
  const auto cmp = compare_ablations(res);
  REQUIRE(cmp.rows.size() == 4);
  CHECK(cmp.rows[0].config == seq2seq::Ablation::speaker_only);
  CHECK(!cmp.rows[0].ape_vs_baseline);
  CHECK(cmp.rows[2].ape_vs_baseline->p < 0.05);
  const auto table = format_ablation_table(cmp);
  CHECK(table.find("Speaker only (Baseline)") != std::string::npos);
  CHECK(table.find("Speaker and Listener with Conditioning vector") != std::string::npos);
}

TEST_CASE("performance regression") {
  using corpus::Intensity;
  using seq2seq::Ablation;
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> dur(1.0, 4.0);
  std::vector<PerformanceRecord> recs;
  for (int i = 0; i < 200; ++i) {
    PerformanceRecord r;
    r.duration = dur(rng);
    r.intensity = static_cast<Intensity>(1 + i % 5);
    r.config = seq2seq::kAllAblations[static_cast<std::size_t>(i / 5) % 4];
    r.metric = 2.0 * r.duration;
    recs.push_back(r);
  }
  const auto rows = performance_regression(recs);
  REQUIRE(rows.size() == 8);
  const std::vector<std::string> names{"duration",    "intensity_A", "intensity_C", "intensity_D", "intensity_E",
                                       "config_speaker_listener", "config_speaker_listener_cond",
                                       "config_speaker_cond"};
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].term == names[i]);
  CHECK(rows[0].estimate == doctest::Approx(2.0));
  CHECK(rows[0].p < 1e-6);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(rows[i].estimate) < 1e-9);

  for (auto& r : recs) r.metric = 3.0;
  for (const auto& row : performance_regression(recs)) {
    CHECK(row.estimate == 0.0);
    CHECK(row.p == doctest::Approx(1.0));
  }

  for (auto& r : recs) r.intensity = Intensity::B;
  for (auto& r : recs) r.metric = r.duration;
  CHECK_THROWS_AS(performance_regression(recs), stats::RankDeficientError);
}
