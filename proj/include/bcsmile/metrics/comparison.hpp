#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcsmile/corpus/records.hpp"
#include "bcsmile/seq2seq/model.hpp"

namespace bcsmile::metrics {

struct RunComparison {
  double mean_diff = 0.0;  // mean(b) - mean(a)
  double statistic = 0.0;
  double p = 1.0;
  // Differences had zero variance with a nonzero mean; p is reported as 0.
  bool degenerate = false;
};

// Two-sided t-test; paired uses the per-repeat differences b - a, unpaired is
// Welch's test.
RunComparison compare_runs(std::span<const double> a, std::span<const double> b, bool paired = true);

// Two-sided Wilcoxon signed-rank test on b - a. Zero differences are dropped;
// exact null distribution (ties get mid-ranks).
RunComparison wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// "*" for p < 0.05, "." for p < 0.1, "" otherwise.
std::string significance_marker(double p);

// Test-set metrics of one configuration across repeats.
struct ConfigRuns {
  std::vector<double> ape;       // per repeat
  std::vector<double> pck_mean;  // per repeat, mean over sigmas
  std::map<double, std::vector<double>> pck_by_sigma;
};

using AblationResults = std::map<seq2seq::Ablation, ConfigRuns>;

struct AblationRow {
  seq2seq::Ablation config{};
  double mean_ape = 0.0;
  double mean_pck = 0.0;
  std::map<double, double> mean_pck_by_sigma;
  std::optional<RunComparison> ape_vs_baseline;  // absent for the baseline row
  std::optional<RunComparison> pck_vs_baseline;
  std::optional<RunComparison> ape_wilcoxon;
  std::optional<RunComparison> pck_wilcoxon;
};

struct AblationComparison {
  seq2seq::Ablation baseline = seq2seq::Ablation::speaker_only;
  std::vector<AblationRow> rows;  // fixed table order
};

AblationComparison compare_ablations(const AblationResults& results,
                                     seq2seq::Ablation baseline = seq2seq::Ablation::speaker_only);

// Columns Model, APE, PCK with significance markers from the paired t-test.
std::string format_ablation_table(const AblationComparison& cmp);

struct PerformanceRecord {
  double metric = 0.0;
  double duration = 0.0;
  corpus::Intensity intensity = corpus::Intensity::B;
  seq2seq::Ablation config = seq2seq::Ablation::speaker_only;
};

struct RegressionRow {
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double t = 0.0;
  double p = 1.0;
};

// OLS of the metric on duration, intensity dummies (B is the reference) and
// configuration dummies (speaker-only is the reference). Rows exclude the
// intercept: duration, A, C, D, E, then the three non-baseline configs.
std::vector<RegressionRow> performance_regression(std::span<const PerformanceRecord> records);

}  // namespace bcsmile::metrics
