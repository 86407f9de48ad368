#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bcsmile::stats {

struct TukeyPair {
  std::string group_a;
  std::string group_b;
  double mean_diff = 0.0;  // mean(b) - mean(a)
  double adjusted_p = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct TukeyResult {
  std::vector<TukeyPair> pairs;
  double mse = 0.0;   // pooled within-group variance
  double df = 0.0;
  double alpha = 0.05;
};

using LabeledSamples = std::vector<std::pair<std::string, std::vector<double>>>;

// Tukey-Kramer pairwise comparisons with the studentized range distribution.
TukeyResult tukey_hsd(const LabeledSamples& groups, double alpha = 0.05);

}  // namespace bcsmile::stats
