#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcsmile/stats/linalg.hpp"

namespace bcsmile::stats {

// Categorical factor with level codes 0..levels-1 per observation.
struct Factor {
  std::string name;
  std::vector<std::string> level_names;
  std::vector<int> codes;

  std::size_t levels() const { return level_names.size(); }
};

// A model term: one factor (main effect) or several (interaction).
struct Term {
  std::vector<std::size_t> factors;
};

struct AnovaRow {
  std::string term;
  std::size_t df = 0;
  double sum_sq = 0.0;
  double mean_sq = 0.0;
  double f_value = 0.0;
  double p_value = 1.0;
};

struct AnovaTable {
  std::vector<AnovaRow> rows;
  std::size_t residual_df = 0;
  double residual_ss = 0.0;
  double residual_ms = 0.0;
  double total_ss = 0.0;  // about the grand mean
};

struct FactorialDesign {
  Matrix matrix;  // intercept first
  std::vector<std::pair<std::size_t, std::size_t>> term_columns;  // [begin, end) per term
};

// Sum-to-zero (effects) coding; interactions are products of main-effect columns.
FactorialDesign build_factorial_design(const std::vector<Factor>& factors, const std::vector<Term>& terms);

std::string term_name(const std::vector<Factor>& factors, const Term& term);

// Type-III: each term's SS is the increase in residual SS when that term
// alone is dropped from the full model.
AnovaTable anova_type3(std::span<const double> response, const std::vector<Factor>& factors,
                       const std::vector<Term>& terms);

// Type-I (sequential) sums of squares in the given term order.
AnovaTable anova_sequential(std::span<const double> response, const std::vector<Factor>& factors,
                            const std::vector<Term>& terms);

// Listener sex, speaker sex, relationship; main effects plus the
// listener*relationship, listener*speaker and speaker*relationship interactions.
struct SmileFactorRecord {
  double response = 0.0;
  int sex_listener = 0;  // 0 male, 1 female
  int sex_speaker = 0;
  int relationship = 0;  // siblings, friends, paternal, romantic
};

AnovaTable anova_smile_factors(const std::vector<SmileFactorRecord>& records);

}  // namespace bcsmile::stats
