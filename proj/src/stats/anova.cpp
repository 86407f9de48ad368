#include "bcsmile/stats/anova.hpp"

#include <algorithm>
#include <cmath>

#include "bcsmile/stats/distributions.hpp"

namespace bcsmile::stats {
namespace {

std::vector<std::vector<double>> effect_columns(const Factor& f) {
  const std::size_t n = f.codes.size();
  const std::size_t l = f.levels();
  std::vector<std::vector<double>> cols(l - 1, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const int c = f.codes[i];
    if (c < 0 || static_cast<std::size_t>(c) >= l) throw Error("factor '" + f.name + "': level code out of range");
    for (std::size_t j = 0; j + 1 < l; ++j) {
      if (static_cast<std::size_t>(c) == j) cols[j][i] = 1.0;
      else if (static_cast<std::size_t>(c) == l - 1) cols[j][i] = -1.0;
    }
  }
  return cols;
}

double total_ss(std::span<const double> y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  return ss;
}

void finish_row(AnovaRow& row, double residual_ms) {
  row.sum_sq = std::max(0.0, row.sum_sq);
  row.mean_sq = row.sum_sq / static_cast<double>(row.df);
  const double scale = std::max(1.0, residual_ms);
  if (row.mean_sq <= 1e-12 * scale) {
    row.f_value = 0.0;
    row.p_value = 1.0;
  } else if (residual_ms <= 0.0) {
    row.f_value = std::numeric_limits<double>::infinity();
    row.p_value = 0.0;
  } else {
    row.f_value = row.mean_sq / residual_ms;
  }
}

std::vector<std::size_t> columns_without(const FactorialDesign& d, std::size_t skip_term) {
  std::vector<std::size_t> cols{0};
  for (std::size_t t = 0; t < d.term_columns.size(); ++t) {
    if (t == skip_term) continue;
    for (std::size_t c = d.term_columns[t].first; c < d.term_columns[t].second; ++c) cols.push_back(c);
  }
  return cols;
}

OlsFit fit_full(const FactorialDesign& design, std::span<const double> response, const std::vector<Factor>& factors,
                const std::vector<Term>& terms) {
  try {
    return fit_ols(design.matrix, response);
  } catch (const RankDeficientError& e) {
    const std::size_t col = e.columns().front();
    for (std::size_t t = 0; t < design.term_columns.size(); ++t) {
      if (col >= design.term_columns[t].first && col < design.term_columns[t].second) {
        throw Error("term '" + term_name(factors, terms[t]) + "' is not estimable (empty design cells)");
      }
    }
    throw;
  }
}

void validate_inputs(std::span<const double> response, const std::vector<Factor>& factors) {
  for (const auto& f : factors) {
    if (f.levels() < 2) throw Error("factor '" + f.name + "' needs at least 2 levels");
    if (f.codes.size() != response.size()) throw Error("factor '" + f.name + "' length differs from response");
  }
}

}  // namespace

std::string term_name(const std::vector<Factor>& factors, const Term& term) {
  std::string s;
  for (std::size_t f : term.factors) s += (s.empty() ? "" : ":") + factors.at(f).name;
  return s;
}

FactorialDesign build_factorial_design(const std::vector<Factor>& factors, const std::vector<Term>& terms) {
  const std::size_t n = factors.empty() ? 0 : factors.front().codes.size();
  std::vector<std::vector<std::vector<double>>> mains;
  for (const auto& f : factors) mains.push_back(effect_columns(f));

  std::vector<std::vector<double>> columns{std::vector<double>(n, 1.0)};
  FactorialDesign d;
  for (const auto& term : terms) {
    if (term.factors.empty()) throw Error("empty model term");
    std::vector<std::vector<double>> cols = mains.at(term.factors[0]);
    for (std::size_t k = 1; k < term.factors.size(); ++k) {
      const auto& other = mains.at(term.factors[k]);
      std::vector<std::vector<double>> next;
      for (const auto& a : cols) {
        for (const auto& b : other) {
          std::vector<double> prod(n);
          for (std::size_t i = 0; i < n; ++i) prod[i] = a[i] * b[i];
          next.push_back(std::move(prod));
        }
      }
      cols = std::move(next);
    }
    const std::size_t begin = columns.size();
    for (auto& c : cols) columns.push_back(std::move(c));
    d.term_columns.emplace_back(begin, columns.size());
  }
  d.matrix = Matrix(n, columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) d.matrix(i, j) = columns[j][i];
  }
  return d;
}

AnovaTable anova_type3(std::span<const double> response, const std::vector<Factor>& factors,
                       const std::vector<Term>& terms) {
  validate_inputs(response, factors);
  const FactorialDesign design = build_factorial_design(factors, terms);
  const OlsFit full = fit_full(design, response, factors, terms);
  if (full.df_resid < 1) throw Error("ANOVA: no residual degrees of freedom");

  AnovaTable table;
  table.residual_df = full.df_resid;
  table.residual_ss = full.residual_ss;
  table.residual_ms = full.residual_ss / static_cast<double>(full.df_resid);
  table.total_ss = total_ss(response);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto cols = columns_without(design, t);
    const OlsFit reduced = fit_ols(design.matrix.select_columns(cols), response);
    AnovaRow row;
    row.term = term_name(factors, terms[t]);
    row.df = design.term_columns[t].second - design.term_columns[t].first;
    row.sum_sq = reduced.residual_ss - full.residual_ss;
    finish_row(row, table.residual_ms);
    if (std::isfinite(row.f_value) && row.f_value > 0) {
      row.p_value = f_upper_tail(row.f_value, static_cast<double>(row.df), static_cast<double>(table.residual_df));
    }
    table.rows.push_back(row);
  }
  return table;
}

AnovaTable anova_sequential(std::span<const double> response, const std::vector<Factor>& factors,
                            const std::vector<Term>& terms) {
  validate_inputs(response, factors);
  const FactorialDesign design = build_factorial_design(factors, terms);
  const OlsFit full = fit_full(design, response, factors, terms);
  if (full.df_resid < 1) throw Error("ANOVA: no residual degrees of freedom");

  AnovaTable table;
  table.residual_df = full.df_resid;
  table.residual_ss = full.residual_ss;
  table.residual_ms = full.residual_ss / static_cast<double>(full.df_resid);
  table.total_ss = total_ss(response);
  std::vector<std::size_t> cols{0};
  double previous = table.total_ss;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (std::size_t c = design.term_columns[t].first; c < design.term_columns[t].second; ++c) cols.push_back(c);
    const OlsFit fit = fit_ols(design.matrix.select_columns(cols), response);
    AnovaRow row;
    row.term = term_name(factors, terms[t]);
    row.df = design.term_columns[t].second - design.term_columns[t].first;
    row.sum_sq = previous - fit.residual_ss;
    previous = fit.residual_ss;
    finish_row(row, table.residual_ms);
    if (std::isfinite(row.f_value) && row.f_value > 0) {
      row.p_value = f_upper_tail(row.f_value, static_cast<double>(row.df), static_cast<double>(table.residual_df));
    }
    table.rows.push_back(row);
  }
  return table;
}

AnovaTable anova_smile_factors(const std::vector<SmileFactorRecord>& records) {
  std::vector<double> y;
  Factor listener{"sex_listener", {"male", "female"}, {}};
  Factor speaker{"sex_speaker", {"male", "female"}, {}};
  Factor relationship{"relationship", {"siblings", "friends", "paternal", "romantic"}, {}};
  for (const auto& r : records) {
    y.push_back(r.response);
    listener.codes.push_back(r.sex_listener);
    speaker.codes.push_back(r.sex_speaker);
    relationship.codes.push_back(r.relationship);
  }
  const std::vector<Factor> factors{listener, speaker, relationship};
  const std::vector<Term> terms{{{0}}, {{1}}, {{2}}, {{0, 2}}, {{0, 1}}, {{1, 2}}};
  return anova_type3(y, factors, terms);
}

}  // namespace bcsmile::stats
