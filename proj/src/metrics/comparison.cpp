#include "bcsmile/metrics/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "bcsmile/error.hpp"
#include "bcsmile/stats/distributions.hpp"
#include "bcsmile/stats/linalg.hpp"

namespace bcsmile::metrics {
namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_var(std::span<const double> v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

RunComparison compare_runs(std::span<const double> a, std::span<const double> b, bool paired) {
  if (a.size() < 2 || b.size() < 2) throw Error("compare_runs: need at least two repeats per run");
  RunComparison r;
  if (paired) {
    if (a.size() != b.size()) throw Error("compare_runs: paired test needs equal repeat counts");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
    r.mean_diff = mean_of(d);
    const double var = sample_var(d, r.mean_diff);
    if (var <= 0.0) {
      if (r.mean_diff == 0.0) return r;
      r.p = 0.0;
      r.statistic = std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
      r.degenerate = true;
      return r;
    }
    r.statistic = r.mean_diff / std::sqrt(var / static_cast<double>(d.size()));
    r.p = stats::t_two_sided(r.statistic, static_cast<double>(d.size() - 1));
    return r;
  }
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = sample_var(a, ma) / static_cast<double>(a.size());
  const double vb = sample_var(b, mb) / static_cast<double>(b.size());
  r.mean_diff = mb - ma;
  if (va + vb <= 0.0) {
    if (r.mean_diff == 0.0) return r;
    r.p = 0.0;
    r.statistic = std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
    r.degenerate = true;
    return r;
  }
  r.statistic = r.mean_diff / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) /
                    (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  r.p = stats::t_two_sided(r.statistic, df);
  return r;
}

RunComparison wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("wilcoxon: need equal repeat counts >= 2");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] != a[i]) d.push_back(b[i] - a[i]);
  }
  RunComparison r;
  std::vector<double> all(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) all[i] = b[i] - a[i];
  r.mean_diff = mean_of(all);
  const std::size_t n = d.size();
  if (n == 0) return r;

  // Doubled mid-ranks keep tied ranks integral.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return std::abs(d[i]) < std::abs(d[j]); });
  std::vector<int> rank2(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const int r2 = static_cast<int>(i + j + 2);  // 2 * mean of ranks i+1..j+1
    for (std::size_t m = i; m <= j; ++m) rank2[order[m]] = r2;
    i = j + 1;
  }
  int w_plus = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank2[i];
    if (d[i] > 0) w_plus += rank2[i];
  }
  // Null: each rank is positive with probability 1/2.
  std::vector<double> dist(static_cast<std::size_t>(total) + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int s = total; s >= rank2[i]; --s) dist[s] += dist[s - rank2[i]];
  }
  const double denom = std::ldexp(1.0, static_cast<int>(n));
  double lower = 0.0, upper = 0.0;
  for (int s = 0; s <= total; ++s) {
    if (s <= w_plus) lower += dist[s];
    if (s >= w_plus) upper += dist[s];
  }
  r.statistic = 0.5 * w_plus;
  r.p = std::min(1.0, 2.0 * std::min(lower, upper) / denom);
  return r;
}

std::string significance_marker(double p) {
  if (p < 0.05) return "*";
  if (p < 0.1) return ".";
  return "";
}

AblationComparison compare_ablations(const AblationResults& results, seq2seq::Ablation baseline) {
  auto base_it = results.find(baseline);
  if (base_it == results.end()) throw Error("ablation comparison: baseline configuration missing");
  const ConfigRuns& base = base_it->second;
  AblationComparison cmp;
  cmp.baseline = baseline;
  for (seq2seq::Ablation a : seq2seq::kAllAblations) {
    auto it = results.find(a);
    if (it == results.end()) continue;
    const ConfigRuns& runs = it->second;
    if (runs.ape.empty()) throw Error("ablation comparison: no repeats for " + std::string(to_string(a)));
    AblationRow row;
    row.config = a;
    row.mean_ape = mean_of(runs.ape);
    row.mean_pck = mean_of(runs.pck_mean);
    for (const auto& [sigma, v] : runs.pck_by_sigma) row.mean_pck_by_sigma[sigma] = mean_of(v);
    if (a != baseline && runs.ape.size() >= 2) {
      row.ape_vs_baseline = compare_runs(base.ape, runs.ape, true);
      row.pck_vs_baseline = compare_runs(base.pck_mean, runs.pck_mean, true);
      row.ape_wilcoxon = wilcoxon_signed_rank(base.ape, runs.ape);
      row.pck_wilcoxon = wilcoxon_signed_rank(base.pck_mean, runs.pck_mean);
    }
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

std::string format_ablation_table(const AblationComparison& cmp) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-48s %-12s %-12s %-10s %-10s\n", "Model", "APE(lower)", "PCK(higher)", "p(APE)",
                "p(PCK)");
  os << buf;
  for (const auto& row : cmp.rows) {
    std::string name(seq2seq::display_name(row.config));
    std::string ape_s, pck_s, pa = "-", pp = "-";
    std::snprintf(buf, sizeof buf, "%.4f", row.mean_ape);
    ape_s = buf;
    std::snprintf(buf, sizeof buf, "%.4f", row.mean_pck);
    pck_s = buf;
    if (row.ape_vs_baseline) {
      ape_s += significance_marker(row.ape_vs_baseline->p);
      pck_s += significance_marker(row.pck_vs_baseline->p);
      std::snprintf(buf, sizeof buf, "%.4g", row.ape_vs_baseline->p);
      pa = buf;
      std::snprintf(buf, sizeof buf, "%.4g", row.pck_vs_baseline->p);
      pp = buf;
    }
    std::snprintf(buf, sizeof buf, "%-48s %-12s %-12s %-10s %-10s\n", name.c_str(), ape_s.c_str(), pck_s.c_str(),
                  pa.c_str(), pp.c_str());
    os << buf;
  }
  os << "* p < 0.05, . p < 0.1 (paired t-test against the baseline across repeats)\n";
  return os.str();
}

std::vector<RegressionRow> performance_regression(std::span<const PerformanceRecord> records) {
  using corpus::Intensity;
  using seq2seq::Ablation;
  if (records.size() < 10) throw Error("performance regression: need at least 10 instances");
  const std::array<Intensity, 4> levels{Intensity::A, Intensity::C, Intensity::D, Intensity::E};
  const std::array<Ablation, 3> configs{Ablation::speaker_listener, Ablation::speaker_listener_cond,
                                        Ablation::speaker_cond};
  const std::size_t p = 1 + 1 + levels.size() + configs.size();
  stats::Matrix x(records.size(), p);
  std::vector<double> y(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    x(i, 0) = 1.0;
    x(i, 1) = r.duration;
    for (std::size_t l = 0; l < levels.size(); ++l) x(i, 2 + l) = r.intensity == levels[l] ? 1.0 : 0.0;
    for (std::size_t c = 0; c < configs.size(); ++c) x(i, 2 + levels.size() + c) = r.config == configs[c] ? 1.0 : 0.0;
    y[i] = r.metric;
  }
  std::vector<std::string> names{"(intercept)", "duration"};
  for (Intensity l : levels) names.push_back(std::string("intensity_") + corpus::to_char(l));
  for (Ablation c : configs) names.push_back("config_" + std::string(to_string(c)));

  std::vector<RegressionRow> rows;
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
    // Nothing to explain; avoid reading slopes off round-off.
    for (std::size_t j = 1; j < p; ++j) rows.push_back(RegressionRow{names[j], 0.0, 0.0, 0.0, 1.0});
    return rows;
  }
  stats::OlsFit fit;
  try {
    fit = stats::fit_ols(x, y);
  } catch (const stats::RankDeficientError& e) {
    std::string cols;
    for (std::size_t c : e.columns()) cols += (cols.empty() ? "" : ", ") + names[c];
    throw stats::RankDeficientError("performance regression: not estimable (" + cols + ")", e.columns());
  }
  const double sigma2 = fit.df_resid > 0 ? fit.residual_ss / static_cast<double>(fit.df_resid) : 0.0;
  for (std::size_t j = 1; j < p; ++j) {
    RegressionRow row;
    row.term = names[j];
    row.estimate = fit.coefficients[j];
    row.std_error = std::sqrt(std::max(0.0, sigma2 * fit.xtx_inverse(j, j)));
    if (row.std_error > 0.0) {
      row.t = row.estimate / row.std_error;
      row.p = stats::t_two_sided(row.t, static_cast<double>(fit.df_resid));
    } else {
      row.t = 0.0;
      row.p = row.estimate == 0.0 ? 1.0 : 0.0;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bcsmile::metrics
