#include "bcsmile/stats/tukey.hpp"

#include <algorithm>
#include <cmath>

#include "bcsmile/error.hpp"
#include "bcsmile/stats/distributions.hpp"

namespace bcsmile::stats {

TukeyResult tukey_hsd(const LabeledSamples& groups, double alpha) {
  if (groups.size() < 2) throw Error("Tukey HSD needs at least 2 groups");
  if (!(alpha > 0 && alpha < 1)) throw Error("Tukey HSD: alpha must be in (0, 1)");
  std::vector<double> means;
  double sse = 0.0;
  std::size_t total = 0;
  for (const auto& [label, xs] : groups) {
    if (xs.size() < 2) throw Error("Tukey HSD: group '" + label + "' has fewer than 2 samples");
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    for (double x : xs) sse += (x - m) * (x - m);
    means.push_back(m);
    total += xs.size();
  }
  const auto k = static_cast<double>(groups.size());
  TukeyResult out;
  out.alpha = alpha;
  out.df = static_cast<double>(total) - k;
  out.mse = sse / out.df;
  const double q_crit = studentized_range_quantile(1.0 - alpha, k, out.df);

  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      TukeyPair p;
      p.group_a = groups[i].first;
      p.group_b = groups[j].first;
      p.mean_diff = means[j] - means[i];
      const double se = std::sqrt(0.5 * out.mse *
                                  (1.0 / static_cast<double>(groups[i].second.size()) +
                                   1.0 / static_cast<double>(groups[j].second.size())));
      if (se > 0) {
        p.adjusted_p = studentized_range_upper_tail(std::abs(p.mean_diff) / se, k, out.df);
      } else {
        p.adjusted_p = p.mean_diff == 0.0 ? 1.0 : 0.0;
      }
      p.ci_low = p.mean_diff - q_crit * se;
      p.ci_high = p.mean_diff + q_crit * se;
      out.pairs.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace bcsmile::stats
