#pragma once

#include <functional>
#include <limits>

namespace bcsmile::stats {

inline constexpr double kInfiniteDf = std::numeric_limits<double>::infinity();

// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-12,
                 int max_depth = 40);

double normal_cdf(double x);
double normal_pdf(double x);

// I_x(a, b)
double regularized_incomplete_beta(double a, double b, double x);

// P(F(df1, df2) > f)
double f_upper_tail(double f, double df1, double df2);

// Two-sided P(|T_df| > |t|)
double t_two_sided(double t, double df);

// Studentized range for k means and df error degrees of freedom (df may be
// kInfiniteDf). Double integral evaluated by adaptive quadrature.
double studentized_range_cdf(double q, double k, double df);
double studentized_range_upper_tail(double q, double k, double df);
// Smallest q with cdf(q) >= p.
double studentized_range_quantile(double p, double k, double df);

}  // namespace bcsmile::stats
