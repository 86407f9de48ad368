#include "bcsmile/stats/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bcsmile/error.hpp"

namespace bcsmile::stats {
namespace {

constexpr std::array<double, 8> kKronrodNodes{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                              0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                              0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                              0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (0.949.., 0.741.., 0.405.., 0).
constexpr std::array<double, 4> kGaussWeights{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<double(double)>& f, double a, double b, double& kronrod, double& gauss) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  kronrod = kKronrodWeights[7] * fc;
  gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[i];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[i] * s;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * s;
  }
  kronrod *= h;
  gauss *= h;
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
  double k = 0, g = 0;
  gk15(f, a, b, k, g);
  if (std::abs(k - g) <= tol || depth <= 0) return k;
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1);
}

double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

// P(range of k iid standard normals <= w).
double normal_range_cdf(double w, double k) {
  if (w <= 0) return 0.0;
  auto integrand = [&](double z) {
    const double inner = normal_cdf(z) - normal_cdf(z - w);
    return inner <= 0 ? 0.0 : normal_pdf(z) * std::pow(inner, k - 1.0);
  };
  double total = 0.0;
  constexpr int pieces = 16;
  const double lo = -8.5, hi = 8.5 + std::min(w, 8.5);
  const double step = (hi - lo) / pieces;
  for (int i = 0; i < pieces; ++i) total += adapt(integrand, lo + i * step, lo + (i + 1) * step, 1e-13, 30);
  return std::clamp(k * total, 0.0, 1.0);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth) {
  return adapt(f, a, b, abs_tol, max_depth);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw Error("incomplete beta: parameters must be positive");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_upper_tail(double f, double df1, double df2) {
  if (!(df1 > 0) || !(df2 > 0)) throw Error("F tail: degrees of freedom must be positive");
  if (std::isnan(f)) throw Error("F tail: statistic is NaN");
  if (f <= 0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return std::clamp(regularized_incomplete_beta(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f)), 0.0, 1.0);
}

double t_two_sided(double t, double df) {
  if (!(df > 0)) throw Error("t tail: degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  if (std::isinf(df)) return std::erfc(std::abs(t) / std::numbers::sqrt2);
  return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t)), 0.0, 1.0);
}

double studentized_range_cdf(double q, double k, double df) {
  if (!(k >= 2)) throw Error("studentized range: need k >= 2");
  if (!(df > 0)) throw Error("studentized range: degrees of freedom must be positive");
  if (q <= 0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(df) || df > 1e8) return normal_range_cdf(q, k);

  // Scale s = sqrt(chi2_df / df) integrated against the infinite-df cdf at q*s.
  const double half = 0.5 * df;
  const double log_norm = std::log(2.0) + half * std::log(half) - std::lgamma(half);
  auto integrand = [&](double s) {
    if (s <= 0) return 0.0;
    const double log_density = log_norm + (df - 1.0) * std::log(s) - half * s * s;
    return std::exp(log_density) * normal_range_cdf(q * s, k);
  };
  const double spread = 12.0 / std::sqrt(df);
  const double lo = std::max(0.0, 1.0 - spread);
  const double hi = 1.0 + spread + (df < 4 ? 4.0 : 0.0);
  constexpr int pieces = 24;
  const double step = (hi - lo) / pieces;
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) total += adapt(integrand, lo + i * step, lo + (i + 1) * step, 1e-10, 20);
  return std::clamp(total, 0.0, 1.0);
}

double studentized_range_upper_tail(double q, double k, double df) {
  return std::clamp(1.0 - studentized_range_cdf(q, k, df), 0.0, 1.0);
}

double studentized_range_quantile(double p, double k, double df) {
  if (!(p > 0 && p < 1)) throw Error("studentized range quantile: p must be in (0, 1)");
  double lo = 0.0, hi = 4.0;
  while (studentized_range_cdf(hi, k, df) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) throw Error("studentized range quantile: search diverged");
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (studentized_range_cdf(mid, k, df) < p ? lo : hi) = mid;
    if (hi - lo < 1e-10) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace bcsmile::stats
