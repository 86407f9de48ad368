#include "bcsmile/stats/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bcsmile::stats {

Matrix Matrix::select_columns(std::span<const std::size_t> cols) const {
  Matrix out(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
  }
  return out;
}

OlsFit fit_ols(const Matrix& design, std::span<const double> response) {
  const std::size_t n = design.rows();
  const std::size_t p = design.cols();
  if (response.size() != n) throw Error("OLS: response length differs from design rows");
  if (p == 0) throw Error("OLS: empty design");
  if (n <= p) throw Error("OLS: need more observations (" + std::to_string(n) + ") than columns (" +
                          std::to_string(p) + ")");

  Matrix a = design;
  std::vector<double> b(response.begin(), response.end());
  std::vector<double> col_norm(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) col_norm[j] += a(i, j) * a(i, j);
    col_norm[j] = std::sqrt(col_norm[j]);
  }

  std::vector<std::size_t> dependent;
  std::vector<double> v(n);
  std::size_t r = 0;  // next pivot row; lags k once a dependent column is skipped
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = r; i < n; ++i) norm += a(i, k) * a(i, k);
    norm = std::sqrt(norm);
    // The remaining component of column k is negligible relative to its size.
    if (norm <= 1e-10 * std::max(col_norm[k], 1e-300)) {
      dependent.push_back(k);
      continue;
    }
    const double alpha = a(r, k) > 0 ? -norm : norm;
    for (std::size_t i = r; i < n; ++i) v[i] = a(i, k);
    v[r] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = r; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 > 0.0) {
      for (std::size_t j = k; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = r; i < n; ++i) s += v[i] * a(i, j);
        s = 2.0 * s / vnorm2;
        for (std::size_t i = r; i < n; ++i) a(i, j) -= s * v[i];
      }
      double s = 0.0;
      for (std::size_t i = r; i < n; ++i) s += v[i] * b[i];
      s = 2.0 * s / vnorm2;
      for (std::size_t i = r; i < n; ++i) b[i] -= s * v[i];
    }
    ++r;
  }
  if (!dependent.empty()) {
    std::string cols;
    for (std::size_t c : dependent) cols += (cols.empty() ? "" : ", ") + std::to_string(c);
    throw RankDeficientError("OLS: design is rank deficient; dependent columns: " + cols, dependent);
  }

  OlsFit fit;
  fit.coefficients.assign(p, 0.0);
  for (std::size_t k = p; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= a(k, j) * fit.coefficients[j];
    fit.coefficients[k] = s / a(k, k);
  }
  fit.fitted.assign(n, 0.0);
  fit.residual_ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double yhat = 0.0;
    for (std::size_t j = 0; j < p; ++j) yhat += design(i, j) * fit.coefficients[j];
    fit.fitted[i] = yhat;
    const double e = response[i] - yhat;
    fit.residual_ss += e * e;
  }
  fit.df_resid = n - p;

  // R^{-1} by back substitution, then (X^T X)^{-1} = R^{-1} R^{-T}.
  Matrix rinv(p, p);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t k = c + 1; k-- > 0;) {
      double s = (k == c) ? 1.0 : 0.0;
      for (std::size_t j = k + 1; j <= c; ++j) s -= a(k, j) * rinv(j, c);
      rinv(k, c) = s / a(k, k);
    }
  }
  fit.xtx_inverse = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = std::max(i, j); k < p; ++k) s += rinv(i, k) * rinv(j, k);
      fit.xtx_inverse(i, j) = s;
    }
  }
  return fit;
}

OlsFit fit_wls(const Matrix& design, std::span<const double> response, std::span<const double> weights) {
  const std::size_t n = design.rows();
  if (weights.size() != n || response.size() != n) throw Error("WLS: length mismatch");
  Matrix xs(n, design.cols());
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0)) throw Error("WLS: weights must be positive");
    const double w = std::sqrt(weights[i]);
    for (std::size_t j = 0; j < design.cols(); ++j) xs(i, j) = design(i, j) * w;
    ys[i] = response[i] * w;
  }
  OlsFit fit = fit_ols(xs, ys);
  // Report fitted values on the original scale.
  for (std::size_t i = 0; i < n; ++i) {
    double yhat = 0.0;
    for (std::size_t j = 0; j < design.cols(); ++j) yhat += design(i, j) * fit.coefficients[j];
    fit.fitted[i] = yhat;
  }
  return fit;
}

}  // namespace bcsmile::stats
