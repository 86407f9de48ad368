#include "bcsmile/stats/glm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bcsmile/stats/distributions.hpp"

namespace bcsmile::stats {
namespace {

std::vector<double> linear_predictor(const Matrix& x, std::span<const double> beta) {
  std::vector<double> eta(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) eta[i] += x(i, j) * beta[j];
  }
  return eta;
}

bool all_positive(const std::vector<double>& eta) {
  return std::all_of(eta.begin(), eta.end(), [](double e) { return e > 0 && std::isfinite(e); });
}

}  // namespace

std::vector<double> glm_inverse_link_score(const Matrix& design, std::span<const double> response,
                                           std::span<const double> coefficients) {
  const auto eta = linear_predictor(design, coefficients);
  std::vector<double> score(design.cols(), 0.0);
  for (std::size_t i = 0; i < design.rows(); ++i) {
    const double mu = 1.0 / eta[i];
    const double g = (response[i] - mu) * (-mu * mu);
    for (std::size_t j = 0; j < design.cols(); ++j) score[j] += design(i, j) * g;
  }
  return score;
}

GlmFit fit_glm_inverse_link(const Matrix& design, std::span<const double> response, const GlmOptions& options) {
  const std::size_t n = design.rows();
  const std::size_t p = design.cols();
  if (response.size() != n) throw Error("GLM: response length differs from design rows");
  double mean_response = 0.0;
  for (double y : response) {
    if (!std::isfinite(y)) throw Error("GLM: non-finite response");
    mean_response += y;
  }
  mean_response /= static_cast<double>(n);
  if (!(mean_response > 0)) throw Error("GLM: cannot find valid starting values (mean response is not positive)");

  // Start from eta = 1 / y; observations at or below zero start at the mean.
  std::vector<double> eta(n), mu(n), w(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu[i] = response[i] > 0 ? response[i] : mean_response;
    eta[i] = 1.0 / mu[i];
  }
  std::vector<double> beta;
  std::vector<std::string> trace;
  OlsFit wls;
  bool converged = false;
  int iter = 0;
  for (iter = 1; iter <= options.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dmu = -mu[i] * mu[i];
      w[i] = dmu * dmu;
      z[i] = eta[i] + (response[i] - mu[i]) / dmu;
    }
    wls = fit_wls(design, z, w);
    std::vector<double> next = wls.coefficients;
    std::vector<double> next_eta = linear_predictor(design, next);
    int halvings = 0;
    while (!beta.empty() && !all_positive(next_eta)) {
      if (++halvings > options.max_step_halvings) {
        throw GlmConvergenceError("GLM: fitted means stayed non-positive after step halving", trace);
      }
      for (std::size_t j = 0; j < p; ++j) next[j] = 0.5 * (next[j] + beta[j]);
      next_eta = linear_predictor(design, next);
    }
    if (!all_positive(next_eta)) throw GlmConvergenceError("GLM: initial fit gives non-positive means", trace);

    double delta = 0.0;
    for (std::size_t j = 0; j < p; ++j) delta = std::max(delta, std::abs(next[j] - (beta.empty() ? 0.0 : beta[j])));
    if (beta.empty()) delta = std::numeric_limits<double>::infinity();
    beta = std::move(next);
    eta = std::move(next_eta);
    for (std::size_t i = 0; i < n; ++i) mu[i] = 1.0 / eta[i];

    std::ostringstream line;
    line << "iter " << iter << ": max|dbeta| = " << delta << ", halvings = " << halvings;
    trace.push_back(line.str());
    if (delta < options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw GlmConvergenceError("GLM: no convergence within " + std::to_string(options.max_iterations) + " iterations",
                              trace);
  }

  // Final weights at the converged means for the covariance.
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(mu[i], 4);
  const OlsFit final_wls = fit_wls(design, eta, w);

  GlmFit fit;
  fit.coefficients = beta;
  fit.iterations = iter;
  fit.df_resid = n - p;
  double sse = 0.0, mean_y = 0.0, mean_mu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sse += (response[i] - mu[i]) * (response[i] - mu[i]);
    mean_y += response[i];
    mean_mu += mu[i];
  }
  mean_y /= static_cast<double>(n);
  mean_mu /= static_cast<double>(n);
  double sst = 0.0;
  for (double y : response) sst += (y - mean_y) * (y - mean_y);
  fit.r_squared = sst > 0 ? 1.0 - sse / sst : 0.0;
  fit.dispersion = sse / static_cast<double>(fit.df_resid);
  for (std::size_t j = 0; j < p; ++j) {
    const double se = std::sqrt(std::max(0.0, fit.dispersion * final_wls.xtx_inverse(j, j)));
    fit.std_errors.push_back(se);
    const double t = se > 0 ? beta[j] / se : (beta[j] == 0 ? 0.0 : std::numeric_limits<double>::infinity());
    fit.t_values.push_back(t);
    fit.p_values.push_back(t == 0 ? 1.0 : t_two_sided(t, static_cast<double>(fit.df_resid)));
    fit.mean_space_effects.push_back(-mean_mu * mean_mu * beta[j]);
  }
  return fit;
}

}  // namespace bcsmile::stats
