#pragma once

#include <string>
#include <vector>

#include "bcsmile/stats/linalg.hpp"

namespace bcsmile::stats {

struct GlmOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;  // on max |delta beta|
  int max_step_halvings = 50;
};

struct GlmFit {
  std::vector<double> coefficients;  // linear-predictor scale, eta = X beta, mu = 1 / eta
  std::vector<double> std_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;
  // d mu / d x_j at the mean fitted value: -mu_bar^2 * beta_j. Opposite sign to
  // the coefficient because the inverse link is decreasing.
  std::vector<double> mean_space_effects;
  double r_squared = 0.0;  // 1 - SSE / SST on the response scale
  double dispersion = 0.0;
  int iterations = 0;
  std::size_t df_resid = 0;
};

class GlmConvergenceError : public Error {
 public:
  GlmConvergenceError(const std::string& what, std::vector<std::string> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::vector<std::string> trace_;
};

// Gaussian family, inverse link, fitted by IRLS with step halving whenever a
// fitted mean would become non-positive.
GlmFit fit_glm_inverse_link(const Matrix& design, std::span<const double> response, const GlmOptions& options = {});

// X^T [(y - mu) * d mu / d eta]; zero at the maximum-likelihood solution.
std::vector<double> glm_inverse_link_score(const Matrix& design, std::span<const double> response,
                                           std::span<const double> coefficients);

}  // namespace bcsmile::stats
