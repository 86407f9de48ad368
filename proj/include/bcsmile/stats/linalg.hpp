#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bcsmile/error.hpp"

namespace bcsmile::stats {

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  // Columns in the given order.
  Matrix select_columns(std::span<const std::size_t> cols) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& what, std::vector<std::size_t> columns)
      : Error(what), columns_(std::move(columns)) {}
  const std::vector<std::size_t>& columns() const { return columns_; }

 private:
  std::vector<std::size_t> columns_;
};

struct OlsFit {
  std::vector<double> coefficients;
  std::vector<double> fitted;
  double residual_ss = 0.0;
  std::size_t df_resid = 0;
  Matrix xtx_inverse;  // (X^T X)^{-1}, for standard errors
};

// Least squares through Householder QR. Requires n > p and full column rank;
// dependent columns are reported through RankDeficientError.
OlsFit fit_ols(const Matrix& design, std::span<const double> response);

// Weighted least squares (weights > 0) via row scaling by sqrt(w).
OlsFit fit_wls(const Matrix& design, std::span<const double> response, std::span<const double> weights);

}  // namespace bcsmile::stats
