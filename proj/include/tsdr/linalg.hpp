#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "tsdr/rng.hpp"

namespace tsdr {

// Dense row-major matrix of doubles. Vectors are n x 1 matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix Identity(std::size_t n);
  static Matrix Column(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  Matrix Transposed() const;
  Matrix SelectRows(std::span<const std::size_t> rows) const;
  Matrix SelectColumns(std::span<const std::size_t> cols) const;

  bool AllFinite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// [a | b]; both must have the same row count. Either may have zero columns.
Matrix HorizontalConcat(const Matrix& a, const Matrix& b);
// [a ; b]; both must have the same column count.
Matrix VerticalConcat(const Matrix& a, const Matrix& b);

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);

double FrobeniusNorm(const Matrix& m);
double MaxAbs(const Matrix& m);

// Coefficients B minimising ||design * B - targets||_F via the normal
// equations. If the Gram matrix is numerically singular the system is
// regularised with lambda = 1e-10 * trace(X'X) / p.
Matrix SolveLeastSquares(const Matrix& design, const Matrix& targets);

// Solves (X'X + diag(penalty)) B = X'Y. Falls back to the same jitter as
// SolveLeastSquares if the penalised Gram matrix is still singular.
Matrix SolvePenalizedLeastSquares(const Matrix& design, const Matrix& targets,
                                  std::span<const double> penalty);

// Solves gram * B = rhs for a symmetric positive semi-definite gram, adding
// the trace-scaled jitter when the plain factorisation fails.
Matrix SolveNormalEquations(Matrix gram, const Matrix& rhs);

// Two-stage least squares: X_hat = Z (Z'Z)^-1 Z'X, beta = (X_hat'X_hat)^-1 X_hat'Y.
Matrix Project2sls(const Matrix& instruments, const Matrix& regressors, const Matrix& targets);

// Lower-triangular L with L L' = m. Input is symmetrised as (M + M')/2 after
// a relative symmetry check at 1e-12.
Matrix Cholesky(const Matrix& m);

// Solves L L' x = b given the Cholesky factor.
Matrix CholeskySolve(const Matrix& lower, const Matrix& rhs);

// n rows drawn i.i.d. from N(mean, cov): mean + L g with g from rng.Normal().
Matrix SampleMvn(std::span<const double> mean, const Matrix& cov, std::size_t n, Rng& rng);

}  // namespace tsdr
