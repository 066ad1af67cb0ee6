#include "tsdr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "tsdr/error.hpp"
#include "tsdr/kernels.hpp"

namespace tsdr {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kSingularPivotRatio = 1e-12;
constexpr double kJitterScale = 1e-10;

// Returns the failing pivot index, or nullopt when the factorisation succeeds.
// A pivot fails if it is not greater than ratio * original diagonal entry.
std::optional<std::size_t> FactorInPlace(Matrix& m, double ratio) {
  const std::size_t d = m.rows();
  for (std::size_t j = 0; j < d; ++j) {
    const double diag = m(j, j);
    double pivot = diag;
    for (std::size_t k = 0; k < j; ++k) pivot -= m(j, k) * m(j, k);
    if (!(pivot > ratio * std::abs(diag)) || !std::isfinite(pivot)) return j;
    const double ljj = std::sqrt(pivot);
    m(j, j) = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      double sum = m(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= m(i, k) * m(j, k);
      m(i, j) = sum / ljj;
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) m(i, j) = 0.0;
  return std::nullopt;
}

void RequireSquare(const Matrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected square");
}

void RequireFinite(const Matrix& m, const char* what) {
  if (!m.AllFinite())
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": non-finite entry");
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw Error(ErrorCode::kDimensionMismatch, "Matrix: value count does not match shape");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::kDimensionMismatch, "Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::Column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  if (values.size() != rows_) throw Error(ErrorCode::kDimensionMismatch, "set_column: length");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::Transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::SelectRows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::SelectColumns(std::span<const std::size_t> cols) const {
  Matrix out(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
  return out;
}

bool Matrix::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix HorizontalConcat(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  if (a.rows() != b.rows())
    throw Error(ErrorCode::kDimensionMismatch, "HorizontalConcat: row counts differ");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + a.cols());
  }
  return out;
}

Matrix VerticalConcat(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.cols() != b.cols())
    throw Error(ErrorCode::kDimensionMismatch, "VerticalConcat: column counts differ");
  std::vector<double> data(a.values().begin(), a.values().end());
  data.insert(data.end(), b.values().begin(), b.values().end());
  return Matrix(a.rows() + b.rows(), a.cols(), std::move(data));
}

Matrix operator*(const Matrix& a, const Matrix& b) { return kernels::Multiply(a, b); }

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::kDimensionMismatch, "operator-: shapes differ");
  Matrix out = a;
  auto ov = out.values();
  const auto bv = b.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] -= bv[k];
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::kDimensionMismatch, "operator+: shapes differ");
  Matrix out = a;
  auto ov = out.values();
  const auto bv = b.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] += bv[k];
  return out;
}

double FrobeniusNorm(const Matrix& m) {
  double sum = 0.0;
  for (double v : m.values()) sum += v * v;
  return std::sqrt(sum);
}

double MaxAbs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.values()) best = std::max(best, std::abs(v));
  return best;
}

Matrix Cholesky(const Matrix& m) {
  RequireSquare(m, "Cholesky");
  RequireFinite(m, "Cholesky");
  const std::size_t d = m.rows();
  const double scale = MaxAbs(m);
  Matrix sym(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > kSymmetryTolerance * scale)
        throw Error(ErrorCode::kNotSymmetric, "Cholesky: entries (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ") and transpose differ");
      sym(i, j) = 0.5 * (m(i, j) + m(j, i));
    }
  if (auto failed = FactorInPlace(sym, 0.0))
    throw Error(ErrorCode::kNotPositiveDefinite,
                "Cholesky: non-positive pivot at index " + std::to_string(*failed));
  return sym;
}

Matrix CholeskySolve(const Matrix& lower, const Matrix& rhs) {
  const std::size_t d = lower.rows();
  if (rhs.rows() != d) throw Error(ErrorCode::kDimensionMismatch, "CholeskySolve: rhs rows");
  Matrix x = rhs;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      double sum = x(i, c);
      for (std::size_t k = 0; k < i; ++k) sum -= lower(i, k) * x(k, c);
      x(i, c) = sum / lower(i, i);
    }
    for (std::size_t i = d; i-- > 0;) {
      double sum = x(i, c);
      for (std::size_t k = i + 1; k < d; ++k) sum -= lower(k, i) * x(k, c);
      x(i, c) = sum / lower(i, i);
    }
  }
  return x;
}

Matrix SolveNormalEquations(Matrix gram, const Matrix& rhs) {
  RequireSquare(gram, "SolveNormalEquations");
  const std::size_t p = gram.rows();
  Matrix factor = gram;
  if (!FactorInPlace(factor, kSingularPivotRatio)) return CholeskySolve(factor, rhs);

  double trace = 0.0;
  for (std::size_t i = 0; i < p; ++i) trace += gram(i, i);
  double lambda = kJitterScale * trace / static_cast<double>(p);
  if (!(lambda > 0.0)) lambda = kJitterScale;
  for (std::size_t i = 0; i < p; ++i) gram(i, i) += lambda;
  if (auto failed = FactorInPlace(gram, 0.0))
    throw Error(ErrorCode::kNotPositiveDefinite,
                "SolveNormalEquations: jittered system still singular at pivot " +
                    std::to_string(*failed));
  return CholeskySolve(gram, rhs);
}

Matrix SolveLeastSquares(const Matrix& design, const Matrix& targets) {
  const std::vector<double> none(design.cols(), 0.0);
  return SolvePenalizedLeastSquares(design, targets, none);
}

Matrix SolvePenalizedLeastSquares(const Matrix& design, const Matrix& targets,
                                  std::span<const double> penalty) {
  if (design.rows() != targets.rows())
    throw Error(ErrorCode::kDimensionMismatch,
                "SolveLeastSquares: design has " + std::to_string(design.rows()) +
                    " rows, targets have " + std::to_string(targets.rows()));
  if (design.rows() == 0 || design.cols() == 0 || targets.cols() == 0)
    throw Error(ErrorCode::kInvalidArgument, "SolveLeastSquares: empty input");
  if (penalty.size() != design.cols())
    throw Error(ErrorCode::kDimensionMismatch, "SolveLeastSquares: penalty length");
  RequireFinite(design, "SolveLeastSquares");
  RequireFinite(targets, "SolveLeastSquares");
  Matrix gram = kernels::Gram(design);
  for (std::size_t i = 0; i < penalty.size(); ++i) gram(i, i) += penalty[i];
  return SolveNormalEquations(std::move(gram), kernels::TransposeMultiply(design, targets));
}

Matrix Project2sls(const Matrix& instruments, const Matrix& regressors, const Matrix& targets) {
  const std::size_t n = regressors.rows();
  if (instruments.rows() != n || targets.rows() != n)
    throw Error(ErrorCode::kDimensionMismatch, "Project2sls: row counts differ");
  if (instruments.cols() < regressors.cols())
    throw Error(ErrorCode::kUnderIdentified,
                "Project2sls: " + std::to_string(instruments.cols()) + " instruments for " +
                    std::to_string(regressors.cols()) + " regressors");
  if (n <= instruments.cols())
    throw Error(ErrorCode::kInvalidArgument, "Project2sls: need more rows than instruments");
  const Matrix projected = instruments * SolveLeastSquares(instruments, regressors);
  return SolveLeastSquares(projected, targets);
}

Matrix SampleMvn(std::span<const double> mean, const Matrix& cov, std::size_t n, Rng& rng) {
  RequireSquare(cov, "SampleMvn");
  const std::size_t d = cov.rows();
  if (mean.size() != d) throw Error(ErrorCode::kDimensionMismatch, "SampleMvn: mean length");
  const Matrix lower = Cholesky(cov);
  Matrix out(n, d);
  std::vector<double> g(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (double& v : g) v = rng.Normal();
    auto row = out.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      double v = mean[i];
      for (std::size_t k = 0; k <= i; ++k) v += lower(i, k) * g[k];
      row[i] = v;
    }
  }
  return out;
}

}  // namespace tsdr
