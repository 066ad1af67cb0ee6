#include "tsdr/kernels.hpp"

#include <algorithm>

#include "tsdr/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsdr::kernels {

namespace {

constexpr std::size_t kMaxChunks = 64;

// Chunk boundaries depend only on n, never on the thread count.
std::size_t ChunkCount(std::size_t n) {
  const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
  return std::clamp<std::size_t>(blocks, 1, kMaxChunks);
}

void AccumulateTransposeProduct(const Matrix& a, const Matrix& b, std::size_t begin,
                                std::size_t end, Matrix& out) {
  const std::size_t p = a.cols();
  const std::size_t q = b.cols();
  for (std::size_t r = begin; r < end; ++r) {
    const auto ar = a.row(r);
    const auto br = b.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      const double ai = ar[i];
      if (ai == 0.0) continue;
      auto orow = out.row(i);
      for (std::size_t j = 0; j < q; ++j) orow[j] += ai * br[j];
    }
  }
}

void AccumulateGramUpper(const Matrix& a, std::size_t begin, std::size_t end, Matrix& out) {
  const std::size_t p = a.cols();
  for (std::size_t r = begin; r < end; ++r) {
    const auto ar = a.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      const double ai = ar[i];
      if (ai == 0.0) continue;
      auto orow = out.row(i);
      for (std::size_t j = i; j < p; ++j) orow[j] += ai * ar[j];
    }
  }
}

template <typename Accumulate>
Matrix ChunkedReduce(std::size_t n, std::size_t rows, std::size_t cols, Accumulate&& accumulate) {
  const std::size_t chunks = ChunkCount(n);
  const std::size_t chunk_rows = (n + chunks - 1) / chunks;
  std::vector<Matrix> partial(chunks, Matrix(rows, cols));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk_rows;
    const std::size_t end = std::min(n, begin + chunk_rows);
    if (begin < end) accumulate(begin, end, partial[c]);
  }
  Matrix out(rows, cols);
  auto ov = out.values();
  for (const Matrix& part : partial) {
    const auto pv = part.values();
    for (std::size_t k = 0; k < ov.size(); ++k) ov[k] += pv[k];
  }
  return out;
}

}  // namespace

int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Matrix Gram(const Matrix& a) {
  const std::size_t p = a.cols();
  Matrix out = ChunkedReduce(a.rows(), p, p, [&](std::size_t b, std::size_t e, Matrix& acc) {
    AccumulateGramUpper(a, b, e, acc);
  });
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  return out;
}

Matrix TransposeMultiply(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw Error(ErrorCode::kDimensionMismatch, "TransposeMultiply: row counts differ");
  return ChunkedReduce(a.rows(), a.cols(), b.cols(), [&](std::size_t s, std::size_t e, Matrix& acc) {
    AccumulateTransposeProduct(a, b, s, e, acc);
  });
}

Matrix Multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::kDimensionMismatch, "Multiply: inner dimensions differ");
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  const std::size_t q = b.cols();
  Matrix out(n, q);
  // Each output row is computed exactly as in the serial loop.
#pragma omp parallel for schedule(static) if (n * k * q > 32768)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(n); ++r) {
    const auto ar = a.row(r);
    auto orow = out.row(r);
    for (std::size_t i = 0; i < k; ++i) {
      const double ai = ar[i];
      const auto brow = b.row(i);
      for (std::size_t j = 0; j < q; ++j) orow[j] += ai * brow[j];
    }
  }
  return out;
}

namespace reference {

Matrix Gram(const Matrix& a) { return TransposeMultiply(a, a); }

Matrix TransposeMultiply(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw Error(ErrorCode::kDimensionMismatch, "TransposeMultiply: row counts differ");
  Matrix out(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) sum += a(r, i) * b(r, j);
      out(i, j) = sum;
    }
  return out;
}

Matrix Multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::kDimensionMismatch, "Multiply: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t i = 0; i < a.cols(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(r, j) += a(r, i) * b(i, j);
  return out;
}

}  // namespace reference

}  // namespace tsdr::kernels
