#pragma once

#include "tsdr/linalg.hpp"

// Data-parallel dense kernels. The OpenMP versions reduce fixed-size row
// blocks in block order, so their output does not depend on the thread count.
// The serial reference versions are the textbook loops kept for testing and
// benchmarking.
namespace tsdr::kernels {

inline constexpr std::size_t kRowBlock = 256;

// A' A
Matrix Gram(const Matrix& a);
// A' B
Matrix TransposeMultiply(const Matrix& a, const Matrix& b);
// A B
Matrix Multiply(const Matrix& a, const Matrix& b);

int MaxThreads();

namespace reference {
Matrix Gram(const Matrix& a);
Matrix TransposeMultiply(const Matrix& a, const Matrix& b);
Matrix Multiply(const Matrix& a, const Matrix& b);
}  // namespace reference

}  // namespace tsdr::kernels
