#include <gtest/gtest.h>
#include <omp.h>

#include "oracles.hpp"
#include "tsdr/error.hpp"
#include "tsdr/kernels.hpp"

namespace tsdr::kernels {
namespace {

class ThreadCount : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(GetParam());
  }
  void TearDown() override { omp_set_num_threads(saved_); }

 private:
  int saved_ = 1;
};

TEST_P(ThreadCount, GramMatchesReference) {
  Rng rng(1);
  for (std::size_t n : {1u, 7u, 255u, 256u, 257u, 5000u}) {
    const Matrix a = oracle::RandomMatrix(n, 9, rng);
    const Matrix fast = Gram(a);
    const Matrix slow = reference::Gram(a);
    EXPECT_LE(MaxAbs(fast - slow), 1e-10 * static_cast<double>(n)) << n;
    EXPECT_EQ(fast, fast.Transposed());
  }
}

TEST_P(ThreadCount, TransposeMultiplyMatchesReference) {
  Rng rng(2);
  const Matrix a = oracle::RandomMatrix(3001, 5, rng);
  const Matrix b = oracle::RandomMatrix(3001, 3, rng);
  EXPECT_LE(MaxAbs(TransposeMultiply(a, b) - reference::TransposeMultiply(a, b)), 1e-9);
}

TEST_P(ThreadCount, MultiplyIsBitIdenticalToReference) {
  Rng rng(3);
  const Matrix a = oracle::RandomMatrix(700, 40, rng);
  const Matrix b = oracle::RandomMatrix(40, 30, rng);
  EXPECT_EQ(Multiply(a, b), reference::Multiply(a, b));
}

INSTANTIATE_TEST_SUITE_P(Threads, ThreadCount, ::testing::Values(1, 2, 4));

TEST(Kernels, ResultDoesNotDependOnThreadCount) {
  Rng rng(4);
  const Matrix a = oracle::RandomMatrix(4099, 12, rng);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const Matrix one = Gram(a);
  const Matrix one_t = TransposeMultiply(a, a);
  omp_set_num_threads(3);
  const Matrix three = Gram(a);
  const Matrix three_t = TransposeMultiply(a, a);
  omp_set_num_threads(saved);
  EXPECT_EQ(one, three);
  EXPECT_EQ(one_t, three_t);
}

TEST(Kernels, ShapeChecks) {
  EXPECT_THROW(TransposeMultiply(Matrix(3, 2), Matrix(4, 2)), Error);
  EXPECT_THROW(Multiply(Matrix(3, 2), Matrix(3, 2)), Error);
}

}  // namespace
}  // namespace tsdr::kernels
