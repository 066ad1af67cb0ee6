#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tsdr/error.hpp"
#include "tsdr/synth.hpp"

namespace tsdr {
namespace {

TEST(SynthConfig, DefaultsAreValid) {
  const SynthConfig cfg = SynthConfig::Defaults();
  EXPECT_NO_THROW(cfg.Validate());
  EXPECT_EQ(cfg.d_x, 5u);
  EXPECT_EQ(cfg.d_z, 5u);
  EXPECT_EQ(cfg.d_s, 1u);
  EXPECT_EQ(cfg.n, 1000u);
  EXPECT_DOUBLE_EQ(cfg.sigma_eps, 3.0);
  EXPECT_DOUBLE_EQ(cfg.sigma_eta_s(2, 0), 0.3);
  EXPECT_DOUBLE_EQ(cfg.beta_s(0, 4), 0.2);
}

TEST(SynthConfig, NonPositiveDefiniteBlockIsRejected) {
  // With unit variances the block is PD iff sigma_s - d_x * c^2 > 0.
  SynthConfig cfg = SynthConfig::Defaults();
  EXPECT_THROW(WithAxisValue(cfg, SweepAxis::kSigmaEtaS, 0.5).Validate(), Error);
  EXPECT_NO_THROW(WithAxisValue(cfg, SweepAxis::kSigmaEtaS, 0.44).Validate());
  cfg.beta_x.pop_back();
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(Generate, ShapesAndNames) {
  Rng rng(1);
  const Dataset ds = Generate(SynthConfig::Defaults(), rng);
  EXPECT_EQ(ds.rows(), 1000u);
  EXPECT_EQ(ds.s.cols(), 1u);
  EXPECT_EQ(ds.x.cols(), 5u);
  EXPECT_EQ(ds.z.cols(), 5u);
  EXPECT_EQ(ds.task, Task::kRegression);
  EXPECT_EQ(ds.s_names.front(), "s0");
  EXPECT_EQ(ds.x_names.back(), "x4");
  EXPECT_EQ(ds.z_names.front(), "z0");
}

TEST(Generate, DeterministicGivenSeed) {
  Rng a(9), b(9), c(10);
  const Dataset d1 = Generate(SynthConfig::Defaults(), a);
  const Dataset d2 = Generate(SynthConfig::Defaults(), b);
  const Dataset d3 = Generate(SynthConfig::Defaults(), c);
  EXPECT_EQ(d1.y, d2.y);
  EXPECT_EQ(d1.x, d2.x);
  EXPECT_NE(d1.y, d3.y);
}

TEST(Generate, NoiseHasConfiguredVariance) {
  SynthConfig cfg = SynthConfig::Defaults();
  cfg.n = 100000;
  Rng rng(2);
  const Dataset ds = Generate(cfg, rng);
  std::vector<double> eps(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    double fit = 0.0;
    for (std::size_t k = 0; k < cfg.d_x; ++k) fit += ds.x(i, k) * cfg.beta_x[k];
    for (std::size_t k = 0; k < cfg.d_z; ++k) fit += ds.z(i, k) * cfg.beta_z[k];
    eps[i] = ds.y(i, 0) - fit;
  }
  EXPECT_NEAR(oracle::Cov(eps, eps), 9.0, 0.27);
}

TEST(Generate, NoiseCrossCovarianceMatchesBlock) {
  SynthConfig cfg = SynthConfig::Defaults();
  cfg.n = 100000;
  Rng rng(6);
  const Dataset ds = Generate(cfg, rng);
  const auto s = ds.s.column(0);
  for (std::size_t k = 0; k < cfg.d_x; ++k) {
    std::vector<double> eta = ds.x.column(k);
    for (std::size_t i = 0; i < cfg.n; ++i) eta[i] -= cfg.beta_s(0, k) * s[i];
    EXPECT_NEAR(oracle::Cov(eta, s), 0.3, 0.02);
  }
}

TEST(Generate, IndependentWhenUnconfounded) {
  SynthConfig cfg = SynthConfig::Uniform(5, 5, 1, 3.0, 1.0, 1.0, 1.0, 0.0, 0.5, 0.5, 0.0);
  cfg.n = 10000;
  Rng rng(3);
  const Dataset ds = Generate(cfg, rng);
  for (std::size_t k = 0; k < cfg.d_x; ++k)
    EXPECT_LE(std::abs(oracle::Corr(ds.s.column(0), ds.x.column(k))), 0.05);
}

TEST(Generate, CorrelationMatchesPopulation) {
  SynthConfig cfg = SynthConfig::Defaults();
  cfg.n = 50000;
  Rng rng(4);
  const Dataset ds = Generate(cfg, rng);
  const double bs = 0.2, ss = 1.0, c = 0.3, se = 1.0;
  const double var_x = bs * bs * ss + 2.0 * bs * c + se;
  const double expected = (bs * ss + c) / std::sqrt(var_x * ss);
  for (std::size_t k = 0; k < cfg.d_x; ++k)
    EXPECT_NEAR(oracle::Corr(ds.s.column(0), ds.x.column(k)), expected, 0.02);
}

TEST(WithAxisValue, AdjustsOneParameter) {
  const SynthConfig base = SynthConfig::Defaults();
  EXPECT_EQ(WithAxisValue(base, SweepAxis::kN, 300).n, 300u);
  const SynthConfig dx = WithAxisValue(base, SweepAxis::kDx, 8);
  EXPECT_EQ(dx.d_x, 8u);
  EXPECT_EQ(dx.sigma_eta.rows(), 8u);
  EXPECT_EQ(dx.beta_x.size(), 8u);
  EXPECT_EQ(dx.beta_s.cols(), 8u);
  EXPECT_DOUBLE_EQ(WithAxisValue(base, SweepAxis::kStdS, 2.0).sigma_s(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(WithAxisValue(base, SweepAxis::kSigmaEtaS, 0.1).sigma_eta_s(3, 0), 0.1);
}

TEST(SweepAxis, ParsesAndPrints) {
  for (SweepAxis a : {SweepAxis::kN, SweepAxis::kDx, SweepAxis::kSigmaEtaS, SweepAxis::kStdS})
    EXPECT_EQ(ParseSweepAxis(ToString(a)), a);
  EXPECT_THROW(ParseSweepAxis("sigma"), Error);
}

TEST(Sweep, CellLayoutAndInvalidPoints) {
  const SweepTable t = Sweep(SynthConfig::Defaults(), SweepAxis::kSigmaEtaS, {0.0, 0.2, 0.5},
                             SweepOptions{.runs = 4, .seed = 1});
  EXPECT_EQ(t.cells.size(), 3u * 4u * 2u);
  EXPECT_TRUE(t.Find(0.2, "2sdr", "cc").valid);
  const SweepPoint& bad = t.Find(0.5, "ols", "rmse");
  EXPECT_FALSE(bad.valid);
  EXPECT_TRUE(std::isnan(bad.mean));
  EXPECT_EQ(bad.runs, 0u);
  EXPECT_EQ(t.Find(0.0, "ols", "abs_cc").runs, 4u);
}

TEST(Sweep, ParallelEqualsSerial) {
  SweepOptions par{.runs = 6, .seed = 3, .parallel = true};
  SweepOptions ser = par;
  ser.parallel = false;
  const SweepTable a = Sweep(SynthConfig::Defaults(), SweepAxis::kN, {100, 300}, par);
  const SweepTable b = Sweep(SynthConfig::Defaults(), SweepAxis::kN, {100, 300}, ser);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].cc, b.cells[i].cc);
    EXPECT_EQ(a.cells[i].rmse, b.cells[i].rmse);
  }
}

TEST(Sweep, UnconfoundedAlgorithmsAgree) {
  // With s independent of everything, removing it changes nothing in expectation.
  const SynthConfig cfg = SynthConfig::Uniform(5, 5, 1, 3.0, 1.0, 1.0, 1.0, 0.0, 0.5, 0.5, 0.0);
  const SweepTable t = Sweep(cfg, SweepAxis::kN, {3000}, SweepOptions{.runs = 10, .seed = 5});
  EXPECT_NEAR(t.Find(3000, "ols", "rmse").mean, t.Find(3000, "2sdr", "rmse").mean, 0.02);
  EXPECT_LE(std::abs(t.Find(3000, "ols", "cc").mean), 0.05);
}

TEST(Sweep, PointStatisticsFollowCells) {
  const SweepTable t = Sweep(SynthConfig::Defaults(), SweepAxis::kN, {200}, SweepOptions{.runs = 5, .seed = 8});
  std::vector<double> rmse;
  for (const SweepCell& c : t.cells)
    if (c.algorithm == "2sdr") rmse.push_back(c.rmse);
  const double mean = oracle::Mean(rmse);
  const double sd = std::sqrt(oracle::Cov(rmse, rmse) * 5.0 / 4.0);
  const SweepPoint& p = t.Find(200, "2sdr", "rmse");
  EXPECT_NEAR(p.mean, mean, 1e-12);
  EXPECT_NEAR(p.stderr_, sd / std::sqrt(5.0), 1e-12);
}

TEST(WriteSweepCsv, HeaderAndRows) {
  const SweepTable t = Sweep(SynthConfig::Defaults(), SweepAxis::kSigmaEtaS, {0.1, 0.5},
                             SweepOptions{.runs = 2, .seed = 1});
  std::ostringstream out;
  WriteSweepCsv(t, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "axis,value,algorithm,metric,mean,stderr,runs");
  std::size_t rows = 0, nan_rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.rfind("sigma_eta_s,", 0), 0u);
    if (line.find(",nan,nan,") != std::string::npos) ++nan_rows;
  }
  EXPECT_EQ(rows, t.points.size());
  EXPECT_EQ(nan_rows, t.points.size() / 2);
}

}  // namespace
}  // namespace tsdr
