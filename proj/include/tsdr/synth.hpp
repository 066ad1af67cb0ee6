#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsdr/datamodel.hpp"
#include "tsdr/linalg.hpp"
#include "tsdr/rng.hpp"

namespace tsdr {

// Parameters of the confounded linear generator
//   (eta, s) ~ N(0, [[sigma_eta, sigma_eta_s], [sigma_eta_s', sigma_s]])
//   x = beta_s' s + eta,  z ~ N(0, sigma_z),  eps ~ N(0, sigma_eps^2)
//   y = x' beta_x + z' beta_z + eps
// Matrix parameters are covariances; sigma_eps is a standard deviation.
struct SynthConfig {
  std::size_t d_x = 5;
  std::size_t d_z = 5;
  std::size_t d_s = 1;
  double sigma_eps = 3.0;
  Matrix sigma_eta;    // d_x x d_x
  Matrix sigma_z;      // d_z x d_z
  Matrix sigma_s;      // d_s x d_s
  Matrix sigma_eta_s;  // d_x x d_s
  std::vector<double> beta_x;
  std::vector<double> beta_z;
  Matrix beta_s;  // d_s x d_x
  std::size_t n = 1000;
  double train_fraction = 2.0 / 3.0;

  // Unit diagonals, cross-covariance 0.3, beta_x = beta_z = 0.5, beta_s = 0.2.
  static SynthConfig Defaults();

  // Homogeneous configuration: every diagonal / entry takes the given value.
  static SynthConfig Uniform(std::size_t d_x, std::size_t d_z, std::size_t d_s, double sigma_eps,
                             double eta_var, double z_var, double s_var, double eta_s_cov,
                             double beta_x, double beta_z, double beta_s);

  Matrix BlockCovariance() const;

  // Checks shapes and positive-definiteness of the (eta, s) block covariance.
  void Validate() const;
};

Dataset Generate(const SynthConfig& cfg, Rng& rng);

enum class SweepAxis { kN, kDx, kSigmaEtaS, kStdS };

SweepAxis ParseSweepAxis(const std::string& text);
const char* ToString(SweepAxis axis);

// cfg with one parameter replaced. Std(s) rescales sigma_s so that its first
// diagonal equals value^2; d_x rebuilds the d_x-shaped blocks from the first
// entry of each.
SynthConfig WithAxisValue(const SynthConfig& cfg, SweepAxis axis, double value);

struct SweepCell {
  std::size_t value_index = 0;
  std::size_t run = 0;
  std::string algorithm;  // "ols" or "2sdr"
  bool valid = true;
  double cc = 0.0;
  double rmse = 0.0;
};

struct SweepPoint {
  SweepAxis axis = SweepAxis::kN;
  double value = 0.0;
  std::string algorithm;
  std::string metric;  // "cc", "abs_cc" or "rmse"
  bool valid = true;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t runs = 0;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::kN;
  std::vector<double> values;
  std::size_t runs = 0;
  std::vector<SweepCell> cells;  // values x runs x 2, in that order
  std::vector<SweepPoint> points;

  const SweepPoint& Find(double value, const std::string& algorithm, const std::string& metric) const;
};

struct SweepOptions {
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  bool parallel = true;
};

// For every value and run: generate, split by train_fraction, fit OLS on
// [X | Z] and 2SDR with an OLS second stage, and score CC(s, yhat) and RMSE
// on the test part. Cell seeds come from DeriveSeed(seed, value index, run).
SweepTable Sweep(const SynthConfig& base, SweepAxis axis, const std::vector<double>& values,
                 const SweepOptions& options);

// Columns: axis,value,algorithm,metric,mean,stderr,runs
void WriteSweepCsv(const SweepTable& table, std::ostream& out);

}  // namespace tsdr
