#include "tsdr/synth.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "tsdr/error.hpp"
#include "tsdr/metrics.hpp"
#include "tsdr/twostage.hpp"

namespace tsdr {

SynthConfig SynthConfig::Uniform(std::size_t d_x, std::size_t d_z, std::size_t d_s, double sigma_eps,
                                 double eta_var, double z_var, double s_var, double eta_s_cov,
                                 double beta_x, double beta_z, double beta_s) {
  SynthConfig c;
  c.d_x = d_x;
  c.d_z = d_z;
  c.d_s = d_s;
  c.sigma_eps = sigma_eps;
  c.sigma_eta = Matrix::Identity(d_x);
  for (double& v : c.sigma_eta.values()) v *= eta_var;
  c.sigma_z = Matrix::Identity(d_z);
  for (double& v : c.sigma_z.values()) v *= z_var;
  c.sigma_s = Matrix::Identity(d_s);
  for (double& v : c.sigma_s.values()) v *= s_var;
  c.sigma_eta_s = Matrix(d_x, d_s, eta_s_cov);
  c.beta_x.assign(d_x, beta_x);
  c.beta_z.assign(d_z, beta_z);
  c.beta_s = Matrix(d_s, d_x, beta_s);
  return c;
}

SynthConfig SynthConfig::Defaults() { return Uniform(5, 5, 1, 3.0, 1.0, 1.0, 1.0, 0.3, 0.5, 0.5, 0.2); }

Matrix SynthConfig::BlockCovariance() const {
  const std::size_t d = d_x + d_s;
  Matrix block(d, d);
  for (std::size_t i = 0; i < d_x; ++i)
    for (std::size_t j = 0; j < d_x; ++j) block(i, j) = sigma_eta(i, j);
  for (std::size_t i = 0; i < d_x; ++i)
    for (std::size_t j = 0; j < d_s; ++j) {
      block(i, d_x + j) = sigma_eta_s(i, j);
      block(d_x + j, i) = sigma_eta_s(i, j);
    }
  for (std::size_t i = 0; i < d_s; ++i)
    for (std::size_t j = 0; j < d_s; ++j) block(d_x + i, d_x + j) = sigma_s(i, j);
  return block;
}

void SynthConfig::Validate() const {
  auto shape = [](const Matrix& m, std::size_t r, std::size_t c, const char* what) {
    if (m.rows() != r || m.cols() != c)
      throw Error(ErrorCode::kDimensionMismatch, std::string("synth config: ") + what + " has wrong shape");
  };
  if (d_x == 0 || d_s == 0) throw Error(ErrorCode::kInvalidArgument, "synth config: d_x and d_s must be >= 1");
  shape(sigma_eta, d_x, d_x, "sigma_eta");
  shape(sigma_z, d_z, d_z, "sigma_z");
  shape(sigma_s, d_s, d_s, "sigma_s");
  shape(sigma_eta_s, d_x, d_s, "sigma_eta_s");
  shape(beta_s, d_s, d_x, "beta_s");
  if (beta_x.size() != d_x || beta_z.size() != d_z)
    throw Error(ErrorCode::kDimensionMismatch, "synth config: coefficient vector length");
  if (!(sigma_eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "synth config: sigma_eps must be > 0");
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "synth config: n must be >= 2");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "synth config: train_fraction must lie in (0, 1)");
  (void)Cholesky(BlockCovariance());
  if (d_z > 0) (void)Cholesky(sigma_z);
}

Dataset Generate(const SynthConfig& cfg, Rng& rng) {
  cfg.Validate();
  const std::size_t n = cfg.n;
  const Matrix joint = SampleMvn(std::vector<double>(cfg.d_x + cfg.d_s, 0.0), cfg.BlockCovariance(), n, rng);
  Matrix z(n, cfg.d_z);
  if (cfg.d_z > 0) z = SampleMvn(std::vector<double>(cfg.d_z, 0.0), cfg.sigma_z, n, rng);

  Dataset ds;
  ds.task = Task::kRegression;
  ds.s = Matrix(n, cfg.d_s);
  ds.x = Matrix(n, cfg.d_x);
  ds.y = Matrix(n, 1);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < cfg.d_s; ++j) ds.s(r, j) = joint(r, cfg.d_x + j);
    for (std::size_t k = 0; k < cfg.d_x; ++k) {
      double v = joint(r, k);
      for (std::size_t j = 0; j < cfg.d_s; ++j) v += ds.s(r, j) * cfg.beta_s(j, k);
      ds.x(r, k) = v;
    }
    double y = cfg.sigma_eps * rng.Normal();
    for (std::size_t k = 0; k < cfg.d_x; ++k) y += ds.x(r, k) * cfg.beta_x[k];
    for (std::size_t k = 0; k < cfg.d_z; ++k) y += z(r, k) * cfg.beta_z[k];
    ds.y(r, 0) = y;
  }
  ds.z = std::move(z);
  for (std::size_t j = 0; j < cfg.d_s; ++j) ds.s_names.push_back("s" + std::to_string(j));
  for (std::size_t k = 0; k < cfg.d_x; ++k) ds.x_names.push_back("x" + std::to_string(k));
  for (std::size_t k = 0; k < cfg.d_z; ++k) ds.z_names.push_back("z" + std::to_string(k));
  ds.s_binary.assign(cfg.d_s, false);
  ds.x_binary.assign(cfg.d_x, false);
  return ds;
}

SweepAxis ParseSweepAxis(const std::string& text) {
  if (text == "n") return SweepAxis::kN;
  if (text == "d_x") return SweepAxis::kDx;
  if (text == "sigma_eta_s") return SweepAxis::kSigmaEtaS;
  if (text == "std_s") return SweepAxis::kStdS;
  throw Error(ErrorCode::kInvalidArgument, "unknown sweep axis '" + text + "' (n, d_x, sigma_eta_s, std_s)");
}

const char* ToString(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kN: return "n";
    case SweepAxis::kDx: return "d_x";
    case SweepAxis::kSigmaEtaS: return "sigma_eta_s";
    case SweepAxis::kStdS: return "std_s";
  }
  return "n";
}

SynthConfig WithAxisValue(const SynthConfig& cfg, SweepAxis axis, double value) {
  SynthConfig out = cfg;
  switch (axis) {
    case SweepAxis::kN:
      if (!(value >= 2.0) || value != std::floor(value))
        throw Error(ErrorCode::kInvalidArgument, "sweep: n must be an integer >= 2");
      out.n = static_cast<std::size_t>(value);
      break;
    case SweepAxis::kDx: {
      if (!(value >= 1.0) || value != std::floor(value))
        throw Error(ErrorCode::kInvalidArgument, "sweep: d_x must be an integer >= 1");
      const std::size_t d = static_cast<std::size_t>(value);
      SynthConfig u = SynthConfig::Uniform(d, cfg.d_z, cfg.d_s, cfg.sigma_eps, cfg.sigma_eta(0, 0), 1.0,
                                           1.0, cfg.sigma_eta_s(0, 0), cfg.beta_x[0], 0.0, cfg.beta_s(0, 0));
      out.d_x = d;
      out.sigma_eta = u.sigma_eta;
      out.sigma_eta_s = u.sigma_eta_s;
      out.beta_x = u.beta_x;
      out.beta_s = u.beta_s;
      break;
    }
    case SweepAxis::kSigmaEtaS:
      for (double& v : out.sigma_eta_s.values()) v = value;
      break;
    case SweepAxis::kStdS: {
      if (!(value > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sweep: std_s must be > 0");
      const double scale = value * value / cfg.sigma_s(0, 0);
      for (double& v : out.sigma_s.values()) v *= scale;
      break;
    }
  }
  return out;
}

const SweepPoint& SweepTable::Find(double value, const std::string& algorithm, const std::string& metric) const {
  for (const auto& p : points)
    if (p.value == value && p.algorithm == algorithm && p.metric == metric) return p;
  throw Error(ErrorCode::kInvalidArgument, "sweep table: no point for " + algorithm + "/" + metric);
}

namespace {

void RunCell(const SynthConfig& cfg, std::uint64_t seed, SweepCell& ols, SweepCell& tsdr) {
  Rng rng(seed);
  const Dataset ds = Generate(cfg, rng);
  SplitPlan plan;
  plan.train_fraction = cfg.train_fraction;
  plan.seed = rng.NextU64();
  const auto split = MakeSplits(ds.rows(), plan).front();
  const Dataset train = ds.SelectRows(split.train);
  const Dataset test = ds.SelectRows(split.test);
  const auto y = test.targets();
  const auto s = test.s.column(0);

  const TwoStagePredictor baseline = FitBaseline(train, OlsStage{}, rng);
  const TwoStagePredictor fair = Fit2sdr(train, OlsStage{}, FirstStageOptions{}, rng);
  const auto pb = Predict2sdr(baseline, test);
  const auto pf = Predict2sdr(fair, test);
  ols.cc = CorrelationCoefficient(pb.scores, s);
  ols.rmse = Rmse(pb.scores, y);
  tsdr.cc = CorrelationCoefficient(pf.scores, s);
  tsdr.rmse = Rmse(pf.scores, y);
}

SweepPoint Aggregate(SweepAxis axis, double value, const std::string& algorithm, const std::string& metric,
                     const std::vector<double>& xs) {
  SweepPoint p;
  p.axis = axis;
  p.value = value;
  p.algorithm = algorithm;
  p.metric = metric;
  p.runs = xs.size();
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  p.mean = mean;
  p.stderr_ = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()))
                            : 0.0;
  return p;
}

}  // namespace

SweepTable Sweep(const SynthConfig& base, SweepAxis axis, const std::vector<double>& values,
                 const SweepOptions& options) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep: no values");
  if (options.runs == 0) throw Error(ErrorCode::kInvalidArgument, "sweep: runs must be >= 1");

  SweepTable table;
  table.axis = axis;
  table.values = values;
  table.runs = options.runs;

  std::vector<SynthConfig> configs;
  std::vector<bool> valid;
  for (double v : values) {
    SynthConfig cfg = WithAxisValue(base, axis, v);
    bool ok = true;
    try {
      cfg.Validate();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotPositiveDefinite) throw;
      ok = false;
    }
    configs.push_back(std::move(cfg));
    valid.push_back(ok);
  }

  const std::size_t runs = options.runs;
  const std::size_t total = values.size() * runs;
  table.cells.resize(total * 2);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t a = 0; a < 2; ++a) {
      SweepCell& c = table.cells[2 * i + a];
      c.value_index = i / runs;
      c.run = i % runs;
      c.algorithm = a == 0 ? "ols" : "2sdr";
      c.valid = valid[c.value_index];
    }
  }

#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(total); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const std::size_t vi = i / runs;
    if (!valid[vi]) continue;
    RunCell(configs[vi], DeriveSeed(options.seed, vi, i % runs), table.cells[2 * i], table.cells[2 * i + 1]);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (const std::string alg : {"ols", "2sdr"}) {
      std::vector<double> cc, abs_cc, rmse;
      for (std::size_t r = 0; r < runs; ++r) {
        const SweepCell& c = table.cells[2 * (vi * runs + r) + (alg == "ols" ? 0 : 1)];
        cc.push_back(c.cc);
        abs_cc.push_back(std::abs(c.cc));
        rmse.push_back(c.rmse);
      }
      for (auto [metric, xs] : {std::pair{"cc", &cc}, std::pair{"abs_cc", &abs_cc}, std::pair{"rmse", &rmse}}) {
        SweepPoint p = Aggregate(axis, values[vi], alg, metric, *xs);
        if (!valid[vi]) {
          p.valid = false;
          p.mean = nan;
          p.stderr_ = nan;
          p.runs = 0;
        }
        table.points.push_back(std::move(p));
      }
    }
  }
  return table;
}

void WriteSweepCsv(const SweepTable& table, std::ostream& out) {
  out << "axis,value,algorithm,metric,mean,stderr,runs\n";
  out << std::setprecision(17);
  for (const auto& p : table.points) {
    out << ToString(p.axis) << ',' << p.value << ',' << p.algorithm << ',' << p.metric << ',';
    if (p.valid) {
      out << p.mean << ',' << p.stderr_;
    } else {
      out << "nan,nan";
    }
    out << ',' << p.runs << '\n';
  }
}

}  // namespace tsdr
