#include "tsdr/twostage.hpp"

#include <algorithm>
#include <cmath>

#include "tsdr/error.hpp"

namespace tsdr {

namespace {

constexpr double kZeroVariance = 1e-12;

struct GroupStats {
  double mean0 = 0.0, mean1 = 0.0, var0 = 0.0, var1 = 0.0;
  std::size_t n0 = 0, n1 = 0;
};

GroupStats StatsByGroup(const Matrix& s, std::size_t group_col, const Matrix& x, std::size_t col) {
  GroupStats g;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (s(r, group_col) == 1.0) {
      g.mean1 += x(r, col);
      ++g.n1;
    } else {
      g.mean0 += x(r, col);
      ++g.n0;
    }
  }
  if (g.n0 == 0 || g.n1 == 0)
    throw Error(ErrorCode::kDegenerateGroup, "sensitive column " + std::to_string(group_col) +
                                                 " has an empty group in training data");
  g.mean0 /= static_cast<double>(g.n0);
  g.mean1 /= static_cast<double>(g.n1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double v = x(r, col);
    if (s(r, group_col) == 1.0) {
      g.var1 += (v - g.mean1) * (v - g.mean1);
    } else {
      g.var0 += (v - g.mean0) * (v - g.mean0);
    }
  }
  g.var0 /= static_cast<double>(g.n0);
  g.var1 /= static_cast<double>(g.n1);
  return g;
}

Matrix WithIntercept(const Matrix& s) { return HorizontalConcat(s, Matrix(s.rows(), 1, 1.0)); }

std::vector<std::size_t> MaskIndices(const std::vector<bool>& mask) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < mask.size(); ++c)
    if (mask[c]) out.push_back(c);
  return out;
}

bool Enabled(Toggle t, bool any_binary) { return t == Toggle::kOn || (t == Toggle::kAuto && any_binary); }

void RequireBinaryValues(const Matrix& s, std::size_t col) {
  for (std::size_t r = 0; r < s.rows(); ++r)
    if (s(r, col) != 0.0 && s(r, col) != 1.0)
      throw Error(ErrorCode::kInvalidArgument, "sensitive column " + std::to_string(col) +
                                                   " is marked binary but holds " + std::to_string(s(r, col)));
}

}  // namespace

const char* ToString(SensitiveKind kind) {
  switch (kind) {
    case SensitiveKind::kBinary: return "binary";
    case SensitiveKind::kNumeric: return "numeric";
    case SensitiveKind::kMixed: return "mixed";
  }
  return "numeric";
}

FirstStageModel FirstStageModel::Passthrough(std::size_t sensitive_count, std::size_t attribute_count) {
  FirstStageModel m;
  m.coefficients = Matrix(sensitive_count + 1, attribute_count);
  m.intercept = true;
  m.retained_mask.assign(attribute_count, true);
  m.sensitive_count = sensitive_count;
  return m;
}

std::vector<bool> FilterZeroVariance(const Matrix& s, const std::vector<bool>& s_binary, const Matrix& x) {
  if (s.rows() != x.rows()) throw Error(ErrorCode::kDimensionMismatch, "filter_zero_variance: row counts");
  if (s_binary.size() != s.cols())
    throw Error(ErrorCode::kDimensionMismatch, "filter_zero_variance: s_binary length");
  std::vector<bool> mask(x.cols(), true);
  bool any_binary = false;
  for (std::size_t sc = 0; sc < s.cols(); ++sc) {
    if (!s_binary[sc]) continue;
    any_binary = true;
    RequireBinaryValues(s, sc);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const GroupStats g = StatsByGroup(s, sc, x, c);
      if (g.var0 < kZeroVariance || g.var1 < kZeroVariance) mask[c] = false;
    }
  }
  if (!any_binary)
    throw Error(ErrorCode::kInvalidArgument, "filter_zero_variance: no binary sensitive column");
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }))
    throw Error(ErrorCode::kEmptyResult, "filter_zero_variance: every attribute was removed");
  return mask;
}

FirstStageModel FitFirstStage(const Matrix& s, const std::vector<bool>& s_binary, const Matrix& x,
                              const FirstStageOptions& options) {
  const std::size_t n = s.rows();
  if (x.rows() != n) throw Error(ErrorCode::kDimensionMismatch, "fit_first_stage: S and X row counts differ");
  if (s.cols() == 0) throw Error(ErrorCode::kInvalidArgument, "fit_first_stage: no sensitive columns");
  if (x.cols() == 0) throw Error(ErrorCode::kInvalidArgument, "fit_first_stage: no attributes");
  if (s_binary.size() != s.cols())
    throw Error(ErrorCode::kDimensionMismatch, "fit_first_stage: s_binary length");
  if (n <= s.cols() + 1)
    throw Error(ErrorCode::kInvalidArgument, "fit_first_stage: need more rows than sensitive columns + 1");

  FirstStageModel model;
  model.intercept = options.intercept;
  model.sensitive_count = s.cols();
  const auto binary_count = static_cast<std::size_t>(std::count(s_binary.begin(), s_binary.end(), true));
  const bool any_binary = binary_count > 0;
  model.sensitive_kind = binary_count == s.cols() ? SensitiveKind::kBinary
                         : any_binary             ? SensitiveKind::kMixed
                                                  : SensitiveKind::kNumeric;

  model.retained_mask.assign(x.cols(), true);
  if (any_binary && Enabled(options.zero_variance_filter, any_binary))
    model.retained_mask = FilterZeroVariance(s, s_binary, x);
  const Matrix retained = x.SelectColumns(MaskIndices(model.retained_mask));

  const Matrix design = options.intercept ? WithIntercept(s) : s;
  model.coefficients = SolveLeastSquares(design, retained);

  if (any_binary && Enabled(options.variance_correction, any_binary)) {
    const std::size_t group_col =
        static_cast<std::size_t>(std::find(s_binary.begin(), s_binary.end(), true) - s_binary.begin());
    RequireBinaryValues(s, group_col);
    const Matrix resid = retained - design * model.coefficients;
    Matrix factors(2, resid.cols());
    for (std::size_t c = 0; c < resid.cols(); ++c) {
      const GroupStats g = StatsByGroup(s, group_col, resid, c);
      const auto col = resid.column(c);
      double mean = 0.0;
      for (double v : col) mean += v;
      mean /= static_cast<double>(n);
      double pooled = 0.0;
      for (double v : col) pooled += (v - mean) * (v - mean);
      pooled = std::sqrt(pooled / static_cast<double>(n));
      if (g.var0 < kZeroVariance || g.var1 < kZeroVariance)
        throw Error(ErrorCode::kDegenerateGroup, "fit_first_stage: residual of attribute " + std::to_string(c) +
                                                     " has zero variance within a group");
      factors(0, c) = pooled / std::sqrt(g.var0);
      factors(1, c) = pooled / std::sqrt(g.var1);
    }
    model.variance_factors = std::move(factors);
    model.group_column = group_col;
  }
  return model;
}

Matrix Residualize(const FirstStageModel& model, const Matrix& s, const Matrix& x) {
  if (s.cols() != model.sensitive_count)
    throw Error(ErrorCode::kDimensionMismatch, "residualize: expected " + std::to_string(model.sensitive_count) +
                                                   " sensitive columns, got " + std::to_string(s.cols()));
  if (x.cols() != model.retained_mask.size())
    throw Error(ErrorCode::kDimensionMismatch, "residualize: expected " +
                                                   std::to_string(model.retained_mask.size()) +
                                                   " attributes, got " + std::to_string(x.cols()));
  if (s.rows() != x.rows()) throw Error(ErrorCode::kDimensionMismatch, "residualize: row counts differ");
  const Matrix design = model.intercept ? WithIntercept(s) : s;
  Matrix u = x.SelectColumns(MaskIndices(model.retained_mask)) - design * model.coefficients;
  if (model.variance_factors) {
    const std::size_t g = *model.group_column;
    RequireBinaryValues(s, g);
    for (std::size_t r = 0; r < u.rows(); ++r) {
      const auto factors = model.variance_factors->row(s(r, g) == 1.0 ? 1 : 0);
      auto row = u.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) row[c] *= factors[c];
    }
  }
  return u;
}

Matrix SecondStageFeatures(const TwoStagePredictor& predictor, const Dataset& ds) {
  return HorizontalConcat(Residualize(predictor.first_stage, ds.s, ds.x), ds.z);
}

namespace {

TwoStagePredictor TrainSecondStage(FirstStageModel first, const Dataset& train, const SecondStageSpec& spec,
                                   Rng& rng) {
  TwoStagePredictor p;
  p.first_stage = std::move(first);
  p.task = train.task;
  p.uses_explanatory = std::any_of(train.z_names.begin(), train.z_names.end(),
                                   [](const std::string& n) { return n != kInterceptName; });
  const Matrix features = SecondStageFeatures(p, train);
  const auto labels = train.targets();

  if (std::holds_alternative<OlsStage>(spec)) {
    if (train.task != Task::kRegression)
      throw Error(ErrorCode::kInvalidArgument, "OLS second stage requires a regression task");
    p.second_stage = FitOls(features, train.y);
  } else if (const auto* ridge = std::get_if<RidgeStage>(&spec)) {
    if (train.task != Task::kClassification)
      throw Error(ErrorCode::kInvalidArgument, "ridge classifier requires a classification task");
    p.second_stage = FitRidgeClassifier(features, labels, ridge->alpha_grid, ridge->folds, rng);
  } else {
    if (train.task != Task::kClassification)
      throw Error(ErrorCode::kInvalidArgument, "logistic second stage requires a classification task");
    p.second_stage = FitLogistic(features, labels, std::get<LogisticStage>(spec).options);
  }

  for (std::size_t c = 0; c < train.x.cols(); ++c)
    if (p.first_stage.retained_mask[c]) p.second_stage.feature_names.push_back(train.x_names[c]);
  for (const auto& name : train.z_names) p.second_stage.feature_names.push_back(name);
  return p;
}

}  // namespace

TwoStagePredictor Fit2sdr(const Dataset& train, const SecondStageSpec& spec, const FirstStageOptions& options,
                          Rng& rng) {
  train.Validate();
  return TrainSecondStage(FitFirstStage(train.s, train.s_binary, train.x, options), train, spec, rng);
}

TwoStagePredictor FitBaseline(const Dataset& train, const SecondStageSpec& spec, Rng& rng) {
  train.Validate();
  return TrainSecondStage(FirstStageModel::Passthrough(train.s.cols(), train.x.cols()), train, spec, rng);
}

Predictions Predict2sdr(const TwoStagePredictor& predictor, const Dataset& test) {
  if (test.task != predictor.task)
    throw Error(ErrorCode::kSchema, "predict_2sdr: test task differs from training task");
  const std::size_t expected_z = predictor.second_stage.weights.size() - predictor.first_stage.retained_count();
  if (test.z.cols() != expected_z)
    throw Error(ErrorCode::kSchema, "predict_2sdr: test has " + std::to_string(test.z.cols()) +
                                        " explanatory columns, model expects " + std::to_string(expected_z));
  return Predict(predictor.second_stage, SecondStageFeatures(predictor, test));
}

namespace {

nlohmann::json MatrixToJson(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix MatrixFromJson(const nlohmann::json& j) {
  return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                j.at("data").get<std::vector<double>>());
}

Link ParseLink(const std::string& text) {
  if (text == "identity") return Link::kIdentity;
  if (text == "sign") return Link::kSign;
  if (text == "sigmoid") return Link::kSigmoid;
  throw Error(ErrorCode::kParse, "unknown link '" + text + "'");
}

SensitiveKind ParseSensitiveKind(const std::string& text) {
  if (text == "binary") return SensitiveKind::kBinary;
  if (text == "numeric") return SensitiveKind::kNumeric;
  if (text == "mixed") return SensitiveKind::kMixed;
  throw Error(ErrorCode::kParse, "unknown sensitive kind '" + text + "'");
}

}  // namespace

nlohmann::json ToJson(const TwoStagePredictor& p) {
  nlohmann::json fs;
  fs["coefficients"] = MatrixToJson(p.first_stage.coefficients);
  fs["intercept"] = p.first_stage.intercept;
  fs["retained_mask"] = p.first_stage.retained_mask;
  fs["sensitive_kind"] = ToString(p.first_stage.sensitive_kind);
  fs["sensitive_count"] = p.first_stage.sensitive_count;
  if (p.first_stage.variance_factors) {
    fs["variance_factors"] = MatrixToJson(*p.first_stage.variance_factors);
    fs["group_column"] = *p.first_stage.group_column;
  }

  const LinearModel& m = p.second_stage;
  nlohmann::json ss;
  ss["weights"] = m.weights;
  ss["feature_names"] = m.feature_names;
  ss["link"] = ToString(m.link);
  if (m.chosen_alpha) ss["chosen_alpha"] = *m.chosen_alpha;
  ss["alpha_grid"] = m.alpha_grid;
  ss["cv_accuracy"] = m.cv_accuracy;
  if (m.training_accuracy) ss["training_accuracy"] = *m.training_accuracy;
  ss["iterations"] = m.iterations;
  ss["separation_suspected"] = m.separation_suspected;

  return {{"format", "tsdr-predictor"}, {"version", 1},          {"task", ToString(p.task)},
          {"uses_explanatory", p.uses_explanatory}, {"first_stage", fs}, {"second_stage", ss}};
}

TwoStagePredictor TwoStagePredictorFromJson(const nlohmann::json& j) {
  try {
    if (j.at("format") != "tsdr-predictor")
      throw Error(ErrorCode::kParse, "not a serialised predictor");
    TwoStagePredictor p;
    p.task = ParseTask(j.at("task").get<std::string>());
    p.uses_explanatory = j.at("uses_explanatory").get<bool>();
    const auto& fs = j.at("first_stage");
    p.first_stage.coefficients = MatrixFromJson(fs.at("coefficients"));
    p.first_stage.intercept = fs.at("intercept").get<bool>();
    p.first_stage.retained_mask = fs.at("retained_mask").get<std::vector<bool>>();
    p.first_stage.sensitive_kind = ParseSensitiveKind(fs.at("sensitive_kind").get<std::string>());
    p.first_stage.sensitive_count = fs.at("sensitive_count").get<std::size_t>();
    if (fs.contains("variance_factors")) {
      p.first_stage.variance_factors = MatrixFromJson(fs.at("variance_factors"));
      p.first_stage.group_column = fs.at("group_column").get<std::size_t>();
    }
    const auto& ss = j.at("second_stage");
    LinearModel& m = p.second_stage;
    m.weights = ss.at("weights").get<std::vector<double>>();
    m.feature_names = ss.at("feature_names").get<std::vector<std::string>>();
    m.link = ParseLink(ss.at("link").get<std::string>());
    if (ss.contains("chosen_alpha")) m.chosen_alpha = ss.at("chosen_alpha").get<double>();
    m.alpha_grid = ss.at("alpha_grid").get<std::vector<double>>();
    m.cv_accuracy = ss.at("cv_accuracy").get<std::vector<double>>();
    if (ss.contains("training_accuracy")) m.training_accuracy = ss.at("training_accuracy").get<double>();
    m.iterations = ss.at("iterations").get<std::size_t>();
    m.separation_suspected = ss.at("separation_suspected").get<bool>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("predictor document: ") + e.what());
  }
}

}  // namespace tsdr
