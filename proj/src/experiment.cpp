#include "tsdr/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace tsdr {

using nlohmann::json;

#ifndef TSDR_VERSION
#define TSDR_VERSION "0.0.0"
#endif

const char* Version() { return TSDR_VERSION; }

PipelineError::PipelineError(std::string stage, const Error& cause)
    : Error(cause.code(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}

namespace {

template <typename F>
auto Stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(name, e);
  } catch (const json::exception& e) {
    throw PipelineError(name, Error(ErrorCode::kSchema, e.what()));
  }
}

std::string Format(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Toggle ParseToggle(const std::string& text) {
  if (text == "auto") return Toggle::kAuto;
  if (text == "on") return Toggle::kOn;
  if (text == "off") return Toggle::kOff;
  throw Error(ErrorCode::kSchema, "expected auto, on or off, got '" + text + "'");
}

const char* ToString(Toggle t) {
  switch (t) {
    case Toggle::kAuto: return "auto";
    case Toggle::kOn: return "on";
    case Toggle::kOff: return "off";
  }
  return "auto";
}

Algorithm ParseAlgorithm(const std::string& text) {
  if (text == "ols") return Algorithm::kOls;
  if (text == "2sdr") return Algorithm::k2sdr;
  throw Error(ErrorCode::kSchema, "unknown algorithm '" + text + "' (ols, 2sdr)");
}

SecondStageSpec ParseSecondStage(const json& j) {
  const json obj = j.is_string() ? json{{"kind", j}} : j;
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "ols") return OlsStage{};
  if (kind == "ridge") {
    RidgeStage r;
    if (obj.contains("alpha_grid")) r.alpha_grid = obj.at("alpha_grid").get<std::vector<double>>();
    r.folds = obj.value("folds", r.folds);
    return r;
  }
  if (kind == "logistic") {
    LogisticStage l;
    l.options.max_iter = obj.value("max_iter", l.options.max_iter);
    l.options.tol = obj.value("tol", l.options.tol);
    return l;
  }
  throw Error(ErrorCode::kSchema, "unknown second stage '" + kind + "' (ols, ridge, logistic)");
}

json SecondStageToJson(const SecondStageSpec& s) {
  if (std::holds_alternative<OlsStage>(s)) return {{"kind", "ols"}};
  if (const auto* r = std::get_if<RidgeStage>(&s))
    return {{"kind", "ridge"}, {"alpha_grid", r->alpha_grid}, {"folds", r->folds}};
  const auto& l = std::get<LogisticStage>(s);
  return {{"kind", "logistic"}, {"max_iter", l.options.max_iter}, {"tol", l.options.tol}};
}

std::optional<double> OptDouble(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

void PutOpt(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

double Mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double v : xs) s += v;
  return s / static_cast<double>(xs.size());
}

double StdErr(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = Mean(xs);
  double ss = 0.0;
  for (double v : xs) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

void WriteFileAtomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error(ErrorCode::kIo, "write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

SynthConfig SynthConfigFromJson(const json& o) {
  static const char* kKeys[] = {"d_x",    "d_z",       "d_s",    "sigma_eps", "eta_var", "z_var", "s_var",
                                "eta_s_cov", "beta_x", "beta_z", "beta_s",    "n",       "train_fraction"};
  for (const auto& [key, value] : o.items()) {
    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known) throw Error(ErrorCode::kSchema, "unknown synth parameter '" + key + "'");
  }
  SynthConfig c = SynthConfig::Uniform(o.value("d_x", std::size_t{5}), o.value("d_z", std::size_t{5}),
                                       o.value("d_s", std::size_t{1}), o.value("sigma_eps", 3.0),
                                       o.value("eta_var", 1.0), o.value("z_var", 1.0), o.value("s_var", 1.0),
                                       o.value("eta_s_cov", 0.3), o.value("beta_x", 0.5), o.value("beta_z", 0.5),
                                       o.value("beta_s", 0.2));
  c.n = o.value("n", c.n);
  c.train_fraction = o.value("train_fraction", c.train_fraction);
  return c;
}

ExperimentSpec ExperimentSpecFromJson(const json& j, const std::filesystem::path& base_dir) {
  ExperimentSpec s;
  s.base_dir = base_dir;
  s.name = j.value("name", std::string{});
  const json& d = j.at("dataset");
  if (d.contains("synth")) {
    s.dataset.synth = d.at("synth");
  } else {
    s.dataset.path = d.at("path").get<std::string>();
    s.dataset.schema = d.at("schema").get<std::string>();
  }
  s.algorithm = ParseAlgorithm(j.value("algorithm", std::string{"2sdr"}));
  if (j.contains("second_stage")) s.second_stage = ParseSecondStage(j.at("second_stage"));

  if (j.contains("split")) {
    const json& p = j.at("split");
    const std::string kind = p.value("kind", std::string{"holdout"});
    if (kind == "holdout") {
      s.split.kind = SplitPlan::Kind::kHoldout;
    } else if (kind == "kfold") {
      s.split.kind = SplitPlan::Kind::kKFold;
    } else {
      throw Error(ErrorCode::kSchema, "unknown split kind '" + kind + "' (holdout, kfold)");
    }
    s.split.train_fraction = p.value("train_fraction", s.split.train_fraction);
    s.split.folds = p.value("folds", s.split.folds);
    s.split.stratify_on_target = p.value("stratify", false);
    s.split.repeats = p.value("repeats", s.split.repeats);
  }

  if (j.contains("preprocessing")) {
    const json& p = j.at("preprocessing");
    s.preprocessing.quantile_transform = p.value("quantile_transform", false);
    s.preprocessing.resample_balance = p.value("resample_balance", false);
    s.preprocessing.drop_correlated = OptDouble(p, "drop_correlated");
    s.preprocessing.continuous_only = p.value("continuous_only", false);
    s.preprocessing.variance_correction = ParseToggle(p.value("variance_correction", std::string{"auto"}));
    s.preprocessing.zero_variance_filter = ParseToggle(p.value("zero_variance_filter", std::string{"auto"}));
    s.preprocessing.first_stage_intercept = p.value("first_stage_intercept", true);
  }

  s.seed = j.value("seed", std::uint64_t{0});
  s.split.seed = s.seed;
  s.tie_mode = ParseTieMode(j.value("tie_mode", std::string{"strict"}));
  s.output = j.value("output", std::string{});

  if (j.contains("sweep")) {
    const json& w = j.at("sweep");
    SweepRequest r;
    r.axis = ParseSweepAxis(w.at("axis").get<std::string>());
    r.values = w.at("values").get<std::vector<double>>();
    r.runs = w.value("runs", r.runs);
    s.sweep = r;
    if (!s.dataset.synth) throw Error(ErrorCode::kSchema, "a sweep needs a synth dataset");
  }

  if (j.contains("expect")) {
    for (const json& e : j.at("expect")) {
      Expectation x;
      x.metric = e.at("metric").get<std::string>();
      x.published = OptDouble(e, "published");
      x.min = OptDouble(e, "min");
      x.max = OptDouble(e, "max");
      x.target = OptDouble(e, "target");
      x.tol = OptDouble(e, "tol");
      x.from = OptDouble(e, "from");
      const int kinds = (x.min ? 1 : 0) + (x.max ? 1 : 0) + (x.target ? 1 : 0);
      if (kinds != 1 || x.target.has_value() != x.tol.has_value())
        throw Error(ErrorCode::kSchema, "expectation '" + x.metric + "' needs exactly one of min, max, target+tol");
      s.expect.push_back(std::move(x));
    }
  }
  s.split.Validate();
  return s;
}

json ToJson(const ExperimentSpec& s) {
  json j;
  j["name"] = s.name;
  if (s.dataset.synth) {
    j["dataset"] = {{"synth", *s.dataset.synth}};
  } else {
    j["dataset"] = {{"path", s.dataset.path.generic_string()}, {"schema", s.dataset.schema.generic_string()}};
  }
  j["algorithm"] = s.algorithm == Algorithm::kOls ? "ols" : "2sdr";
  j["second_stage"] = SecondStageToJson(s.second_stage);
  j["split"] = {{"kind", s.split.kind == SplitPlan::Kind::kHoldout ? "holdout" : "kfold"},
                {"train_fraction", s.split.train_fraction},
                {"folds", s.split.folds},
                {"stratify", s.split.stratify_on_target},
                {"repeats", s.split.repeats}};
  json p = {{"quantile_transform", s.preprocessing.quantile_transform},
            {"resample_balance", s.preprocessing.resample_balance},
            {"continuous_only", s.preprocessing.continuous_only},
            {"variance_correction", ToString(s.preprocessing.variance_correction)},
            {"zero_variance_filter", ToString(s.preprocessing.zero_variance_filter)},
            {"first_stage_intercept", s.preprocessing.first_stage_intercept}};
  PutOpt(p, "drop_correlated", s.preprocessing.drop_correlated);
  j["preprocessing"] = p;
  j["seed"] = s.seed;
  j["tie_mode"] = ToString(s.tie_mode);
  j["output"] = s.output.generic_string();
  if (s.sweep) {
    j["sweep"] = {{"axis", ToString(s.sweep->axis)}, {"values", s.sweep->values}, {"runs", s.sweep->runs}};
  }
  if (!s.expect.empty()) {
    json list = json::array();
    for (const auto& e : s.expect) {
      json x = {{"metric", e.metric}};
      PutOpt(x, "published", e.published);
      PutOpt(x, "min", e.min);
      PutOpt(x, "max", e.max);
      PutOpt(x, "target", e.target);
      PutOpt(x, "tol", e.tol);
      PutOpt(x, "from", e.from);
      list.push_back(std::move(x));
    }
    j["expect"] = std::move(list);
  }
  return j;
}

std::vector<ExperimentSpec> LoadExperimentFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open experiment file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  std::vector<ExperimentSpec> out;
  try {
    if (!j.contains("experiments")) {
      out.push_back(ExperimentSpecFromJson(j, base));
      return out;
    }
    const json defaults = j.value("defaults", json::object());
    for (const json& entry : j.at("experiments")) {
      json merged = defaults;
      merged.merge_patch(entry);
      out.push_back(ExperimentSpecFromJson(merged, base));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  return out;
}

void ApplyOverrides(ExperimentSpec& spec, const Overrides& o) {
  if (o.seed) {
    spec.seed = *o.seed;
    spec.split.seed = *o.seed;
  }
  if (o.output) spec.output = *o.output;
  if (o.tie_mode) spec.tie_mode = *o.tie_mode;
  if (o.first_stage_intercept) spec.preprocessing.first_stage_intercept = *o.first_stage_intercept;
  if (o.variance_correction) spec.preprocessing.variance_correction = *o.variance_correction;
  if (o.quantile_transform) spec.preprocessing.quantile_transform = true;
  if (o.drop_correlated) spec.preprocessing.drop_correlated = o.drop_correlated;
  if (o.resample_balance) spec.preprocessing.resample_balance = true;
}

bool Integrity::ok() const {
  return (!expected_rows || *expected_rows == rows) && (!expected_attributes || *expected_attributes == attributes);
}

std::optional<double> ExperimentResult::Metric(const std::string& name) const {
  for (const auto& m : aggregate)
    if (m.metric == name) return m.mean;
  return std::nullopt;
}

std::vector<std::pair<std::string, double>> FlattenReport(const FairnessReport& r) {
  std::vector<std::pair<std::string, double>> out;
  if (r.accuracy) out.emplace_back("accuracy", *r.accuracy);
  if (r.rmse) out.emplace_back("rmse", *r.rmse);
  for (const auto& m : r.sensitive) {
    if (m.p_percent) out.emplace_back(m.name + ".p_percent", *m.p_percent);
    if (m.mean_distance) out.emplace_back(m.name + ".mean_distance", *m.mean_distance);
    if (m.auc_vs_sensitive) out.emplace_back(m.name + ".auc", *m.auc_vs_sensitive);
    if (m.corr_coefficient) {
      out.emplace_back(m.name + ".cc", *m.corr_coefficient);
      out.emplace_back(m.name + ".abs_cc", std::abs(*m.corr_coefficient));
    }
  }
  return out;
}

std::filesystem::path ResolveDataPath(const ExperimentSpec& spec, const RunContext& context) {
  const auto& p = spec.dataset.path;
  if (p.is_absolute()) return p;
  if (context.data_dir) return *context.data_dir / p;
  return p;
}

Dataset LoadExperimentDataset(const ExperimentSpec& spec, const RunContext& context,
                              std::optional<Integrity>* integrity) {
  if (spec.dataset.synth) {
    const SynthConfig cfg = SynthConfigFromJson(*spec.dataset.synth);
    Rng rng(DeriveSeed(spec.seed, 0x5EED));
    return Generate(cfg, rng);
  }
  const auto schema_path = spec.dataset.schema.is_absolute() ? spec.dataset.schema : spec.base_dir / spec.dataset.schema;
  const Schema schema = LoadSchema(schema_path);
  const auto data_path = ResolveDataPath(spec, context);
  if (!std::filesystem::exists(data_path)) {
    throw Error(ErrorCode::kIo, "dataset file '" + data_path.string() + "' not found (set --data-dir or TSDR_DATA_DIR)\n" +
                    FetchInstructions(schema));
  }
  Dataset ds = LoadCsv(data_path, schema);
  if (integrity) {
    Integrity ig;
    ig.rows = ds.rows();
    ig.attributes = ds.x.cols();
    ig.expected_rows = schema.expected_rows;
    ig.expected_attributes = schema.expected_attributes;
    *integrity = ig;
  }
  return ds;
}

namespace {

FairnessReport RunSplit(const ExperimentSpec& spec, const Dataset& ds, const SplitIndices& split,
                        std::size_t index) {
  Rng rng(DeriveSeed(spec.seed, index, 1));
  Dataset train = ds.SelectRows(split.train);
  Dataset test = ds.SelectRows(split.test);
  if (spec.preprocessing.quantile_transform) {
    Stage("quantile-transform", [&] {
      const RankMaps maps = QuantileTransformFit(train);
      train = QuantileTransformApply(maps, train);
      test = QuantileTransformApply(maps, test);
    });
  }
  if (spec.preprocessing.resample_balance) {
    Stage("resample", [&] { train = ResampleBalance(train, rng); });
  }
  const TwoStagePredictor predictor = Stage("fit", [&] {
    if (spec.algorithm == Algorithm::kOls) return FitBaseline(train, spec.second_stage, rng);
    FirstStageOptions options;
    options.intercept = spec.preprocessing.first_stage_intercept;
    options.variance_correction = spec.preprocessing.variance_correction;
    options.zero_variance_filter = spec.preprocessing.zero_variance_filter;
    return Fit2sdr(train, spec.second_stage, options, rng);
  });
  const Predictions preds = Stage("predict", [&] { return Predict2sdr(predictor, test); });
  return Stage("report", [&] { return Report(preds, test, spec.tie_mode); });
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentSpec& spec, const RunContext& context) {
  ExperimentResult result;
  result.spec = spec;

  if (spec.sweep) {
    result.sweep = Stage("sweep", [&] {
      const SynthConfig cfg = SynthConfigFromJson(*spec.dataset.synth);
      SweepOptions options;
      options.runs = spec.sweep->runs;
      options.seed = spec.seed;
      return Sweep(cfg, spec.sweep->axis, spec.sweep->values, options);
    });
    return result;
  }

  Dataset ds = Stage("ingest", [&] { return LoadExperimentDataset(spec, context, &result.integrity); });
  ds = Stage("preprocess", [&] {
    Dataset out = std::move(ds);
    if (spec.preprocessing.continuous_only) out = ContinuousOnly(out);
    if (spec.preprocessing.drop_correlated) out = DropCorrelatedWithTarget(out, *spec.preprocessing.drop_correlated);
    return out;
  });
  const auto splits = Stage("split", [&] {
    SplitPlan plan = spec.split;
    plan.seed = spec.seed;
    const auto labels = ds.targets();
    return MakeSplits(ds.rows(), plan, plan.stratify_on_target ? std::span<const double>(labels)
                                                               : std::span<const double>());
  });

  result.splits.resize(splits.size());
  std::vector<std::exception_ptr> failures(splits.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(splits.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      result.splits[k] = RunSplit(spec, ds, splits[k], k);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> values;
  for (const auto& report : result.splits) {
    for (const auto& [name, v] : FlattenReport(report)) {
      if (!values.count(name)) order.push_back(name);
      values[name].push_back(v);
    }
  }
  for (const auto& name : order) {
    const auto& xs = values[name];
    result.aggregate.push_back({name, Mean(xs), StdErr(xs), xs.size()});
  }
  return result;
}

json ToJson(const ExperimentResult& r) {
  json j;
  j["version"] = Version();
  j["spec"] = ToJson(r.spec);
  if (r.integrity) {
    json ig = {{"rows", r.integrity->rows}, {"attributes", r.integrity->attributes}, {"ok", r.integrity->ok()}};
    if (r.integrity->expected_rows) ig["expected_rows"] = *r.integrity->expected_rows;
    if (r.integrity->expected_attributes) ig["expected_attributes"] = *r.integrity->expected_attributes;
    j["integrity"] = ig;
  }
  if (r.sweep) {
    json points = json::array();
    for (const auto& p : r.sweep->points) {
      json x = {{"axis", ToString(p.axis)}, {"value", p.value}, {"algorithm", p.algorithm},
                {"metric", p.metric},       {"valid", p.valid}, {"runs", p.runs}};
      if (p.valid) {
        x["mean"] = p.mean;
        x["stderr"] = p.stderr_;
      }
      points.push_back(std::move(x));
    }
    j["sweep"] = std::move(points);
    return j;
  }
  json splits = json::array();
  for (std::size_t i = 0; i < r.splits.size(); ++i) splits.push_back({{"index", i}, {"report", ToJson(r.splits[i])}});
  j["splits"] = std::move(splits);
  json agg = json::array();
  for (const auto& m : r.aggregate)
    agg.push_back({{"metric", m.metric}, {"mean", m.mean}, {"stderr", m.stderr_}, {"count", m.count}});
  j["aggregate"] = std::move(agg);
  return j;
}

void WriteResult(const ExperimentResult& result, const std::filesystem::path& directory) {
  const std::string report = ToJson(result).dump(2) + "\n";
  std::ostringstream csv;
  std::string csv_name;
  if (result.sweep) {
    csv_name = "sweep.csv";
    WriteSweepCsv(*result.sweep, csv);
  } else {
    csv_name = "aggregate.csv";
    csv << "metric,mean,stderr,count\n";
    for (const auto& m : result.aggregate)
      csv << m.metric << ',' << Format(m.mean) << ',' << Format(m.stderr_) << ',' << m.count << '\n';
  }
  std::filesystem::create_directories(directory);
  WriteFileAtomically(directory / "report.json", report);
  WriteFileAtomically(directory / csv_name, csv.str());
}

namespace {

std::string Criterion(const Expectation& e) {
  std::string text;
  if (e.min) text = ">= " + Format(*e.min);
  if (e.max) text = "<= " + Format(*e.max);
  if (e.target) text = Format(*e.target) + " +/- " + Format(*e.tol);
  if (e.from) text += " for value >= " + Format(*e.from);
  return text;
}

bool Satisfies(const Expectation& e, double v) {
  if (std::isnan(v)) return false;
  if (e.min) return v >= *e.min;
  if (e.max) return v <= *e.max;
  return std::abs(v - *e.target) <= *e.tol;
}

// Sweep metrics: "<algorithm>.<metric>" and "rmse_gap" are checked at every
// valid point (value >= from); "rmse_gap.nondecreasing" is 1 when the gap
// never decreases along the axis.
std::vector<CheckOutcome> EvaluateSweep(const ExperimentResult& r, const Expectation& e) {
  const SweepTable& t = *r.sweep;
  std::vector<CheckOutcome> out;
  auto outcome = [&](const std::string& metric, std::optional<double> v) {
    CheckOutcome c;
    c.experiment = r.spec.name;
    c.metric = metric;
    c.published = e.published;
    c.measured = v;
    c.criterion = Criterion(e);
    c.pass = v && Satisfies(e, *v);
    return c;
  };
  if (e.metric == "rmse_gap.nondecreasing") {
    double prev = -INFINITY;
    bool monotone = true;
    for (double value : t.values) {
      if (e.from && value < *e.from) continue;
      const auto& a = t.Find(value, "2sdr", "rmse");
      const auto& b = t.Find(value, "ols", "rmse");
      if (!a.valid) continue;
      const double gap = a.mean - b.mean;
      monotone = monotone && gap >= prev;
      prev = gap;
    }
    out.push_back(outcome(e.metric, monotone ? 1.0 : 0.0));
    return out;
  }
  for (double value : t.values) {
    if (e.from && value < *e.from) continue;
    const std::string label = e.metric + "@" + ToString(t.axis) + "=" + Format(value);
    std::optional<double> v;
    if (e.metric == "rmse_gap") {
      const auto& a = t.Find(value, "2sdr", "rmse");
      if (a.valid) v = a.mean - t.Find(value, "ols", "rmse").mean;
    } else {
      const auto dot = e.metric.find('.');
      if (dot == std::string::npos) throw Error(ErrorCode::kSchema, "sweep metric must be <algorithm>.<metric>");
      const auto& p = t.Find(value, e.metric.substr(0, dot), e.metric.substr(dot + 1));
      if (p.valid) v = p.mean;
    }
    if (!v) continue;
    out.push_back(outcome(label, v));
  }
  return out;
}

}  // namespace

std::vector<CheckOutcome> Evaluate(const ExperimentResult& r) {
  std::vector<CheckOutcome> out;
  for (const auto& e : r.spec.expect) {
    if (r.sweep) {
      auto part = EvaluateSweep(r, e);
      out.insert(out.end(), part.begin(), part.end());
      continue;
    }
    CheckOutcome c;
    c.experiment = r.spec.name;
    c.metric = e.metric;
    c.published = e.published;
    c.measured = r.Metric(e.metric);
    c.criterion = Criterion(e);
    c.pass = c.measured && Satisfies(e, *c.measured);
    out.push_back(std::move(c));
  }
  return out;
}

void WriteComparisonCsv(const std::vector<CheckOutcome>& outcomes, std::ostream& out) {
  out << "experiment,metric,published,measured,criterion,result\n";
  for (const auto& c : outcomes) {
    out << c.experiment << ',' << c.metric << ',' << (c.published ? Format(*c.published) : "") << ','
        << (c.measured ? Format(*c.measured) : "missing") << ",\"" << c.criterion << "\","
        << (c.pass ? "PASS" : "FAIL") << '\n';
  }
}

std::string FetchInstructions(const Schema& schema) {
  std::ostringstream out;
  out << "dataset: " << schema.name << '\n';
  out << "source: " << (schema.source.empty() ? "(not recorded)" : schema.source) << '\n';
  if (!schema.preparation.empty()) out << "preparation: " << schema.preparation << '\n';
  if (schema.expected_rows) out << "expected rows: " << *schema.expected_rows << '\n';
  if (schema.expected_attributes) out << "expected non-sensitive attributes: " << *schema.expected_attributes << '\n';
  return out.str();
}

}  // namespace tsdr
