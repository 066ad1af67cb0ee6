#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsdr/datamodel.hpp"
#include "tsdr/error.hpp"
#include "tsdr/metrics.hpp"
#include "tsdr/synth.hpp"
#include "tsdr/twostage.hpp"

namespace tsdr {

const char* Version();

// An Error raised inside a pipeline stage; what() is "[stage] message".
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const Error& cause);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class Algorithm { kOls, k2sdr };

struct DatasetRef {
  std::filesystem::path path;    // relative paths resolve against the data directory, else the cwd
  std::filesystem::path schema;  // relative paths resolve against the experiment file
  std::optional<nlohmann::json> synth;  // SynthConfig overrides; replaces path/schema
};

struct Preprocessing {
  bool quantile_transform = false;
  bool resample_balance = false;
  std::optional<double> drop_correlated;
  bool continuous_only = false;
  Toggle variance_correction = Toggle::kAuto;
  Toggle zero_variance_filter = Toggle::kAuto;
  bool first_stage_intercept = true;
};

// One check against a published number. Exactly one of min, max, target+tol.
struct Expectation {
  std::string metric;
  std::optional<double> published;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> target;
  std::optional<double> tol;
  std::optional<double> from;  // sweeps: only points with value >= from
};

struct SweepRequest {
  SweepAxis axis = SweepAxis::kN;
  std::vector<double> values;
  std::size_t runs = 100;
};

struct ExperimentSpec {
  std::string name;
  DatasetRef dataset;
  Algorithm algorithm = Algorithm::k2sdr;
  SecondStageSpec second_stage = OlsStage{};
  SplitPlan split;
  Preprocessing preprocessing;
  std::uint64_t seed = 0;
  TieMode tie_mode = TieMode::kStrict;
  std::filesystem::path output;
  std::optional<SweepRequest> sweep;
  std::vector<Expectation> expect;

  std::filesystem::path base_dir;  // directory of the experiment file; not serialized
};

ExperimentSpec ExperimentSpecFromJson(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json ToJson(const ExperimentSpec& spec);

// A spec file holds one spec object or {"experiments": [...]}; entries may
// share defaults through a top-level "defaults" object.
std::vector<ExperimentSpec> LoadExperimentFile(const std::filesystem::path& path);

SynthConfig SynthConfigFromJson(const nlohmann::json& overrides);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
  std::optional<TieMode> tie_mode;
  std::optional<bool> first_stage_intercept;
  std::optional<Toggle> variance_correction;
  bool quantile_transform = false;
  std::optional<double> drop_correlated;
  bool resample_balance = false;
};

void ApplyOverrides(ExperimentSpec& spec, const Overrides& overrides);

struct RunContext {
  std::optional<std::filesystem::path> data_dir;
};

struct AggregateMetric {
  std::string metric;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

struct Integrity {
  std::size_t rows = 0;
  std::size_t attributes = 0;
  std::optional<std::size_t> expected_rows;
  std::optional<std::size_t> expected_attributes;
  bool ok() const;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::optional<Integrity> integrity;
  std::vector<FairnessReport> splits;
  std::vector<AggregateMetric> aggregate;
  std::optional<SweepTable> sweep;

  std::optional<double> Metric(const std::string& name) const;
};

// Flattened metric names: accuracy, rmse, and per sensitive column
// <name>.p_percent, <name>.mean_distance, <name>.auc, <name>.cc, <name>.abs_cc.
std::vector<std::pair<std::string, double>> FlattenReport(const FairnessReport& report);

std::filesystem::path ResolveDataPath(const ExperimentSpec& spec, const RunContext& context);

Dataset LoadExperimentDataset(const ExperimentSpec& spec, const RunContext& context,
                              std::optional<Integrity>* integrity = nullptr);

ExperimentResult RunExperiment(const ExperimentSpec& spec, const RunContext& context = {});

nlohmann::json ToJson(const ExperimentResult& result);

// report.json plus aggregate.csv (or sweep.csv), written only after all
// content is rendered.
void WriteResult(const ExperimentResult& result, const std::filesystem::path& directory);

struct CheckOutcome {
  std::string experiment;
  std::string metric;
  std::optional<double> published;
  std::optional<double> measured;
  std::string criterion;
  bool pass = false;
};

std::vector<CheckOutcome> Evaluate(const ExperimentResult& result);

void WriteComparisonCsv(const std::vector<CheckOutcome>& outcomes, std::ostream& out);

std::string FetchInstructions(const Schema& schema);

}  // namespace tsdr
