#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsdr/experiment.hpp"

#ifndef TSDR_DATA_ROOT
#define TSDR_DATA_ROOT "data"
#endif

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string tie_mode;
  std::string first_stage_intercept;
  std::string variance_correction;
  bool quantile_transform = false;
  std::optional<double> drop_correlated;
  bool resample_balance = false;
  std::string data_dir;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Base seed for splits and fitting");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--tie-mode", f.tie_mode, "AUC tie handling")->check(CLI::IsMember({"strict", "half"}));
  cmd->add_option("--first-stage-intercept", f.first_stage_intercept, "Intercept in the first stage")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--variance-correction", f.variance_correction, "Per-group residual rescaling")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_flag("--quantile-transform", f.quantile_transform, "Per-group rank transform of attributes");
  cmd->add_option("--drop-correlated", f.drop_correlated, "Drop attributes with |corr(x, y)| above this");
  cmd->add_flag("--resample-balance", f.resample_balance, "Oversample the minority class in training");
  cmd->add_option("--data-dir", f.data_dir, "Directory holding dataset files (default: $TSDR_DATA_DIR)");
}

tsdr::Overrides ToOverrides(const CommonFlags& f) {
  tsdr::Overrides o;
  o.seed = f.seed;
  if (!f.tie_mode.empty()) o.tie_mode = tsdr::ParseTieMode(f.tie_mode);
  if (!f.first_stage_intercept.empty()) o.first_stage_intercept = f.first_stage_intercept == "on";
  if (!f.variance_correction.empty())
    o.variance_correction = f.variance_correction == "on" ? tsdr::Toggle::kOn : tsdr::Toggle::kOff;
  o.quantile_transform = f.quantile_transform;
  o.drop_correlated = f.drop_correlated;
  o.resample_balance = f.resample_balance;
  return o;
}

tsdr::RunContext Context(const CommonFlags& f) {
  tsdr::RunContext ctx;
  if (!f.data_dir.empty()) {
    ctx.data_dir = f.data_dir;
  } else if (const char* env = std::getenv("TSDR_DATA_DIR"); env && *env) {
    ctx.data_dir = env;
  }
  return ctx;
}

void PrintAggregate(const tsdr::ExperimentResult& r) {
  std::cout << "== " << r.spec.name << '\n';
  if (r.integrity && !r.integrity->ok()) {
    std::cout << "  warning: loaded " << r.integrity->rows << " rows x " << r.integrity->attributes
              << " attributes, schema expects " << r.integrity->expected_rows.value_or(0) << " x "
              << r.integrity->expected_attributes.value_or(0) << '\n';
  }
  if (r.sweep) {
    std::cout << "  sweep over " << tsdr::ToString(r.sweep->axis) << ", " << r.sweep->values.size() << " values x "
              << r.sweep->runs << " runs\n";
    return;
  }
  for (const auto& m : r.aggregate)
    std::cout << "  " << m.metric << " = " << m.mean << " (se " << m.stderr_ << ", " << m.count << " splits)\n";
}

// Runs every spec, writing <out>/<name>/; returns the expectation outcomes.
std::vector<tsdr::CheckOutcome> RunAll(std::vector<tsdr::ExperimentSpec> specs, const CommonFlags& flags,
                                       const std::filesystem::path& default_out) {
  const auto overrides = ToOverrides(flags);
  const auto ctx = Context(flags);
  std::vector<tsdr::CheckOutcome> outcomes;
  for (auto& spec : specs) {
    tsdr::ApplyOverrides(spec, overrides);
    std::filesystem::path dir;
    if (!flags.out.empty()) {
      dir = std::filesystem::path(flags.out) / spec.name;
    } else if (!spec.output.empty()) {
      dir = spec.output;
    } else {
      dir = default_out / spec.name;
    }
    const auto result = tsdr::RunExperiment(spec, ctx);
    tsdr::WriteResult(result, dir);
    PrintAggregate(result);
    auto checks = tsdr::Evaluate(result);
    outcomes.insert(outcomes.end(), checks.begin(), checks.end());
  }
  return outcomes;
}

int Report(const std::vector<tsdr::CheckOutcome>& outcomes, const std::filesystem::path& dir, bool strict) {
  if (outcomes.empty()) return 0;
  std::ostringstream csv;
  tsdr::WriteComparisonCsv(outcomes, csv);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "comparison.csv") << csv.str();
  std::cout << '\n' << csv.str();
  std::size_t failed = 0;
  for (const auto& c : outcomes) failed += c.pass ? 0 : 1;
  std::cout << (outcomes.size() - failed) << "/" << outcomes.size() << " checks passed\n";
  return strict && failed > 0 ? 3 : 0;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw tsdr::Error(tsdr::ErrorCode::kInvalidArgument, "bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage discrimination remover: experiments and synthetic sweeps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tsdr::Version());

  CommonFlags flags;
  bool strict = false;

  auto* run = app.add_subcommand("run", "Run the experiments in a spec file");
  std::string spec_file;
  run->add_option("spec-file", spec_file, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  run->add_flag("--strict", strict, "Exit with status 3 when an expectation fails");
  AddCommonFlags(run, flags);

  auto* reproduce = app.add_subcommand("reproduce", "Run a canned table or figure recipe");
  std::string table_id;
  std::string experiments_dir = std::string(TSDR_DATA_ROOT) + "/experiments";
  reproduce->add_option("table-id", table_id, "t3 ... t11 or fig1")
      ->required()
      ->check(CLI::IsMember({"t3", "t4", "t5", "t6", "t7", "t8", "t9", "t10", "t11", "fig1"}));
  reproduce->add_option("--experiments-dir", experiments_dir, "Directory of canned recipes");
  reproduce->add_flag("--strict", strict, "Exit with status 3 when a comparison fails");
  AddCommonFlags(reproduce, flags);

  auto* sweep = app.add_subcommand("synth-sweep", "Sweep one synthetic-generator parameter");
  std::string axis;
  std::string values;
  std::size_t runs = 100;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  std::vector<std::string> settings;
  sweep->add_option("axis", axis, "n, d_x, sigma_eta_s or std_s")
      ->required()
      ->check(CLI::IsMember({"n", "d_x", "sigma_eta_s", "std_s"}));
  sweep->add_option("--values", values, "Comma-separated axis values")->required();
  sweep->add_option("--runs", runs, "Runs per value")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed, "Base seed");
  sweep->add_option("--out", sweep_out, "CSV output file (default: stdout)");
  sweep->add_option("--set", settings, "Generator parameter override key=value");

  auto* fetch = app.add_subcommand("fetch-instructions", "Print where to obtain a dataset");
  std::string dataset;
  std::string schemas_dir = std::string(TSDR_DATA_ROOT) + "/schemas";
  fetch->add_option("dataset", dataset, "Schema name, e.g. adult")->required();
  fetch->add_option("--schemas-dir", schemas_dir, "Directory of dataset schemas");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto specs = tsdr::LoadExperimentFile(spec_file);
      const auto outcomes = RunAll(specs, flags, "results");
      return Report(outcomes, flags.out.empty() ? std::filesystem::path("results") : std::filesystem::path(flags.out), strict);
    }
    if (*reproduce) {
      const auto path = std::filesystem::path(experiments_dir) / (table_id + ".json");
      const auto specs = tsdr::LoadExperimentFile(path);
      const std::filesystem::path out = flags.out.empty() ? std::filesystem::path("results") / table_id : std::filesystem::path(flags.out);
      CommonFlags local = flags;
      local.out = out.string();
      const auto outcomes = RunAll(specs, local, out);
      return Report(outcomes, out, strict);
    }
    if (*sweep) {
      nlohmann::json overrides = nlohmann::json::object();
      for (const auto& s : settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw tsdr::Error(tsdr::ErrorCode::kInvalidArgument, "--set expects key=value");
        const std::string key = s.substr(0, eq);
        const double v = ParseList(s.substr(eq + 1)).at(0);
        if (key == "d_x" || key == "d_z" || key == "d_s" || key == "n") {
          overrides[key] = static_cast<std::size_t>(v);
        } else {
          overrides[key] = v;
        }
      }
      tsdr::SweepOptions options;
      options.runs = runs;
      options.seed = sweep_seed;
      const auto table =
          tsdr::Sweep(tsdr::SynthConfigFromJson(overrides), tsdr::ParseSweepAxis(axis), ParseList(values), options);
      if (sweep_out.empty()) {
        tsdr::WriteSweepCsv(table, std::cout);
      } else {
        std::ofstream out(sweep_out);
        if (!out) throw tsdr::Error(tsdr::ErrorCode::kIo, "cannot write '" + sweep_out + "'");
        tsdr::WriteSweepCsv(table, out);
      }
      return 0;
    }
    if (*fetch) {
      const auto schema = tsdr::LoadSchema(std::filesystem::path(schemas_dir) / (dataset + ".json"));
      std::cout << tsdr::FetchInstructions(schema);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "tsdr: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
