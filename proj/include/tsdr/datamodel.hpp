#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsdr/linalg.hpp"
#include "tsdr/rng.hpp"

namespace tsdr {

enum class Task { kRegression, kClassification };
enum class Role { kSensitive, kNonsensitive, kExplanatory, kTarget, kIgnore };
enum class Kind { kNumeric, kBinary, kCategorical };
enum class Comparison { kGreaterEqual, kLessEqual, kGreater, kLess };

const char* ToString(Task task);
Task ParseTask(const std::string& text);
Role ParseRole(const std::string& text);
Kind ParseKind(const std::string& text);
Comparison ParseComparison(const std::string& text);

struct Binarization {
  double cut = 0.0;
  Comparison positive_when = Comparison::kGreaterEqual;
};

struct ColumnSpec {
  std::string name;
  Role role = Role::kNonsensitive;
  Kind kind = Kind::kNumeric;
  std::optional<Binarization> binarize;  // numeric only
  std::optional<std::string> missing_marker;

  // Categorical summarisation, applied before encoding: explicit value map,
  // then every value outside keep (if non-empty) becomes other.
  std::map<std::string, std::string> category_map;
  std::vector<std::string> keep;
  std::optional<std::string> other;
  // Categorical with levels: encoded as the level index instead of dummies.
  std::vector<std::string> ordinal_levels;
  // Binary (or classification target) given as text: 1 iff value is listed.
  std::vector<std::string> positive_values;

  // Row filters; evaluated on every listed column, including ignored ones.
  std::optional<double> keep_min;
  std::optional<double> keep_max;
  std::vector<std::string> exclude_values;
};

struct Schema {
  std::string name;
  Task task = Task::kRegression;
  bool whitespace_delimited = false;
  char delimiter = ',';
  bool has_header = true;
  std::vector<std::string> column_names;   // used when has_header is false
  std::filesystem::path names_file;        // "@attribute <name> ..." lines
  std::vector<std::string> missing_markers;
  std::optional<ColumnSpec> default_column;  // applies to unlisted file columns
  bool drop_columns_with_missing = false;    // only for defaulted columns
  bool intercept = true;
  std::vector<ColumnSpec> columns;
  std::optional<std::size_t> expected_rows;
  std::optional<std::size_t> expected_attributes;
  std::string source;  // download location, printed by fetch-instructions
  std::string preparation;
};

// Reads a JSON schema. A "base" key names another schema file (relative to
// this one) whose top-level keys and per-name column entries are overridden.
Schema LoadSchema(const std::filesystem::path& path);

// Column blocks of one dataset. Rows are aligned across all four matrices.
struct Dataset {
  Matrix s;
  Matrix x;
  Matrix z;
  Matrix y;
  std::vector<std::string> s_names;
  std::vector<std::string> x_names;
  std::vector<std::string> z_names;
  std::string y_name = "y";
  std::vector<bool> s_binary;
  std::vector<bool> x_binary;
  Task task = Task::kRegression;

  std::size_t rows() const { return y.rows(); }
  std::vector<double> targets() const { return y.column(0); }

  // Throws unless the block invariants hold.
  void Validate() const;
  Dataset SelectRows(std::span<const std::size_t> rows) const;
  Dataset SelectXColumns(std::span<const std::size_t> cols) const;
};

inline constexpr const char* kInterceptName = "intercept";

Dataset LoadCsv(const std::filesystem::path& path, const Schema& schema);

// Minimal RFC-4180 reader; fields are trimmed of surrounding blanks unless
// quoted. Blank lines are skipped.
struct CsvTable {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};
CsvTable ReadCsv(const std::filesystem::path& path, char delimiter, bool whitespace_delimited);

std::vector<std::string> LearnCategories(std::span<const std::string> values);
Matrix ExpandDummies(std::span<const std::string> values, std::span<const std::string> categories);
std::vector<double> BinarizeThreshold(std::span<const double> values, double cut,
                                      Comparison positive_when);

struct SplitPlan {
  enum class Kind { kHoldout, kKFold };
  Kind kind = Kind::kHoldout;
  double train_fraction = 2.0 / 3.0;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  bool stratify_on_target = false;
  std::size_t repeats = 1;

  void Validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// labels is only consulted when the plan is stratified.
std::vector<SplitIndices> MakeSplits(std::size_t n, const SplitPlan& plan,
                                     std::span<const double> labels = {});
std::vector<std::pair<Dataset, Dataset>> Split(const Dataset& ds, const SplitPlan& plan);

// Seeded Fisher-Yates over [0, n).
std::vector<std::size_t> ShuffledIndices(std::size_t n, Rng& rng);

// Within-group empirical rank transform of selected X columns. Groups are the
// joint values of the binary sensitive columns.
struct RankMaps {
  std::vector<std::size_t> attributes;
  std::vector<std::size_t> group_columns;
  std::map<std::vector<double>, std::vector<std::vector<double>>> sorted_values;
};

// attributes defaults to every non-binary X column.
RankMaps QuantileTransformFit(const Dataset& train,
                              std::optional<std::vector<std::size_t>> attributes = std::nullopt);
Dataset QuantileTransformApply(const RankMaps& maps, const Dataset& ds);

Dataset ResampleBalance(const Dataset& train, Rng& rng);

// Drops every X column whose |Pearson correlation| with the target exceeds
// threshold. Zero-variance columns count as uncorrelated.
Dataset DropCorrelatedWithTarget(const Dataset& ds, double threshold);

// Keeps only non-binary X columns.
Dataset ContinuousOnly(const Dataset& ds);

}  // namespace tsdr
