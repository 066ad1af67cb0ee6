#include "tsdr/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "tsdr/error.hpp"

namespace tsdr {

using nlohmann::json;

namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> ParseDouble(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

bool Compare(double v, double cut, Comparison cmp) {
  switch (cmp) {
    case Comparison::kGreaterEqual: return v >= cut;
    case Comparison::kLessEqual: return v <= cut;
    case Comparison::kGreater: return v > cut;
    case Comparison::kLess: return v < cut;
  }
  return false;
}

ColumnSpec ParseColumn(const json& j) {
  ColumnSpec c;
  c.name = j.value("name", "");
  if (j.contains("role")) c.role = ParseRole(j.at("role").get<std::string>());
  if (j.contains("kind")) c.kind = ParseKind(j.at("kind").get<std::string>());
  if (j.contains("binarize")) {
    const auto& b = j.at("binarize");
    c.binarize = Binarization{b.at("cut").get<double>(),
                              ParseComparison(b.value("positive_when", ">="))};
  }
  if (j.contains("missing_marker")) c.missing_marker = j.at("missing_marker").get<std::string>();
  if (j.contains("map")) c.category_map = j.at("map").get<std::map<std::string, std::string>>();
  if (j.contains("keep")) c.keep = j.at("keep").get<std::vector<std::string>>();
  if (j.contains("other")) c.other = j.at("other").get<std::string>();
  if (j.contains("levels")) c.ordinal_levels = j.at("levels").get<std::vector<std::string>>();
  if (j.contains("positive_values"))
    c.positive_values = j.at("positive_values").get<std::vector<std::string>>();
  if (j.contains("keep_min")) c.keep_min = j.at("keep_min").get<double>();
  if (j.contains("keep_max")) c.keep_max = j.at("keep_max").get<double>();
  if (j.contains("exclude_values"))
    c.exclude_values = j.at("exclude_values").get<std::vector<std::string>>();
  if (c.binarize && c.kind != Kind::kNumeric)
    throw Error(ErrorCode::kSchema, "column '" + c.name + "': binarize requires kind numeric");
  return c;
}

json ReadJsonWithBase(const std::filesystem::path& path, int depth = 0) {
  if (depth > 8) throw Error(ErrorCode::kSchema, "schema base chain too deep at " + path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open schema " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  if (!doc.contains("base")) return doc;
  json merged = ReadJsonWithBase(path.parent_path() / doc.at("base").get<std::string>(), depth + 1);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() == "base" || it.key() == "columns") continue;
    merged[it.key()] = it.value();
  }
  merged.erase("base");
  if (doc.contains("columns")) {
    json& columns = merged["columns"];
    for (const json& over : doc.at("columns")) {
      const std::string name = over.at("name").get<std::string>();
      auto hit = std::find_if(columns.begin(), columns.end(),
                              [&](const json& c) { return c.at("name") == name; });
      if (hit == columns.end()) {
        columns.push_back(over);
      } else if (over.value("replace", false)) {
        *hit = over;
        hit->erase("replace");
      } else {
        hit->update(over);
      }
    }
  }
  return merged;
}

std::vector<std::string> ReadNamesFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open names file " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag, name;
    ls >> tag >> name;
    std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (tag == "@attribute" && !name.empty()) names.push_back(name);
  }
  return names;
}

// One encoded output block for a single source column.
struct EncodedColumn {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  std::vector<bool> binary;
};

std::string Summarize(const ColumnSpec& spec, const std::string& raw) {
  std::string v = raw;
  if (auto it = spec.category_map.find(v); it != spec.category_map.end()) v = it->second;
  if (!spec.keep.empty() && spec.other &&
      std::find(spec.keep.begin(), spec.keep.end(), v) == spec.keep.end())
    v = *spec.other;
  return v;
}

double CategoricalTarget(const ColumnSpec& spec, const std::string& raw) {
  const std::string v = Summarize(spec, raw);
  return std::find(spec.positive_values.begin(), spec.positive_values.end(), v) !=
                 spec.positive_values.end()
             ? 1.0
             : 0.0;
}

}  // namespace

const char* ToString(Task task) {
  return task == Task::kClassification ? "classification" : "regression";
}

Task ParseTask(const std::string& text) {
  if (text == "classification") return Task::kClassification;
  if (text == "regression") return Task::kRegression;
  throw Error(ErrorCode::kSchema, "unknown task '" + text + "'");
}

Role ParseRole(const std::string& text) {
  if (text == "sensitive") return Role::kSensitive;
  if (text == "nonsensitive") return Role::kNonsensitive;
  if (text == "explanatory") return Role::kExplanatory;
  if (text == "target") return Role::kTarget;
  if (text == "ignore") return Role::kIgnore;
  throw Error(ErrorCode::kSchema, "unknown role '" + text + "'");
}

Kind ParseKind(const std::string& text) {
  if (text == "numeric") return Kind::kNumeric;
  if (text == "binary") return Kind::kBinary;
  if (text == "categorical") return Kind::kCategorical;
  throw Error(ErrorCode::kSchema, "unknown kind '" + text + "'");
}

Comparison ParseComparison(const std::string& text) {
  if (text == ">=") return Comparison::kGreaterEqual;
  if (text == "<=") return Comparison::kLessEqual;
  if (text == ">") return Comparison::kGreater;
  if (text == "<") return Comparison::kLess;
  throw Error(ErrorCode::kSchema, "unknown comparison '" + text + "'");
}

Schema LoadSchema(const std::filesystem::path& path) {
  const json doc = ReadJsonWithBase(path);
  Schema s;
  try {
    s.name = doc.value("name", path.stem().string());
    s.task = ParseTask(doc.value("task", "regression"));
    const std::string delim = doc.value("delimiter", ",");
    if (delim == "whitespace") {
      s.whitespace_delimited = true;
    } else if (delim.size() == 1) {
      s.delimiter = delim[0];
    } else {
      throw Error(ErrorCode::kSchema, "delimiter must be one character or 'whitespace'");
    }
    s.has_header = doc.value("header", true);
    if (doc.contains("column_names"))
      s.column_names = doc.at("column_names").get<std::vector<std::string>>();
    if (doc.contains("names_file"))
      s.names_file = doc.at("names_file").get<std::string>();
    if (doc.contains("missing_markers"))
      s.missing_markers = doc.at("missing_markers").get<std::vector<std::string>>();
    if (doc.contains("default")) s.default_column = ParseColumn(doc.at("default"));
    s.drop_columns_with_missing = doc.value("drop_columns_with_missing", false);
    s.intercept = doc.value("intercept", true);
    for (const json& c : doc.value("columns", json::array())) s.columns.push_back(ParseColumn(c));
    if (doc.contains("expected")) {
      const auto& e = doc.at("expected");
      if (e.contains("rows")) s.expected_rows = e.at("rows").get<std::size_t>();
      if (e.contains("attributes")) s.expected_attributes = e.at("attributes").get<std::size_t>();
    }
    s.source = doc.value("source", "");
    s.preparation = doc.value("preparation", "");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  std::set<std::string> seen;
  std::size_t targets = 0;
  for (const auto& c : s.columns) {
    if (c.name.empty()) throw Error(ErrorCode::kSchema, "column without name in " + path.string());
    if (!seen.insert(c.name).second)
      throw Error(ErrorCode::kSchema, "duplicate column '" + c.name + "'");
    if (c.role == Role::kTarget) ++targets;
  }
  if (targets != 1)
    throw Error(ErrorCode::kSchema, "schema must have exactly one target column, found " +
                                        std::to_string(targets));
  return s;
}

void Dataset::Validate() const {
  const std::size_t n = y.rows();
  if (n == 0) throw Error(ErrorCode::kEmptyResult, "dataset has no rows");
  if (y.cols() != 1) throw Error(ErrorCode::kDimensionMismatch, "target block must be n x 1");
  if (s.rows() != n || x.rows() != n || z.rows() != n)
    throw Error(ErrorCode::kDimensionMismatch, "dataset blocks have different row counts");
  if (s_names.size() != s.cols() || x_names.size() != x.cols() || z_names.size() != z.cols() ||
      s_binary.size() != s.cols() || x_binary.size() != x.cols())
    throw Error(ErrorCode::kDimensionMismatch, "dataset column metadata out of sync");
  if (task == Task::kClassification)
    for (double v : y.values())
      if (v != 0.0 && v != 1.0)
        throw Error(ErrorCode::kInvalidArgument, "classification targets must be 0 or 1");
}

Dataset Dataset::SelectRows(std::span<const std::size_t> rows) const {
  Dataset out = *this;
  out.s = s.SelectRows(rows);
  out.x = x.SelectRows(rows);
  out.z = z.SelectRows(rows);
  out.y = y.SelectRows(rows);
  return out;
}

Dataset Dataset::SelectXColumns(std::span<const std::size_t> cols) const {
  Dataset out = *this;
  out.x = x.SelectColumns(cols);
  out.x_names.clear();
  out.x_binary.clear();
  for (std::size_t c : cols) {
    out.x_names.push_back(x_names[c]);
    out.x_binary.push_back(x_binary[c]);
  }
  return out;
}

CsvTable ReadCsv(const std::filesystem::path& path, char delimiter, bool whitespace_delimited) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_field = [&] {
    row.push_back(was_quoted ? field : Trim(field));
    field.clear();
    was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = std::all_of(row.begin(), row.end(), [](const std::string& f) { return f.empty(); });
    if (!blank) {
      table.rows.push_back(std::move(row));
      table.line_numbers.push_back(row_line);
    }
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && Trim(field).empty()) {
      field.clear();
      quoted = true;
      was_quoted = true;
    } else if (ch == '\n') {
      end_row();
      ++line;
      row_line = line;
    } else if (ch == '\r') {
      continue;
    } else if (whitespace_delimited ? (ch == ' ' || ch == '\t') : ch == delimiter) {
      if (whitespace_delimited && field.empty() && !was_quoted) continue;
      end_field();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw Error(ErrorCode::kParse, path.string() + ": unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return table;
}

std::vector<std::string> LearnCategories(std::span<const std::string> values) {
  std::vector<std::string> categories;
  std::set<std::string> seen;
  for (const auto& v : values)
    if (seen.insert(v).second) categories.push_back(v);
  return categories;
}

Matrix ExpandDummies(std::span<const std::string> values, std::span<const std::string> categories) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < categories.size(); ++k) index.emplace(categories[k], k);
  Matrix out(values.size(), categories.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    auto it = index.find(values[r]);
    if (it == index.end())
      throw Error(ErrorCode::kUnseenCategory,
                  "category '" + values[r] + "' at row " + std::to_string(r) + " not seen in training data");
    out(r, it->second) = 1.0;
  }
  return out;
}

std::vector<double> BinarizeThreshold(std::span<const double> values, double cut,
                                      Comparison positive_when) {
  if (!std::isfinite(cut)) throw Error(ErrorCode::kInvalidArgument, "binarize: cut must be finite");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = Compare(values[i], cut, positive_when) ? 1.0 : 0.0;
  return out;
}

Dataset LoadCsv(const std::filesystem::path& path, const Schema& schema) {
  const char delimiter = schema.delimiter;
  CsvTable table = ReadCsv(path, delimiter, schema.whitespace_delimited);

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (schema.has_header) {
    if (table.rows.empty()) throw Error(ErrorCode::kParse, path.string() + ": missing header row");
    header = table.rows.front();
    first_data = 1;
  } else if (!schema.column_names.empty()) {
    header = schema.column_names;
  } else if (!schema.names_file.empty()) {
    const auto names_path = schema.names_file.is_absolute() ? schema.names_file
                                                            : path.parent_path() / schema.names_file;
    header = ReadNamesFile(names_path);
  } else {
    throw Error(ErrorCode::kSchema, "schema '" + schema.name + "' has no header and no column names");
  }

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) position.emplace(header[c], c);
  for (const auto& spec : schema.columns)
    if (!position.contains(spec.name))
      throw Error(ErrorCode::kSchema, "schema column '" + spec.name + "' not found in " + path.string());

  // Resolve one spec per file column; unlisted columns take the default.
  std::vector<ColumnSpec> specs(header.size());
  std::vector<bool> defaulted(header.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    specs[c].name = header[c];
    if (schema.default_column) {
      specs[c] = *schema.default_column;
      specs[c].name = header[c];
      defaulted[c] = true;
    } else {
      specs[c].role = Role::kIgnore;
    }
  }
  for (const auto& spec : schema.columns) {
    specs[position.at(spec.name)] = spec;
    defaulted[position.at(spec.name)] = false;
  }

  auto is_missing = [&](const ColumnSpec& spec, const std::string& v) {
    if (spec.missing_marker && v == *spec.missing_marker) return true;
    return std::find(schema.missing_markers.begin(), schema.missing_markers.end(), v) !=
           schema.missing_markers.end();
  };

  // Row filters.
  std::vector<std::size_t> rows;
  for (std::size_t r = first_data; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    if (fields.size() != header.size())
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(table.line_numbers[r]) +
                                         ": expected " + std::to_string(header.size()) +
                                         " fields, found " + std::to_string(fields.size()));
    bool keep = true;
    for (std::size_t c = 0; c < header.size() && keep; ++c) {
      const auto& spec = specs[c];
      const auto& v = fields[c];
      if (std::find(spec.exclude_values.begin(), spec.exclude_values.end(), v) != spec.exclude_values.end())
        keep = false;
      if (keep && (spec.keep_min || spec.keep_max)) {
        const auto value = ParseDouble(v);
        if (!value || (spec.keep_min && *value < *spec.keep_min) ||
            (spec.keep_max && *value > *spec.keep_max))
          keep = false;
      }
    }
    if (keep) rows.push_back(r);
  }

  if (schema.drop_columns_with_missing) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!defaulted[c] || specs[c].role == Role::kIgnore) continue;
      for (std::size_t r : rows)
        if (is_missing(specs[c], table.rows[r][c])) {
          specs[c].role = Role::kIgnore;
          break;
        }
    }
  }

  std::erase_if(rows, [&](std::size_t r) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (specs[c].role != Role::kIgnore && is_missing(specs[c], table.rows[r][c])) return true;
    return false;
  });
  if (rows.empty())
    throw Error(ErrorCode::kEmptyResult, path.string() + ": no rows left after filtering missing values");

  const std::size_t n = rows.size();
  auto numeric_column = [&](std::size_t c) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& raw = table.rows[rows[i]][c];
      const auto v = ParseDouble(raw);
      if (!v)
        throw Error(ErrorCode::kParse, path.string() + ": row " +
                                           std::to_string(table.line_numbers[rows[i]]) + ", column '" +
                                           header[c] + "': cannot parse '" + raw + "' as a number");
      out[i] = *v;
    }
    return out;
  };
  auto text_column = [&](std::size_t c) {
    std::vector<std::string> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = Summarize(specs[c], table.rows[rows[i]][c]);
    return out;
  };

  auto encode = [&](std::size_t c) {
    const ColumnSpec& spec = specs[c];
    EncodedColumn enc;
    if (spec.kind == Kind::kNumeric) {
      auto values = numeric_column(c);
      if (spec.binarize) {
        enc.values.push_back(BinarizeThreshold(values, spec.binarize->cut, spec.binarize->positive_when));
        enc.binary.push_back(true);
      } else {
        enc.values.push_back(std::move(values));
        enc.binary.push_back(false);
      }
      enc.names.push_back(spec.name);
    } else if (spec.kind == Kind::kBinary) {
      std::vector<double> values(n);
      if (spec.positive_values.empty()) {
        values = numeric_column(c);
        for (std::size_t i = 0; i < n; ++i)
          if (values[i] != 0.0 && values[i] != 1.0)
            throw Error(ErrorCode::kParse, "column '" + spec.name + "': binary value must be 0 or 1 at row " +
                                               std::to_string(table.line_numbers[rows[i]]));
      } else {
        for (std::size_t i = 0; i < n; ++i) values[i] = CategoricalTarget(spec, table.rows[rows[i]][c]);
      }
      enc.names.push_back(spec.name);
      enc.values.push_back(std::move(values));
      enc.binary.push_back(true);
    } else if (!spec.ordinal_levels.empty()) {
      const auto values = text_column(c);
      std::vector<double> codes(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto it = std::find(spec.ordinal_levels.begin(), spec.ordinal_levels.end(), values[i]);
        if (it == spec.ordinal_levels.end())
          throw Error(ErrorCode::kUnseenCategory, "column '" + spec.name + "': level '" + values[i] +
                                                      "' not in levels list");
        codes[i] = static_cast<double>(it - spec.ordinal_levels.begin());
      }
      enc.names.push_back(spec.name);
      enc.values.push_back(std::move(codes));
      enc.binary.push_back(spec.ordinal_levels.size() <= 2);
    } else {
      const auto values = text_column(c);
      const auto categories = LearnCategories(values);
      const Matrix dummies = ExpandDummies(values, categories);
      for (std::size_t k = 0; k < categories.size(); ++k) {
        enc.names.push_back(spec.name + "=" + categories[k]);
        enc.values.push_back(dummies.column(k));
        enc.binary.push_back(true);
      }
    }
    return enc;
  };

  Dataset ds;
  ds.task = schema.task;
  std::vector<std::vector<double>> s_cols, x_cols, z_cols;
  std::optional<std::vector<double>> target;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const ColumnSpec& spec = specs[c];
    switch (spec.role) {
      case Role::kIgnore:
        break;
      case Role::kTarget: {
        if (schema.task == Task::kClassification && !spec.positive_values.empty()) {
          std::vector<double> y(n);
          for (std::size_t i = 0; i < n; ++i) y[i] = CategoricalTarget(spec, table.rows[rows[i]][c]);
          target = std::move(y);
        } else {
          auto enc = encode(c);
          if (enc.values.size() != 1)
            throw Error(ErrorCode::kSchema, "target column '" + spec.name + "' must encode to one column");
          target = std::move(enc.values.front());
        }
        ds.y_name = spec.name;
        break;
      }
      default: {
        auto enc = encode(c);
        for (std::size_t k = 0; k < enc.values.size(); ++k) {
          if (spec.role == Role::kSensitive) {
            s_cols.push_back(std::move(enc.values[k]));
            ds.s_names.push_back(enc.names[k]);
            ds.s_binary.push_back(enc.binary[k]);
          } else if (spec.role == Role::kNonsensitive) {
            x_cols.push_back(std::move(enc.values[k]));
            ds.x_names.push_back(enc.names[k]);
            ds.x_binary.push_back(enc.binary[k]);
          } else {
            z_cols.push_back(std::move(enc.values[k]));
            ds.z_names.push_back(enc.names[k]);
          }
        }
      }
    }
  }
  if (schema.intercept) {
    z_cols.emplace_back(n, 1.0);
    ds.z_names.emplace_back(kInterceptName);
  }

  auto assemble = [n](const std::vector<std::vector<double>>& cols) {
    Matrix m(n, cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) m.set_column(k, cols[k]);
    return m;
  };
  ds.s = assemble(s_cols);
  ds.x = assemble(x_cols);
  ds.z = assemble(z_cols);
  ds.y = Matrix::Column(*target);
  ds.Validate();
  return ds;
}

void SplitPlan::Validate() const {
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "split: repeats must be >= 1");
  if (kind == Kind::kHoldout && !(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "split: train_fraction must lie in (0, 1)");
  if (kind == Kind::kKFold && folds < 2)
    throw Error(ErrorCode::kInvalidArgument, "split: k-fold needs k >= 2");
}

std::vector<std::size_t> ShuffledIndices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.Below(i)]);
  return idx;
}

std::vector<SplitIndices> MakeSplits(std::size_t n, const SplitPlan& plan,
                                     std::span<const double> labels) {
  plan.Validate();
  if (plan.kind == SplitPlan::Kind::kKFold && plan.folds > n)
    throw Error(ErrorCode::kInvalidArgument, "split: k = " + std::to_string(plan.folds) +
                                                 " exceeds n = " + std::to_string(n));
  if (plan.kind == SplitPlan::Kind::kHoldout && n < 2)
    throw Error(ErrorCode::kInvalidArgument, "split: holdout needs n >= 2");
  if (plan.stratify_on_target && labels.size() != n)
    throw Error(ErrorCode::kDimensionMismatch, "split: stratification labels length");

  std::vector<SplitIndices> out;
  for (std::size_t rep = 0; rep < plan.repeats; ++rep) {
    Rng rng(plan.seed + rep);
    const auto order = ShuffledIndices(n, rng);

    // Stratified plans deal shuffled rows class by class.
    std::vector<std::vector<std::size_t>> strata;
    if (plan.stratify_on_target) {
      std::map<double, std::size_t> slot;
      for (std::size_t i : order) {
        auto [it, inserted] = slot.emplace(labels[i], strata.size());
        if (inserted) strata.emplace_back();
        strata[it->second].push_back(i);
      }
    } else {
      strata.push_back(order);
    }

    if (plan.kind == SplitPlan::Kind::kHoldout) {
      SplitIndices s;
      for (const auto& stratum : strata) {
        const auto cut = static_cast<std::size_t>(
            std::ceil(static_cast<double>(stratum.size()) * plan.train_fraction - 1e-9));
        s.train.insert(s.train.end(), stratum.begin(), stratum.begin() + cut);
        s.test.insert(s.test.end(), stratum.begin() + cut, stratum.end());
      }
      if (s.train.empty() || s.test.empty())
        throw Error(ErrorCode::kInvalidArgument, "split: holdout produced an empty side");
      out.push_back(std::move(s));
      continue;
    }

    const std::size_t k = plan.folds;
    std::vector<std::size_t> fold_of(n);
    if (plan.stratify_on_target) {
      std::size_t next = 0;
      for (const auto& stratum : strata)
        for (std::size_t i : stratum) fold_of[i] = next++ % k;
    } else {
      const std::size_t base = n / k;
      const std::size_t extra = n % k;
      std::size_t pos = 0;
      for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t t = 0; t < size; ++t) fold_of[order[pos++]] = f;
      }
    }
    for (std::size_t f = 0; f < k; ++f) {
      SplitIndices s;
      for (std::size_t i : order) (fold_of[i] == f ? s.test : s.train).push_back(i);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<std::pair<Dataset, Dataset>> Split(const Dataset& ds, const SplitPlan& plan) {
  const auto labels = ds.targets();
  std::vector<std::pair<Dataset, Dataset>> out;
  for (const auto& s : MakeSplits(ds.rows(), plan, labels))
    out.emplace_back(ds.SelectRows(s.train), ds.SelectRows(s.test));
  return out;
}

namespace {

std::vector<std::size_t> BinaryColumns(const Dataset& ds) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < ds.s.cols(); ++c)
    if (ds.s_binary[c]) out.push_back(c);
  return out;
}

std::vector<double> GroupKey(const Dataset& ds, const std::vector<std::size_t>& cols, std::size_t row) {
  std::vector<double> key;
  key.reserve(cols.size());
  for (std::size_t c : cols) key.push_back(ds.s(row, c));
  return key;
}

}  // namespace

RankMaps QuantileTransformFit(const Dataset& train, std::optional<std::vector<std::size_t>> attributes) {
  RankMaps maps;
  maps.group_columns = BinaryColumns(train);
  if (maps.group_columns.empty())
    throw Error(ErrorCode::kInvalidArgument, "quantile transform needs a binary sensitive column");
  if (attributes) {
    for (std::size_t a : *attributes)
      if (a >= train.x.cols()) throw Error(ErrorCode::kInvalidArgument, "quantile transform: attribute out of range");
    maps.attributes = *attributes;
  } else {
    for (std::size_t c = 0; c < train.x.cols(); ++c)
      if (!train.x_binary[c]) maps.attributes.push_back(c);
  }
  std::map<std::vector<double>, std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < train.rows(); ++r) members[GroupKey(train, maps.group_columns, r)].push_back(r);
  // A binary column whose value never appears leaves an empty group.
  if (members.size() < 2)
    throw Error(ErrorCode::kDegenerateGroup, "quantile transform: a sensitive group is empty in training data");
  for (const auto& [key, rows] : members) {
    auto& per_attr = maps.sorted_values[key];
    for (std::size_t a : maps.attributes) {
      std::vector<double> v;
      v.reserve(rows.size());
      for (std::size_t r : rows) v.push_back(train.x(r, a));
      std::sort(v.begin(), v.end());
      per_attr.push_back(std::move(v));
    }
  }
  return maps;
}

Dataset QuantileTransformApply(const RankMaps& maps, const Dataset& ds) {
  Dataset out = ds;
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const auto key = GroupKey(ds, maps.group_columns, r);
    auto it = maps.sorted_values.find(key);
    if (it == maps.sorted_values.end())
      throw Error(ErrorCode::kDegenerateGroup, "quantile transform: row " + std::to_string(r) +
                                                   " belongs to a group absent from training data");
    for (std::size_t k = 0; k < maps.attributes.size(); ++k) {
      const auto& sorted = it->second[k];
      const std::size_t a = maps.attributes[k];
      const auto below = std::lower_bound(sorted.begin(), sorted.end(), ds.x(r, a)) - sorted.begin();
      out.x(r, a) = static_cast<double>(below) / static_cast<double>(sorted.size());
    }
  }
  return out;
}

Dataset ResampleBalance(const Dataset& train, Rng& rng) {
  if (train.task != Task::kClassification)
    throw Error(ErrorCode::kInvalidArgument, "resample_balance requires a classification task");
  std::vector<std::size_t> pos, neg;
  for (std::size_t r = 0; r < train.rows(); ++r) (train.y(r, 0) == 1.0 ? pos : neg).push_back(r);
  if (pos.empty() || neg.empty())
    throw Error(ErrorCode::kInvalidArgument, "resample_balance: only one class present");
  const auto& minority = pos.size() < neg.size() ? pos : neg;
  const std::size_t target = std::max(pos.size(), neg.size());
  std::vector<std::size_t> rows(pos);
  rows.insert(rows.end(), neg.begin(), neg.end());
  std::sort(rows.begin(), rows.end());
  for (std::size_t extra = minority.size(); extra < target; ++extra)
    rows.push_back(minority[rng.Below(minority.size())]);
  const auto order = ShuffledIndices(rows.size(), rng);
  std::vector<std::size_t> shuffled(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) shuffled[i] = rows[order[i]];
  return train.SelectRows(shuffled);
}

Dataset DropCorrelatedWithTarget(const Dataset& ds, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "drop_correlated: threshold must lie in (0, 1]");
  const std::size_t n = ds.rows();
  const auto y = ds.targets();
  const double ymean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double syy = 0.0;
  for (double v : y) syy += (v - ymean) * (v - ymean);

  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < ds.x.cols(); ++c) {
    const auto x = ds.x.column(c);
    const double xmean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (x[i] - xmean) * (x[i] - xmean);
      sxy += (x[i] - xmean) * (y[i] - ymean);
    }
    const double corr = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
    if (std::abs(corr) <= threshold) keep.push_back(c);
  }
  if (keep.empty())
    throw Error(ErrorCode::kEmptyResult, "drop_correlated: every attribute exceeds the threshold");
  return ds.SelectXColumns(keep);
}

Dataset ContinuousOnly(const Dataset& ds) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < ds.x.cols(); ++c)
    if (!ds.x_binary[c]) keep.push_back(c);
  if (keep.empty()) throw Error(ErrorCode::kEmptyResult, "continuous_only: no numeric attributes");
  return ds.SelectXColumns(keep);
}

}  // namespace tsdr
