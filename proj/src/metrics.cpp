#include "tsdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsdr/error.hpp"

namespace tsdr {

namespace {

struct Groups {
  std::vector<double> in;   // s == 1
  std::vector<double> out;  // s == 0
};

Groups SplitByGroup(std::span<const double> values, std::span<const double> s, const char* who) {
  if (values.size() != s.size())
    throw Error(ErrorCode::kDimensionMismatch, std::string(who) + ": predictions and s differ in length");
  Groups g;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 1.0) {
      g.in.push_back(values[i]);
    } else if (s[i] == 0.0) {
      g.out.push_back(values[i]);
    } else {
      throw Error(ErrorCode::kInvalidArgument, std::string(who) + ": s must be binary");
    }
  }
  if (g.in.empty() || g.out.empty())
    throw Error(ErrorCode::kDegenerateGroup, std::string(who) + ": a sensitive group is empty");
  return g;
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TieMode ParseTieMode(const std::string& text) {
  if (text == "strict") return TieMode::kStrict;
  if (text == "half") return TieMode::kHalf;
  throw Error(ErrorCode::kInvalidArgument, "tie mode must be 'strict' or 'half', got '" + text + "'");
}

const char* ToString(TieMode mode) { return mode == TieMode::kHalf ? "half" : "strict"; }

double PPercentRule(std::span<const double> predicted_classes, std::span<const double> s) {
  const Groups g = SplitByGroup(predicted_classes, s, "p_percent_rule");
  const double r1 = Mean(g.in);
  const double r0 = Mean(g.out);
  if (r1 == 0.0 && r0 == 0.0) return 1.0;
  if (r1 == 0.0 || r0 == 0.0) return 0.0;
  return std::min(r1 / r0, r0 / r1);
}

double MeanDistance(std::span<const double> predictions, std::span<const double> s) {
  const Groups g = SplitByGroup(predictions, s, "mean_distance");
  return std::abs(Mean(g.in) - Mean(g.out));
}

double AucVsSensitive(std::span<const double> predictions, std::span<const double> s, TieMode mode) {
  Groups g = SplitByGroup(predictions, s, "auc_vs_sensitive");
  std::sort(g.out.begin(), g.out.end());
  // For each s=1 score count s=0 scores strictly below and equal to it.
  double wins = 0.0;
  for (double v : g.in) {
    const auto lo = std::lower_bound(g.out.begin(), g.out.end(), v);
    const auto hi = std::upper_bound(lo, g.out.end(), v);
    wins += static_cast<double>(lo - g.out.begin());
    if (mode == TieMode::kHalf) wins += 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(g.in.size()) * static_cast<double>(g.out.size()));
}

double Covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw Error(ErrorCode::kDimensionMismatch, "covariance: inputs must be non-empty and equal length");
  const double ma = Mean(a);
  const double mb = Mean(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - ma) * (b[i] - mb);
  return sum / static_cast<double>(a.size());
}

double CorrelationCoefficient(std::span<const double> predictions, std::span<const double> s) {
  if (predictions.size() != s.size() || predictions.empty())
    throw Error(ErrorCode::kDimensionMismatch, "correlation_coefficient: length mismatch");
  const double va = Covariance(predictions, predictions);
  const double vb = Covariance(s, s);
  if (!(va > 0.0) || !(vb > 0.0))
    throw Error(ErrorCode::kZeroVariance, "correlation_coefficient: an input has zero variance");
  return std::clamp(Covariance(predictions, s) / std::sqrt(va * vb), -1.0, 1.0);
}

double Rmse(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size() || predictions.empty())
    throw Error(ErrorCode::kDimensionMismatch, "rmse: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) sum += (predictions[i] - targets[i]) * (predictions[i] - targets[i]);
  return std::sqrt(sum / static_cast<double>(targets.size()));
}

double Accuracy(std::span<const double> predicted_classes, std::span<const double> targets) {
  if (predicted_classes.size() != targets.size() || targets.empty())
    throw Error(ErrorCode::kDimensionMismatch, "accuracy: length mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) hits += predicted_classes[i] == targets[i];
  return static_cast<double>(hits) / static_cast<double>(targets.size());
}

namespace {

template <typename Field>
std::optional<double> FirstWith(const FairnessReport& r, Field field) {
  for (const auto& m : r.sensitive)
    if (m.*field) return m.*field;
  return std::nullopt;
}

}  // namespace

std::optional<double> FairnessReport::p_percent() const { return FirstWith(*this, &SensitiveMetrics::p_percent); }
std::optional<double> FairnessReport::mean_distance() const {
  return FirstWith(*this, &SensitiveMetrics::mean_distance);
}
std::optional<double> FairnessReport::auc_vs_sensitive() const {
  return FirstWith(*this, &SensitiveMetrics::auc_vs_sensitive);
}
std::optional<double> FairnessReport::corr_coefficient() const {
  return FirstWith(*this, &SensitiveMetrics::corr_coefficient);
}

FairnessReport Report(const Predictions& predictions, const Dataset& dataset, TieMode tie_mode) {
  const auto y = dataset.targets();
  if (predictions.scores.size() != y.size())
    throw Error(ErrorCode::kDimensionMismatch, "report: prediction count differs from dataset rows");
  const bool classification = dataset.task == Task::kClassification;
  if (classification && predictions.classes.size() != y.size())
    throw Error(ErrorCode::kInvalidArgument, "report: classification needs class predictions");

  FairnessReport r;
  r.task = dataset.task;
  r.rows = y.size();
  const std::vector<double>& yhat = classification ? predictions.classes : predictions.scores;
  for (std::size_t c = 0; c < dataset.s.cols(); ++c) {
    SensitiveMetrics m;
    m.name = dataset.s_names[c];
    m.binary = dataset.s_binary[c];
    const auto s = dataset.s.column(c);
    if (m.binary) {
      m.n_s1 = static_cast<std::size_t>(std::count(s.begin(), s.end(), 1.0));
      m.n_s0 = s.size() - m.n_s1;
      if (classification) {
        m.p_percent = PPercentRule(yhat, s);
      } else {
        m.mean_distance = MeanDistance(yhat, s);
        m.auc_vs_sensitive = AucVsSensitive(yhat, s, tie_mode);
      }
    } else {
      m.corr_coefficient = CorrelationCoefficient(yhat, s);
    }
    r.sensitive.push_back(std::move(m));
  }
  if (classification) {
    r.accuracy = Accuracy(predictions.classes, y);
  } else {
    r.rmse = Rmse(predictions.scores, y);
  }
  return r;
}

namespace {

void PutOptional(nlohmann::json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

std::optional<double> GetOptional(const nlohmann::json& j, const char* key) {
  if (j.contains(key) && !j.at(key).is_null()) return j.at(key).get<double>();
  return std::nullopt;
}

}  // namespace

nlohmann::json ToJson(const FairnessReport& report) {
  nlohmann::json j;
  j["task"] = ToString(report.task);
  j["rows"] = report.rows;
  PutOptional(j, "rmse", report.rmse);
  PutOptional(j, "accuracy", report.accuracy);
  j["sensitive"] = nlohmann::json::array();
  for (const auto& m : report.sensitive) {
    nlohmann::json e;
    e["name"] = m.name;
    e["binary"] = m.binary;
    PutOptional(e, "p_percent", m.p_percent);
    PutOptional(e, "mean_distance", m.mean_distance);
    PutOptional(e, "auc_vs_sensitive", m.auc_vs_sensitive);
    PutOptional(e, "corr_coefficient", m.corr_coefficient);
    if (m.binary) {
      e["n_s1"] = m.n_s1;
      e["n_s0"] = m.n_s0;
    }
    j["sensitive"].push_back(std::move(e));
  }
  return j;
}

FairnessReport FairnessReportFromJson(const nlohmann::json& j) {
  FairnessReport r;
  r.task = ParseTask(j.at("task").get<std::string>());
  r.rows = j.at("rows").get<std::size_t>();
  r.rmse = GetOptional(j, "rmse");
  r.accuracy = GetOptional(j, "accuracy");
  for (const auto& e : j.at("sensitive")) {
    SensitiveMetrics m;
    m.name = e.at("name").get<std::string>();
    m.binary = e.at("binary").get<bool>();
    m.p_percent = GetOptional(e, "p_percent");
    m.mean_distance = GetOptional(e, "mean_distance");
    m.auc_vs_sensitive = GetOptional(e, "auc_vs_sensitive");
    m.corr_coefficient = GetOptional(e, "corr_coefficient");
    m.n_s1 = e.value("n_s1", std::size_t{0});
    m.n_s0 = e.value("n_s0", std::size_t{0});
    r.sensitive.push_back(std::move(m));
  }
  return r;
}

}  // namespace tsdr
