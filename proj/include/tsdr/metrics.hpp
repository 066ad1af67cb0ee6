#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsdr/datamodel.hpp"
#include "tsdr/estimators.hpp"

namespace tsdr {

enum class TieMode { kStrict, kHalf };

TieMode ParseTieMode(const std::string& text);
const char* ToString(TieMode mode);

// min(P[yhat=1|s=1] / P[yhat=1|s=0], P[yhat=1|s=0] / P[yhat=1|s=1]).
// Both rates zero gives 1; exactly one zero gives 0.
double PPercentRule(std::span<const double> predicted_classes, std::span<const double> s);

// |mean(yhat | s=1) - mean(yhat | s=0)|
double MeanDistance(std::span<const double> predictions, std::span<const double> s);

// Fraction of (s=1, s=0) pairs with yhat_1 > yhat_0; half mode adds 0.5 per tie.
double AucVsSensitive(std::span<const double> predictions, std::span<const double> s,
                      TieMode mode = TieMode::kStrict);

// Signed Pearson correlation; throws kZeroVariance if either input is constant.
double CorrelationCoefficient(std::span<const double> predictions, std::span<const double> s);

double Rmse(std::span<const double> predictions, std::span<const double> targets);
double Accuracy(std::span<const double> predicted_classes, std::span<const double> targets);

// Population (1/n) covariance.
double Covariance(std::span<const double> a, std::span<const double> b);

struct SensitiveMetrics {
  std::string name;
  bool binary = false;
  std::optional<double> p_percent;
  std::optional<double> mean_distance;
  std::optional<double> auc_vs_sensitive;
  std::optional<double> corr_coefficient;
  std::size_t n_s1 = 0;
  std::size_t n_s0 = 0;
};

struct FairnessReport {
  Task task = Task::kRegression;
  std::size_t rows = 0;
  std::vector<SensitiveMetrics> sensitive;
  std::optional<double> rmse;
  std::optional<double> accuracy;

  // First sensitive column of the matching kind, for table-style access.
  std::optional<double> p_percent() const;
  std::optional<double> mean_distance() const;
  std::optional<double> auc_vs_sensitive() const;
  std::optional<double> corr_coefficient() const;
};

// Classification + binary s: p%-rule. Regression + binary s: MD and AUC.
// Numeric s: CC against the scores (regression) or classes (classification).
FairnessReport Report(const Predictions& predictions, const Dataset& dataset,
                      TieMode tie_mode = TieMode::kStrict);

nlohmann::json ToJson(const FairnessReport& report);
FairnessReport FairnessReportFromJson(const nlohmann::json& j);

}  // namespace tsdr
