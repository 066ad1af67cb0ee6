#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsdr/datamodel.hpp"
#include "tsdr/estimators.hpp"
#include "tsdr/linalg.hpp"
#include "tsdr/rng.hpp"

namespace tsdr {

enum class SensitiveKind { kBinary, kNumeric, kMixed };

const char* ToString(SensitiveKind kind);

// Auto applies variance correction and the zero-variance filter exactly when
// some sensitive column is binary.
enum class Toggle { kAuto, kOn, kOff };

struct FirstStageOptions {
  bool intercept = true;
  Toggle variance_correction = Toggle::kAuto;
  Toggle zero_variance_filter = Toggle::kAuto;
};

// Regression of the non-sensitive attributes on the sensitive ones.
struct FirstStageModel {
  // Rows: sensitive columns, then the intercept row when fitted with one.
  // Columns: retained attributes.
  Matrix coefficients;
  bool intercept = true;
  std::vector<bool> retained_mask;  // per original X column
  // Row 0 scales residuals of group value 0, row 1 group value 1.
  std::optional<Matrix> variance_factors;
  std::optional<std::size_t> group_column;  // sensitive column keying the factors
  SensitiveKind sensitive_kind = SensitiveKind::kNumeric;
  std::size_t sensitive_count = 0;

  std::size_t retained_count() const { return coefficients.cols(); }

  // Identity transform: U = X. Used by the unadjusted baseline.
  static FirstStageModel Passthrough(std::size_t sensitive_count, std::size_t attribute_count);
};

struct OlsStage {};
struct RidgeStage {
  std::vector<double> alpha_grid = DefaultAlphaGrid();
  std::size_t folds = 10;
};
struct LogisticStage {
  LogisticOptions options;
};
using SecondStageSpec = std::variant<OlsStage, RidgeStage, LogisticStage>;

struct TwoStagePredictor {
  FirstStageModel first_stage;
  LinearModel second_stage;
  bool uses_explanatory = false;
  Task task = Task::kRegression;
};

// Masks out X columns with variance < 1e-12 within either group of any
// binary sensitive column.
std::vector<bool> FilterZeroVariance(const Matrix& s, const std::vector<bool>& s_binary, const Matrix& x);

FirstStageModel FitFirstStage(const Matrix& s, const std::vector<bool>& s_binary, const Matrix& x,
                              const FirstStageOptions& options = {});

Matrix Residualize(const FirstStageModel& model, const Matrix& s, const Matrix& x);

TwoStagePredictor Fit2sdr(const Dataset& train, const SecondStageSpec& spec,
                          const FirstStageOptions& options, Rng& rng);

// The unadjusted comparison model: the same second stage trained on [X | Z].
TwoStagePredictor FitBaseline(const Dataset& train, const SecondStageSpec& spec, Rng& rng);

Predictions Predict2sdr(const TwoStagePredictor& predictor, const Dataset& test);

// Second-stage design [U | Z].
Matrix SecondStageFeatures(const TwoStagePredictor& predictor, const Dataset& ds);

nlohmann::json ToJson(const TwoStagePredictor& predictor);
TwoStagePredictor TwoStagePredictorFromJson(const nlohmann::json& j);

}  // namespace tsdr
