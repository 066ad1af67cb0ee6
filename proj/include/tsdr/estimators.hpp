#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsdr/error.hpp"
#include "tsdr/linalg.hpp"
#include "tsdr/rng.hpp"

namespace tsdr {

enum class Link { kIdentity, kSign, kSigmoid };

const char* ToString(Link link);

// Linear model over caller-supplied feature columns. The intercept, when
// wanted, is an explicit all-ones column.
struct LinearModel {
  std::vector<double> weights;
  std::vector<std::string> feature_names;
  Link link = Link::kIdentity;
  std::optional<double> chosen_alpha;
  std::vector<double> alpha_grid;
  std::vector<double> cv_accuracy;  // parallel to alpha_grid
  std::optional<double> training_accuracy;
  std::size_t iterations = 0;
  bool separation_suspected = false;

  bool is_classifier() const { return link != Link::kIdentity; }
};

struct Predictions {
  std::vector<double> scores;
  std::vector<double> classes;  // empty for regression
};

LinearModel FitOls(const Matrix& features, const Matrix& targets);

// 13 log-spaced values from 1e-3 to 1e3.
std::vector<double> DefaultAlphaGrid();

// Ridge classifier on {-1, +1}-encoded labels. All-ones columns are treated
// as intercepts and never penalised. Alpha maximises mean k-fold accuracy,
// ties broken toward the largest alpha, then the model is refit on all rows.
LinearModel FitRidgeClassifier(const Matrix& features, std::span<const double> labels,
                               std::span<const double> alpha_grid, std::size_t folds, Rng& rng);

// Ridge fit for one alpha without cross-validation.
LinearModel FitRidgeFixed(const Matrix& features, std::span<const double> labels, double alpha);

struct LogisticOptions {
  std::size_t max_iter = 100;
  double tol = 1e-8;
  double weight_floor = 1e-10;
};

// Mean Bernoulli log-likelihood and its gradient with respect to beta.
double LogisticLogLikelihood(const Matrix& features, std::span<const double> labels,
                             std::span<const double> beta);
std::vector<double> LogisticGradient(const Matrix& features, std::span<const double> labels,
                                     std::span<const double> beta);

// Newton / IRLS with step halving. Converged when the gradient of the mean
// log-likelihood has infinity norm <= tol.
LinearModel FitLogistic(const Matrix& features, std::span<const double> labels,
                        const LogisticOptions& options = {});

// Thrown by FitLogistic when it cannot converge; carries the last iterate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, LinearModel last)
      : Error(ErrorCode::kNonConvergence, message), last_(std::move(last)) {}
  const LinearModel& last_iterate() const { return last_; }

 private:
  LinearModel last_;
};

Predictions Predict(const LinearModel& model, const Matrix& features);

std::vector<std::size_t> InterceptColumns(const Matrix& features);

}  // namespace tsdr
