#include "tsdr/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "tsdr/datamodel.hpp"
#include "tsdr/error.hpp"
#include "tsdr/kernels.hpp"

namespace tsdr {

namespace {

void RequireBinaryLabels(std::span<const double> labels, std::size_t n, const char* who) {
  if (labels.size() != n)
    throw Error(ErrorCode::kDimensionMismatch, std::string(who) + ": label count differs from rows");
  std::size_t positives = 0;
  for (double v : labels) {
    if (v != 0.0 && v != 1.0)
      throw Error(ErrorCode::kInvalidArgument, std::string(who) + ": labels must be 0 or 1");
    positives += v == 1.0;
  }
  if (positives == 0 || positives == n)
    throw Error(ErrorCode::kInvalidArgument, std::string(who) + ": both classes must be present");
}

Matrix SignedLabels(std::span<const double> labels) {
  Matrix y(labels.size(), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) y(i, 0) = labels[i] == 1.0 ? 1.0 : -1.0;
  return y;
}

std::vector<double> PenaltyVector(const Matrix& features, double alpha) {
  std::vector<double> penalty(features.cols(), alpha);
  for (std::size_t c : InterceptColumns(features)) penalty[c] = 0.0;
  return penalty;
}

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + e^t) without overflow.
double Softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

std::vector<double> LinearScores(const Matrix& features, std::span<const double> beta) {
  std::vector<double> out(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto row = features.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * beta[c];
    out[r] = s;
  }
  return out;
}

std::size_t CountCorrect(const std::vector<double>& scores, std::span<const double> labels) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) correct += (scores[i] > 0.0 ? 1.0 : 0.0) == labels[i];
  return correct;
}

}  // namespace

const char* ToString(Link link) {
  switch (link) {
    case Link::kIdentity: return "identity";
    case Link::kSign: return "sign";
    case Link::kSigmoid: return "sigmoid";
  }
  return "identity";
}

std::vector<std::size_t> InterceptColumns(const Matrix& features) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < features.cols(); ++c) {
    bool ones = features.rows() > 0;
    for (std::size_t r = 0; r < features.rows() && ones; ++r) ones = features(r, c) == 1.0;
    if (ones) out.push_back(c);
  }
  return out;
}

LinearModel FitOls(const Matrix& features, const Matrix& targets) {
  if (features.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "FitOls: no rows");
  if (targets.cols() != 1) throw Error(ErrorCode::kDimensionMismatch, "FitOls: targets must be n x 1");
  LinearModel model;
  model.weights = SolveLeastSquares(features, targets).column(0);
  model.link = Link::kIdentity;
  return model;
}

std::vector<double> DefaultAlphaGrid() {
  std::vector<double> grid;
  for (int k = 0; k <= 12; ++k) grid.push_back(std::pow(10.0, -3.0 + 0.5 * k));
  return grid;
}

LinearModel FitRidgeFixed(const Matrix& features, std::span<const double> labels, double alpha) {
  RequireBinaryLabels(labels, features.rows(), "FitRidgeFixed");
  if (!(alpha >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "FitRidgeFixed: alpha must be >= 0");
  LinearModel model;
  model.link = Link::kSign;
  model.chosen_alpha = alpha;
  const auto penalty = PenaltyVector(features, alpha);
  model.weights = SolvePenalizedLeastSquares(features, SignedLabels(labels), penalty).column(0);
  model.training_accuracy = static_cast<double>(CountCorrect(LinearScores(features, model.weights), labels)) /
                            static_cast<double>(features.rows());
  return model;
}

LinearModel FitRidgeClassifier(const Matrix& features, std::span<const double> labels,
                               std::span<const double> alpha_grid, std::size_t folds, Rng& rng) {
  const std::size_t n = features.rows();
  RequireBinaryLabels(labels, n, "FitRidgeClassifier");
  if (alpha_grid.empty()) throw Error(ErrorCode::kInvalidArgument, "FitRidgeClassifier: empty alpha grid");
  for (double a : alpha_grid)
    if (!(a >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "FitRidgeClassifier: alphas must be >= 0");
  if (folds < 2 || folds > n)
    throw Error(ErrorCode::kInvalidArgument, "FitRidgeClassifier: folds must lie in [2, n]");

  const Matrix y = SignedLabels(labels);
  const std::size_t p = features.cols();
  SplitPlan plan;
  plan.kind = SplitPlan::Kind::kKFold;
  plan.folds = folds;
  plan.seed = rng.NextU64();
  const auto splits = MakeSplits(n, plan);

  // Per-fold Gram blocks; a training Gram is the total minus its fold.
  std::vector<Matrix> fold_gram(folds), fold_rhs(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const Matrix xf = features.SelectRows(splits[f].test);
    const Matrix yf = y.SelectRows(splits[f].test);
    fold_gram[f] = kernels::Gram(xf);
    fold_rhs[f] = kernels::TransposeMultiply(xf, yf);
  }
  Matrix total_gram(p, p), total_rhs(p, 1);
  for (std::size_t f = 0; f < folds; ++f) {
    total_gram = total_gram + fold_gram[f];
    total_rhs = total_rhs + fold_rhs[f];
  }

  std::vector<double> penalised(p, 1.0);
  for (std::size_t c : InterceptColumns(features)) penalised[c] = 0.0;

  const std::size_t grid = alpha_grid.size();
  std::vector<double> fold_accuracy(folds * grid, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t fi = 0; fi < static_cast<std::ptrdiff_t>(folds); ++fi) {
    const std::size_t f = static_cast<std::size_t>(fi);
    const Matrix train_gram = total_gram - fold_gram[f];
    const Matrix train_rhs = total_rhs - fold_rhs[f];
    const Matrix test_x = features.SelectRows(splits[f].test);
    std::vector<double> test_labels;
    for (std::size_t i : splits[f].test) test_labels.push_back(labels[i]);
    for (std::size_t a = 0; a < grid; ++a) {
      Matrix g = train_gram;
      for (std::size_t c = 0; c < p; ++c) g(c, c) += alpha_grid[a] * penalised[c];
      const auto w = SolveNormalEquations(std::move(g), train_rhs).column(0);
      fold_accuracy[f * grid + a] = static_cast<double>(CountCorrect(LinearScores(test_x, w), test_labels)) /
                                    static_cast<double>(test_labels.size());
    }
  }

  LinearModel model;
  model.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  model.cv_accuracy.assign(grid, 0.0);
  std::size_t best = 0;
  for (std::size_t a = 0; a < grid; ++a) {
    double sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) sum += fold_accuracy[f * grid + a];
    model.cv_accuracy[a] = sum / static_cast<double>(folds);
    const bool better = model.cv_accuracy[a] > model.cv_accuracy[best];
    const bool tie_larger = model.cv_accuracy[a] == model.cv_accuracy[best] && alpha_grid[a] > alpha_grid[best];
    if (a == 0 || better || tie_larger) best = a;
  }

  LinearModel refit = FitRidgeFixed(features, labels, alpha_grid[best]);
  model.weights = std::move(refit.weights);
  model.training_accuracy = refit.training_accuracy;
  model.chosen_alpha = alpha_grid[best];
  model.link = Link::kSign;
  return model;
}

double LogisticLogLikelihood(const Matrix& features, std::span<const double> labels,
                             std::span<const double> beta) {
  const auto eta = LinearScores(features, beta);
  double ll = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) ll += labels[i] * eta[i] - Softplus(eta[i]);
  return ll / static_cast<double>(eta.size());
}

std::vector<double> LogisticGradient(const Matrix& features, std::span<const double> labels,
                                     std::span<const double> beta) {
  const auto eta = LinearScores(features, beta);
  Matrix resid(eta.size(), 1);
  for (std::size_t i = 0; i < eta.size(); ++i) resid(i, 0) = labels[i] - Sigmoid(eta[i]);
  auto g = kernels::TransposeMultiply(features, resid).column(0);
  for (double& v : g) v /= static_cast<double>(eta.size());
  return g;
}

LinearModel FitLogistic(const Matrix& features, std::span<const double> labels,
                        const LogisticOptions& options) {
  const std::size_t n = features.rows();
  const std::size_t p = features.cols();
  RequireBinaryLabels(labels, n, "FitLogistic");

  LinearModel model;
  model.link = Link::kSigmoid;
  model.weights.assign(p, 0.0);
  double ll = LogisticLogLikelihood(features, labels, model.weights);
  constexpr int kMaxHalvings = 40;
  constexpr double kSeparationLogLik = -1e-6;

  auto separated = [&] {
    double wmax = 0.0;
    for (double w : model.weights) wmax = std::max(wmax, std::abs(w));
    return ll > kSeparationLogLik || wmax > 1e4;
  };

  bool converged = false;
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    const auto grad = LogisticGradient(features, labels, model.weights);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax <= options.tol) {
      converged = true;
      break;
    }
    const auto eta = LinearScores(features, model.weights);
    Matrix weighted(n, p);
    for (std::size_t r = 0; r < n; ++r) {
      const double prob = Sigmoid(eta[r]);
      const double w = std::sqrt(std::max(prob * (1.0 - prob), options.weight_floor) / static_cast<double>(n));
      const auto src = features.row(r);
      auto dst = weighted.row(r);
      for (std::size_t c = 0; c < p; ++c) dst[c] = w * src[c];
    }
    const auto step = SolveNormalEquations(kernels::Gram(weighted), Matrix::Column(grad)).column(0);

    double t = 1.0;
    std::vector<double> trial(p);
    double trial_ll = ll;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      for (std::size_t c = 0; c < p; ++c) trial[c] = model.weights[c] + t * step[c];
      trial_ll = LogisticLogLikelihood(features, labels, trial);
      if (trial_ll >= ll) {
        accepted = true;
        break;
      }
    }
    model.iterations = iter + 1;
    if (!accepted) break;
    model.weights = trial;
    ll = trial_ll;
  }

  if (!converged) {
    if (separated()) {
      model.separation_suspected = true;
    } else {
      throw NonConvergenceError("FitLogistic: no convergence after " + std::to_string(model.iterations) +
                                    " iterations",
                                model);
    }
  } else if (separated()) {
    model.separation_suspected = true;
  }
  const auto pred = Predict(model, features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) correct += pred.classes[i] == labels[i];
  model.training_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return model;
}

Predictions Predict(const LinearModel& model, const Matrix& features) {
  if (features.cols() != model.weights.size())
    throw Error(ErrorCode::kDimensionMismatch, "Predict: model has " + std::to_string(model.weights.size()) +
                                                   " weights, features have " +
                                                   std::to_string(features.cols()) + " columns");
  Predictions out;
  out.scores = LinearScores(features, model.weights);
  if (model.link == Link::kSigmoid)
    for (double& s : out.scores) s = Sigmoid(s);
  if (model.link == Link::kSign) {
    out.classes.reserve(out.scores.size());
    for (double s : out.scores) out.classes.push_back(s > 0.0 ? 1.0 : 0.0);
  } else if (model.link == Link::kSigmoid) {
    out.classes.reserve(out.scores.size());
    for (double s : out.scores) out.classes.push_back(s > 0.5 ? 1.0 : 0.0);
  }
  return out;
}

}  // namespace tsdr
