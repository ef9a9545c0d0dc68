#pragma once

// Point estimators of the regression function used to build reference
// variables: k-nearest-neighbour averaging, least-squares perceptron with
// logistic activation, logistic maximum likelihood and truncated OLS over a
// fixed basis.

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dfcr/core.hpp"
#include "dfcr/resample.hpp"

namespace dfcr {

// ---------------------------------------------------------------------------
// Engine descriptions

struct KnnEngine {
  /// Fixed neighbour count; when empty, default_k(n, alpha) is used.
  std::optional<std::size_t> k;
  double alpha = 0.7;
};

struct PerceptronSettings {
  enum class Optimizer { levenberg_marquardt, gradient_descent };
  Optimizer optimizer = Optimizer::levenberg_marquardt;
  int max_iterations = 200;
  /// Initial step of gradient descent; halved whenever the loss would increase.
  double step = 0.1;
  /// Stop once the sup-norm of the loss gradient falls below this.
  double gradient_tolerance = 1e-10;

  /// Full-batch gradient descent from zero, step 0.1 with halving, 2000 iterations.
  static PerceptronSettings gradient_descent();
};

struct MleSettings {
  int max_iterations = 100;
  /// Convergence when |grad L|_inf <= gradient_tolerance * n.
  double gradient_tolerance = 1e-9;
  /// Parameter norm beyond which the data are treated as separated.
  double separation_cap = 1e3;
  /// Smallest eigenvalue of -Hessian / n below which it counts as singular.
  double singular_threshold = 1e-9;
  /// Penalty (ridge / 2) |theta|^2 of the fallback fit.
  double ridge = 1.0;
};

struct PerceptronEngine {
  PerceptronSettings settings;
};
struct LogisticMleEngine {
  MleSettings settings;
};
struct LinearErmEngine {
  std::shared_ptr<const BasisSet> basis;
};

using RankingEngine = std::variant<KnnEngine, PerceptronEngine, LogisticMleEngine, LinearErmEngine>;

std::string engine_name(const RankingEngine& engine);

// ---------------------------------------------------------------------------
// k nearest neighbours

/// max(1, floor(n^alpha)) for alpha in (1/2, 1).
std::size_t default_k(std::size_t n, double alpha);

/// Mean label of the k training points nearest to x (Euclidean; equal
/// distances resolved towards the lower index).
double knn_predict(const LabeledSample& train, std::size_t k, std::span<const double> x);

/// The k nearest training points of every training input. Depends on the
/// inputs only, so it is shared by all datasets with those inputs. In one
/// dimension most neighbourhoods are windows of the sorted inputs and are
/// averaged through prefix sums.
class NeighborTable {
 public:
  NeighborTable(const InputMatrix& inputs, std::size_t k);

  std::size_t k() const { return k_; }
  std::size_t size() const { return window_start_.size(); }
  /// Indices of the neighbours of training point i, nearest first.
  std::vector<std::size_t> neighbors(std::size_t i) const;
  /// out[i] = mean of labels over the neighbours of point i.
  void average(std::span<const double> labels, std::span<double> out) const;

 private:
  static constexpr std::size_t kNoWindow = static_cast<std::size_t>(-1);

  std::size_t k_;
  std::vector<std::size_t> order_;         // indices sorted by (x, index), 1-d only
  std::vector<std::size_t> window_start_;  // into order_, or kNoWindow
  std::vector<std::size_t> explicit_;      // k indices per row without a window
  std::vector<std::size_t> explicit_row_;  // row -> offset / k into explicit_
};

// ---------------------------------------------------------------------------
// Perceptron (least squares with activation 2 / (1 + e^-z) - 1)

struct LossGradient {
  double loss;
  std::vector<double> gradient;
};

/// Mean squared loss (1/n) sum (f(X_i) - Y_i)^2 of the logistic model with
/// parameters (a, b_1..b_d) and its analytic gradient.
LossGradient perceptron_loss(const LabeledSample& train, std::span<const double> params);

struct PerceptronFit {
  RegressionModel model;
  double loss;
  int iterations;
};

PerceptronFit perceptron_fit(const LabeledSample& train, const PerceptronSettings& settings = {});
PerceptronFit perceptron_fit(const InputMatrix& inputs, std::span<const double> labels,
                             const PerceptronSettings& settings = {});

// ---------------------------------------------------------------------------
// Logistic maximum likelihood

/// Raised when Newton's method hits its iteration cap on non-separated data.
class ConvergenceError : public FitError {
 public:
  ConvergenceError(std::vector<double> last_iterate, double gradient_norm);
  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  std::vector<double> last_iterate_;
  double gradient_norm_;
};

struct LogLikelihood {
  double value;
  Eigen::VectorXd gradient;
  /// Second derivative of L (negative semidefinite).
  Eigen::MatrixXd hessian;
};

/// L(a, b) = sum_i t_i log p_i + (1 - t_i) log(1 - p_i) with t = (y + 1) / 2 and
/// p_i = 1 / (1 + exp(-(b . X_i + a))); parameters ordered (a, b_1..b_d).
LogLikelihood logistic_log_likelihood(const LabeledSample& train, std::span<const double> params);

struct MleFit {
  RegressionModel model;
  /// Separation or a singular Hessian forced the ridge-penalised fallback.
  bool separated;
  int iterations;
  /// |grad L|_inf at the returned point (of the penalised objective if separated).
  double gradient_norm;
};

MleFit logistic_mle_fit(const LabeledSample& train, const MleSettings& settings = {});
MleFit logistic_mle_fit(const InputMatrix& inputs, std::span<const double> labels,
                        const MleSettings& settings = {});

// ---------------------------------------------------------------------------
// Truncated OLS over a basis

/// Least-squares coefficients over the basis; the returned linear-basis model
/// clamps its predictions to [-1, 1].
RegressionModel linear_erm_fit(const LabeledSample& train, std::shared_ptr<const BasisSet> basis);

// ---------------------------------------------------------------------------
// Fitted predictors and reference vectors

class FittedPredictor {
 public:
  FittedPredictor(RegressionModel model, std::size_t dataset);
  FittedPredictor(std::shared_ptr<const LabeledSample> train, std::size_t k, std::size_t dataset);

  double operator()(std::span<const double> x) const;
  std::size_t dataset() const { return dataset_; }
  /// The fit as a member of a model family, when the estimator produces one.
  const std::optional<RegressionModel>& model() const { return model_; }

 private:
  std::optional<RegressionModel> model_;
  std::shared_ptr<const LabeledSample> knn_train_;
  std::size_t k_ = 0;
  std::size_t dataset_;
};

FittedPredictor fit_predictor(const RankingEngine& engine, const LabeledSample& train,
                              std::size_t dataset = 0);

/// An engine bound to one sample: the original dataset's fit (and, for kNN,
/// the neighbour table) are computed once and reused for every candidate.
/// Immutable after construction and safe to share between threads.
class PreparedEngine {
 public:
  PreparedEngine(RankingEngine engine, LabeledSample sample);

  const RankingEngine& engine() const { return engine_; }
  const LabeledSample& sample() const { return sample_; }
  /// Neighbour count in use (kNN only, else 0).
  std::size_t k() const { return table_ ? table_->k() : 0; }

  /// In-sample fitted values of the estimator trained on `labels`.
  void fitted_values(std::span<const double> labels, std::size_t dataset,
                     std::span<double> out) const;
  std::span<const double> original_fit() const { return original_fit_; }
  /// The original fit as a model family member, if the estimator yields one.
  const std::optional<RegressionModel>& original_model() const { return original_model_; }

  /// Z[j] = (1/n) sum_i (f(X_i) - fit_j(X_i))^2 with Z[0] from the cached fit.
  ReferenceVector reference_vector(std::span<const double> candidate_values,
                                   const AlternativeOutputs& alternatives) const;

 private:
  RankingEngine engine_;
  LabeledSample sample_;
  std::shared_ptr<const NeighborTable> table_;
  std::vector<double> original_fit_;
  std::optional<RegressionModel> original_model_;
};

/// Uncached form: fits every dataset, the original included, from scratch.
ReferenceVector engine_reference_vector(const RankingEngine& engine,
                                        const RegressionModel& candidate,
                                        const LabeledSample& sample,
                                        const AlternativeOutputs& alternatives);

}  // namespace dfcr
