#pragma once

// Domain types shared by every module: labelled samples with dense real
// inputs, and the candidate regression functions f: R^d -> [-1, +1].

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfcr {

/// Raised when a point estimator cannot produce a fit for one dataset.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::optional<std::size_t> dataset = std::nullopt);
  std::optional<std::size_t> dataset() const { return dataset_; }

 private:
  std::optional<std::size_t> dataset_;
};

/// Column-major n x d matrix of input points; column k holds coordinate k
/// of every point contiguously so that kernels can sweep over points.
class InputMatrix {
 public:
  InputMatrix() = default;
  InputMatrix(std::size_t rows, std::size_t dim);
  static InputMatrix from_points(const std::vector<std::vector<double>>& points);
  static InputMatrix from_1d(std::span<const double> xs);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t k) const { return data_[k * rows_ + i]; }
  double& operator()(std::size_t i, std::size_t k) { return data_[k * rows_ + i]; }

  std::span<const double> column(std::size_t k) const {
    return {data_.data() + k * rows_, rows_};
  }
  std::span<double> column(std::size_t k) { return {data_.data() + k * rows_, rows_}; }
  /// All columns back to back (length rows * dim).
  std::span<const double> data() const { return data_; }

  std::vector<double> point(std::size_t i) const;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// n input points with labels in {-1, +1}.
class LabeledSample {
 public:
  LabeledSample(InputMatrix inputs, std::vector<double> labels);
  static LabeledSample from_1d(std::span<const double> xs, std::span<const double> labels);

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return inputs_.dim(); }
  const InputMatrix& inputs() const { return inputs_; }
  std::span<const double> labels() const { return labels_; }

 private:
  InputMatrix inputs_;
  std::vector<double> labels_;
};

/// Fixed list of real functions on R^d, each mapping into [-1, 1].
class BasisSet {
 public:
  using Function = std::function<double(std::span<const double>)>;

  BasisSet(std::size_t input_dim, std::vector<Function> functions, std::string name);

  std::size_t size() const { return functions_.size(); }
  std::size_t input_dim() const { return input_dim_; }
  const std::string& name() const { return name_; }
  double operator()(std::size_t index, std::span<const double> x) const {
    return functions_[index](x);
  }

 private:
  std::size_t input_dim_;
  std::vector<Function> functions_;
  std::string name_;
};

/// Legendre polynomials P_0..P_degree on one input; each is bounded by 1 on
/// [-1, 1] and the system is orthogonal under the uniform law there.
std::shared_ptr<const BasisSet> legendre_basis(int degree);
/// The single constant function 1 on R^dim.
std::shared_ptr<const BasisSet> constant_basis(std::size_t dim = 1);

enum class ModelFamily { logistic, linear_basis, constant };

std::string to_string(ModelFamily family);

/// A candidate regression function.
///
///  - logistic:     f(x) = 2 / (1 + exp(-(b . x + a))) - 1, parameters (a, b_1..b_d)
///  - linear_basis: f(x) = clamp(sum_k c_k phi_k(x), -1, 1)
///  - constant:     f(x) = c with c in [-1, 1]
class RegressionModel {
 public:
  static RegressionModel logistic(double intercept, std::vector<double> slopes);
  static RegressionModel linear_basis(std::shared_ptr<const BasisSet> basis,
                                      std::vector<double> coefficients);
  static RegressionModel constant(double value);

  ModelFamily family() const { return family_; }
  /// Input dimension the model expects; empty for constant models.
  std::optional<std::size_t> input_dim() const;
  /// Logistic: (a, b_1..b_d). Linear basis: coefficients. Constant: (c).
  std::span<const double> parameters() const { return params_; }
  const std::shared_ptr<const BasisSet>& basis() const { return basis_; }

  double intercept() const;            // logistic only
  std::span<const double> slopes() const;  // logistic only

  double operator()(std::span<const double> x) const;

  /// f at every row of `inputs`. Identical arithmetic is used for every
  /// caller, so two models with equal parameters give bit-equal outputs.
  void evaluate_rows(const InputMatrix& inputs, std::span<double> out) const;
  std::vector<double> evaluate_rows(const InputMatrix& inputs) const;

  friend bool operator==(const RegressionModel& lhs, const RegressionModel& rhs);

 private:
  RegressionModel(ModelFamily family, std::vector<double> params,
                  std::shared_ptr<const BasisSet> basis);
  void check_dim(std::size_t given) const;

  ModelFamily family_;
  std::vector<double> params_;
  std::shared_ptr<const BasisSet> basis_;
};

double evaluate_model(const RegressionModel& model, std::span<const double> x);

/// The regression function tanh(x) = logistic(a = 0, b = 2).
RegressionModel true_logistic_model();

}  // namespace dfcr
