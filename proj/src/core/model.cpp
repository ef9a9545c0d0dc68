#include <algorithm>
#include <cmath>
#include <string>

#include "dfcr/core.hpp"
#include "dfcr/kernels.hpp"

namespace dfcr {

BasisSet::BasisSet(std::size_t input_dim, std::vector<Function> functions, std::string name)
    : input_dim_(input_dim), functions_(std::move(functions)), name_(std::move(name)) {
  if (input_dim_ == 0) throw std::invalid_argument("BasisSet: input dimension must be >= 1");
  if (functions_.empty()) throw std::invalid_argument("BasisSet: at least one function required");
}

std::shared_ptr<const BasisSet> legendre_basis(int degree) {
  if (degree < 0) throw std::invalid_argument("legendre_basis: degree must be >= 0");
  std::vector<BasisSet::Function> fns;
  for (int k = 0; k <= degree; ++k) {
    fns.emplace_back([k](std::span<const double> x) {
      // Bonnet recursion
      double prev = 1.0, cur = x[0];
      if (k == 0) return prev;
      for (int j = 1; j < k; ++j) {
        const double next = ((2.0 * j + 1.0) * x[0] * cur - j * prev) / (j + 1.0);
        prev = cur;
        cur = next;
      }
      return cur;
    });
  }
  return std::make_shared<const BasisSet>(1, std::move(fns), "legendre" + std::to_string(degree));
}

std::shared_ptr<const BasisSet> constant_basis(std::size_t dim) {
  return std::make_shared<const BasisSet>(
      dim, std::vector<BasisSet::Function>{[](std::span<const double>) { return 1.0; }},
      "constant");
}

std::string to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::logistic: return "logistic";
    case ModelFamily::linear_basis: return "linear-basis";
    case ModelFamily::constant: return "constant";
  }
  return "unknown";
}

RegressionModel::RegressionModel(ModelFamily family, std::vector<double> params,
                                 std::shared_ptr<const BasisSet> basis)
    : family_(family), params_(std::move(params)), basis_(std::move(basis)) {}

RegressionModel RegressionModel::logistic(double intercept, std::vector<double> slopes) {
  if (slopes.empty()) throw std::invalid_argument("logistic model: needs at least one slope");
  std::vector<double> params;
  params.reserve(slopes.size() + 1);
  params.push_back(intercept);
  params.insert(params.end(), slopes.begin(), slopes.end());
  return RegressionModel(ModelFamily::logistic, std::move(params), nullptr);
}

RegressionModel RegressionModel::linear_basis(std::shared_ptr<const BasisSet> basis,
                                              std::vector<double> coefficients) {
  if (!basis) throw std::invalid_argument("linear-basis model: basis is null");
  if (coefficients.size() != basis->size())
    throw std::invalid_argument("linear-basis model: " + std::to_string(coefficients.size()) +
                                " coefficients for a basis of size " +
                                std::to_string(basis->size()));
  return RegressionModel(ModelFamily::linear_basis, std::move(coefficients), std::move(basis));
}

RegressionModel RegressionModel::constant(double value) {
  if (!(value >= -1.0 && value <= 1.0))
    throw std::invalid_argument("constant model: value must lie in [-1, 1]");
  return RegressionModel(ModelFamily::constant, {value}, nullptr);
}

std::optional<std::size_t> RegressionModel::input_dim() const {
  switch (family_) {
    case ModelFamily::logistic: return params_.size() - 1;
    case ModelFamily::linear_basis: return basis_->input_dim();
    case ModelFamily::constant: return std::nullopt;
  }
  return std::nullopt;
}

double RegressionModel::intercept() const {
  if (family_ != ModelFamily::logistic)
    throw std::logic_error("intercept() is defined for logistic models only");
  return params_[0];
}

std::span<const double> RegressionModel::slopes() const {
  if (family_ != ModelFamily::logistic)
    throw std::logic_error("slopes() is defined for logistic models only");
  return std::span<const double>(params_).subspan(1);
}

void RegressionModel::check_dim(std::size_t given) const {
  const auto expected = input_dim();
  if (expected && *expected != given)
    throw std::invalid_argument(to_string(family_) + " model expects input dimension " +
                                std::to_string(*expected) + ", given " + std::to_string(given));
}

double RegressionModel::operator()(std::span<const double> x) const {
  check_dim(x.size());
  switch (family_) {
    case ModelFamily::logistic: {
      double z = params_[0];
      for (std::size_t k = 0; k < x.size(); ++k) z += params_[k + 1] * x[k];
      const double e = std::exp(-std::fabs(z));
      const double mag = (1.0 - e) / (1.0 + e);
      return z >= 0.0 ? mag : -mag;
    }
    case ModelFamily::linear_basis: {
      double sum = 0.0;
      for (std::size_t k = 0; k < params_.size(); ++k) sum += params_[k] * (*basis_)(k, x);
      return std::clamp(sum, -1.0, 1.0);
    }
    case ModelFamily::constant: return params_[0];
  }
  return 0.0;
}

void RegressionModel::evaluate_rows(const InputMatrix& inputs, std::span<double> out) const {
  check_dim(inputs.dim());
  if (out.size() != inputs.rows())
    throw std::invalid_argument("evaluate_rows: output length does not match row count");
  switch (family_) {
    case ModelFamily::logistic: {
      kernels::affine(inputs.data(), inputs.dim(), slopes(), params_[0], out);
      kernels::logistic_pm1(out, out);
      return;
    }
    case ModelFamily::linear_basis: {
      std::vector<double> x(inputs.dim());
      for (std::size_t i = 0; i < inputs.rows(); ++i) {
        for (std::size_t k = 0; k < inputs.dim(); ++k) x[k] = inputs(i, k);
        out[i] = (*this)(x);
      }
      return;
    }
    case ModelFamily::constant: std::fill(out.begin(), out.end(), params_[0]); return;
  }
}

std::vector<double> RegressionModel::evaluate_rows(const InputMatrix& inputs) const {
  std::vector<double> out(inputs.rows());
  evaluate_rows(inputs, out);
  return out;
}

bool operator==(const RegressionModel& lhs, const RegressionModel& rhs) {
  return lhs.family_ == rhs.family_ && lhs.params_ == rhs.params_ && lhs.basis_ == rhs.basis_;
}

double evaluate_model(const RegressionModel& model, std::span<const double> x) { return model(x); }

RegressionModel true_logistic_model() { return RegressionModel::logistic(0.0, {2.0}); }

}  // namespace dfcr
