#include <cmath>
#include <sstream>

#include "dfcr/estimators.hpp"
#include "dfcr/kernels.hpp"

namespace dfcr {
namespace {

// Residuals r = f - y and activation slopes s = df/dz at one parameter vector.
struct LsqState {
  std::vector<double> params;  // (a, b_1..b_d)
  double loss = 0.0;           // mean squared residual
  std::vector<double> resid, slope;
};

class LsqProblem {
 public:
  LsqProblem(const InputMatrix& inputs, std::span<const double> labels)
      : inputs_(inputs), labels_(labels), z_(labels.size()) {
    if (labels.size() != inputs.rows())
      throw std::invalid_argument("perceptron: label count does not match input rows");
  }

  std::size_t n() const { return labels_.size(); }
  std::size_t p() const { return inputs_.dim() + 1; }

  void evaluate(LsqState& s) {
    const auto& k = kernels::active();
    s.resid.resize(n());
    s.slope.resize(n());
    k.affine(inputs_.data().data(), n(), inputs_.dim(), s.params.data() + 1, s.params[0],
             z_.data());
    s.loss = k.lsq_terms(z_.data(), labels_.data(), n(), s.resid.data(), s.slope.data()) /
             static_cast<double>(n());
  }

  // Gradient of the mean loss: (2/n) sum r s (1, x).
  Eigen::VectorXd gradient(const LsqState& s) const {
    const auto& k = kernels::active();
    Eigen::VectorXd g(p());
    const double scale = 2.0 / static_cast<double>(n());
    g(0) = scale * k.dot(s.resid.data(), s.slope.data(), n());
    for (std::size_t c = 0; c < inputs_.dim(); ++c)
      g(c + 1) = scale * k.dot3(s.resid.data(), s.slope.data(), inputs_.column(c).data(), n());
    return g;
  }

  // Gauss-Newton matrix of the mean loss: (2/n) sum s^2 (1, x)(1, x)^T.
  Eigen::MatrixXd gauss_newton(const LsqState& s) {
    const auto& k = kernels::active();
    w_.resize(n());
    for (std::size_t i = 0; i < n(); ++i) w_[i] = s.slope[i] * s.slope[i];
    const double scale = 2.0 / static_cast<double>(n());
    Eigen::MatrixXd a(p(), p());
    double total = 0.0;
    for (double v : w_) total += v;
    a(0, 0) = scale * total;
    for (std::size_t c = 0; c < inputs_.dim(); ++c) {
      const double* xc = inputs_.column(c).data();
      a(0, c + 1) = a(c + 1, 0) = scale * k.dot(w_.data(), xc, n());
      for (std::size_t e = c; e < inputs_.dim(); ++e)
        a(c + 1, e + 1) = a(e + 1, c + 1) =
            scale * k.dot3(w_.data(), xc, inputs_.column(e).data(), n());
    }
    return a;
  }

 private:
  const InputMatrix& inputs_;
  std::span<const double> labels_;
  std::vector<double> z_, w_;
};

[[noreturn]] void non_finite(int iteration, const std::vector<double>& params) {
  std::ostringstream os;
  os << "perceptron: non-finite loss or gradient at iteration " << iteration << ", iterate (";
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? ", " : "") << params[i];
  os << ")";
  throw FitError(os.str());
}

bool finite(const LsqState& s) {
  if (!std::isfinite(s.loss)) return false;
  for (double v : s.params)
    if (!std::isfinite(v)) return false;
  return true;
}

RegressionModel to_model(const std::vector<double>& params) {
  return RegressionModel::logistic(params[0],
                                   std::vector<double>(params.begin() + 1, params.end()));
}

PerceptronFit fit_gradient_descent(LsqProblem& problem, const PerceptronSettings& settings) {
  LsqState cur;
  cur.params.assign(problem.p(), 0.0);
  problem.evaluate(cur);
  Eigen::VectorXd grad = problem.gradient(cur);
  double step = settings.step;
  LsqState trial;
  int it = 0;
  for (; it < settings.max_iterations; ++it) {
    if (!grad.allFinite()) non_finite(it, cur.params);
    if (grad.lpNorm<Eigen::Infinity>() <= settings.gradient_tolerance) break;
    trial.params = cur.params;
    for (std::size_t c = 0; c < problem.p(); ++c) trial.params[c] -= step * grad(c);
    problem.evaluate(trial);
    if (!finite(trial)) non_finite(it, trial.params);
    if (trial.loss > cur.loss) {
      step *= 0.5;
      continue;
    }
    std::swap(cur, trial);
    grad = problem.gradient(cur);
  }
  return PerceptronFit{to_model(cur.params), cur.loss, it};
}

// Levenberg-Marquardt on the mean squared loss; only loss-decreasing steps
// are taken, so the returned loss never exceeds the loss at zero.
PerceptronFit fit_levenberg_marquardt(LsqProblem& problem, const PerceptronSettings& settings) {
  LsqState cur;
  cur.params.assign(problem.p(), 0.0);
  problem.evaluate(cur);
  Eigen::VectorXd grad = problem.gradient(cur);
  Eigen::MatrixXd gn = problem.gauss_newton(cur);
  double damping = 1e-3;
  LsqState trial;
  int it = 0;
  for (; it < settings.max_iterations; ++it) {
    if (!grad.allFinite() || !gn.allFinite()) non_finite(it, cur.params);
    if (grad.lpNorm<Eigen::Infinity>() <= settings.gradient_tolerance) break;
    Eigen::MatrixXd lhs = gn;
    for (std::size_t c = 0; c < problem.p(); ++c) lhs(c, c) += damping * (gn(c, c) + 1e-12);
    const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
    trial.params = cur.params;
    for (std::size_t c = 0; c < problem.p(); ++c) trial.params[c] += step(c);
    problem.evaluate(trial);
    if (!finite(trial)) non_finite(it, trial.params);
    if (trial.loss < cur.loss) {
      const bool stalled = cur.loss - trial.loss <= 1e-14 * cur.loss;
      std::swap(cur, trial);
      grad = problem.gradient(cur);
      gn = problem.gauss_newton(cur);
      damping = std::max(damping * 0.1, 1e-12);
      if (stalled) {
        ++it;
        break;  // converged to working precision
      }
    } else {
      damping *= 10.0;
      if (damping > 1e12) break;  // no descent direction left at working precision
    }
  }
  return PerceptronFit{to_model(cur.params), cur.loss, it};
}

}  // namespace

PerceptronSettings PerceptronSettings::gradient_descent() {
  PerceptronSettings s;
  s.optimizer = Optimizer::gradient_descent;
  s.max_iterations = 2000;
  s.step = 0.1;
  return s;
}

LossGradient perceptron_loss(const LabeledSample& train, std::span<const double> params) {
  if (params.size() != train.dim() + 1)
    throw std::invalid_argument("perceptron_loss: expected " + std::to_string(train.dim() + 1) +
                                " parameters");
  LsqProblem problem(train.inputs(), train.labels());
  LsqState s;
  s.params.assign(params.begin(), params.end());
  problem.evaluate(s);
  const Eigen::VectorXd g = problem.gradient(s);
  return LossGradient{s.loss, std::vector<double>(g.data(), g.data() + g.size())};
}

PerceptronFit perceptron_fit(const InputMatrix& inputs, std::span<const double> labels,
                             const PerceptronSettings& settings) {
  if (settings.max_iterations < 1 || !(settings.step > 0.0))
    throw std::invalid_argument("perceptron: iteration cap and step must be positive");
  LsqProblem problem(inputs, labels);
  if (settings.optimizer == PerceptronSettings::Optimizer::gradient_descent)
    return fit_gradient_descent(problem, settings);
  return fit_levenberg_marquardt(problem, settings);
}

PerceptronFit perceptron_fit(const LabeledSample& train, const PerceptronSettings& settings) {
  return perceptron_fit(train.inputs(), train.labels(), settings);
}

}  // namespace dfcr
