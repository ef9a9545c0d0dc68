#include <cmath>
#include <sstream>

#include "dfcr/estimators.hpp"
#include "dfcr/kernels.hpp"

namespace dfcr {
namespace {

class BernoulliProblem {
 public:
  BernoulliProblem(const InputMatrix& inputs, std::span<const double> labels)
      : inputs_(inputs), t_(labels.size()), z_(labels.size()), score_(labels.size()),
        weight_(labels.size()) {
    if (labels.size() != inputs.rows())
      throw std::invalid_argument("logistic MLE: label count does not match input rows");
    for (std::size_t i = 0; i < labels.size(); ++i) t_[i] = labels[i] > 0.0 ? 1.0 : 0.0;
  }

  std::size_t n() const { return t_.size(); }
  std::size_t p() const { return inputs_.dim() + 1; }

  /// Log-likelihood minus (ridge / 2) |theta|^2, with gradient and Hessian.
  LogLikelihood evaluate(const Eigen::VectorXd& theta, double ridge, bool derivatives = true) {
    const auto& k = kernels::active();
    const std::size_t d = inputs_.dim();
    k.affine(inputs_.data().data(), n(), d, theta.data() + 1, theta(0), z_.data());
    double value = k.bernoulli_terms(z_.data(), t_.data(), n(), score_.data(), weight_.data());
    value -= 0.5 * ridge * theta.squaredNorm();
    LogLikelihood out{value, Eigen::VectorXd(), Eigen::MatrixXd()};
    if (!derivatives) return out;

    out.gradient.resize(p());
    out.hessian.resize(p(), p());
    double score_sum = 0.0, weight_sum = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
      score_sum += score_[i];
      weight_sum += weight_[i];
    }
    out.gradient(0) = score_sum;
    out.hessian(0, 0) = -weight_sum;
    for (std::size_t c = 0; c < d; ++c) {
      const double* xc = inputs_.column(c).data();
      out.gradient(c + 1) = k.dot(score_.data(), xc, n());
      out.hessian(0, c + 1) = out.hessian(c + 1, 0) = -k.dot(weight_.data(), xc, n());
      for (std::size_t e = c; e < d; ++e)
        out.hessian(c + 1, e + 1) = out.hessian(e + 1, c + 1) =
            -k.dot3(weight_.data(), xc, inputs_.column(e).data(), n());
    }
    out.gradient -= ridge * theta;
    out.hessian.diagonal().array() -= ridge;
    return out;
  }

  /// True when theta classifies every point strictly correctly, in which case
  /// scaling theta up always raises L and no finite maximiser exists.
  bool separates(const Eigen::VectorXd& theta) {
    kernels::active().affine(inputs_.data().data(), n(), inputs_.dim(), theta.data() + 1,
                             theta(0), z_.data());
    for (std::size_t i = 0; i < n(); ++i)
      if ((t_[i] > 0.5 ? z_[i] : -z_[i]) <= 0.0) return false;
    return true;
  }

 private:
  const InputMatrix& inputs_;
  std::vector<double> t_, z_, score_, weight_;
};

struct NewtonResult {
  Eigen::VectorXd theta;
  bool converged = false;
  bool degenerate = false;  // norm cap exceeded or Hessian singular
  int iterations = 0;
  double gradient_norm = 0.0;
};

NewtonResult newton(BernoulliProblem& problem, const MleSettings& settings, double ridge) {
  const double n = static_cast<double>(problem.n());
  NewtonResult res;
  res.theta = Eigen::VectorXd::Zero(problem.p());
  LogLikelihood cur = problem.evaluate(res.theta, ridge);
  for (; res.iterations < settings.max_iterations; ++res.iterations) {
    res.gradient_norm = cur.gradient.lpNorm<Eigen::Infinity>();
    if (res.gradient_norm <= settings.gradient_tolerance * n) {
      res.converged = true;
      return res;
    }
    const Eigen::MatrixXd info = -cur.hessian;
    if (ridge == 0.0) {
      const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                 info, Eigen::EigenvaluesOnly)
                                 .eigenvalues()
                                 .minCoeff();
      if (res.theta.norm() > settings.separation_cap || !(min_eig > settings.singular_threshold * n)) {
        res.degenerate = true;
        return res;
      }
    }
    const Eigen::VectorXd direction = info.ldlt().solve(cur.gradient);
    // Near the optimum the full step can lose an ulp of L; treat that as no loss.
    const double slack = 1e-12 * (1.0 + std::fabs(cur.value));
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const Eigen::VectorXd next = res.theta + t * direction;
      LogLikelihood cand = problem.evaluate(next, ridge, false);
      if (std::isfinite(cand.value) && cand.value >= cur.value - slack) {
        res.theta = next;
        cur = problem.evaluate(res.theta, ridge);
        moved = true;
        break;
      }
    }
    if (!moved) {
      // No ascent left at working precision: accept if the score is small.
      res.converged = res.gradient_norm <= 1e-6 * n;
      return res;
    }
  }
  res.gradient_norm = cur.gradient.lpNorm<Eigen::Infinity>();
  res.converged = res.gradient_norm <= settings.gradient_tolerance * n;
  return res;
}

RegressionModel to_model(const Eigen::VectorXd& theta) {
  return RegressionModel::logistic(theta(0),
                                   std::vector<double>(theta.data() + 1, theta.data() + theta.size()));
}

}  // namespace

ConvergenceError::ConvergenceError(std::vector<double> last_iterate, double gradient_norm)
    : FitError([&] {
        std::ostringstream os;
        os << "logistic MLE: iteration cap reached with |grad L|_inf = " << gradient_norm
           << " at (";
        for (std::size_t i = 0; i < last_iterate.size(); ++i)
          os << (i ? ", " : "") << last_iterate[i];
        os << ")";
        return os.str();
      }()),
      last_iterate_(std::move(last_iterate)),
      gradient_norm_(gradient_norm) {}

LogLikelihood logistic_log_likelihood(const LabeledSample& train, std::span<const double> params) {
  if (params.size() != train.dim() + 1)
    throw std::invalid_argument("logistic_log_likelihood: expected " +
                                std::to_string(train.dim() + 1) + " parameters");
  BernoulliProblem problem(train.inputs(), train.labels());
  const Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(params.data(), params.size());
  return problem.evaluate(theta, 0.0);
}

MleFit logistic_mle_fit(const InputMatrix& inputs, std::span<const double> labels,
                        const MleSettings& settings) {
  if (settings.max_iterations < 1 || !(settings.ridge > 0.0))
    throw std::invalid_argument("logistic MLE: iteration cap and ridge must be positive");
  BernoulliProblem problem(inputs, labels);
  NewtonResult plain = newton(problem, settings, 0.0);
  if (plain.converged && plain.theta.norm() <= settings.separation_cap &&
      !problem.separates(plain.theta))
    return MleFit{to_model(plain.theta), false, plain.iterations, plain.gradient_norm};
  if (!plain.converged && !plain.degenerate && !(plain.theta.norm() > settings.separation_cap))
    throw ConvergenceError(std::vector<double>(plain.theta.data(),
                                               plain.theta.data() + plain.theta.size()),
                           plain.gradient_norm);

  NewtonResult ridge = newton(problem, settings, settings.ridge);
  if (!ridge.converged)
    throw ConvergenceError(std::vector<double>(ridge.theta.data(),
                                               ridge.theta.data() + ridge.theta.size()),
                           ridge.gradient_norm);
  return MleFit{to_model(ridge.theta), true, plain.iterations + ridge.iterations,
                ridge.gradient_norm};
}

MleFit logistic_mle_fit(const LabeledSample& train, const MleSettings& settings) {
  return logistic_mle_fit(train.inputs(), train.labels(), settings);
}

}  // namespace dfcr
