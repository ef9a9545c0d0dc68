#include <string>

#include "dfcr/ellipsoid.hpp"

namespace dfcr {

EllipsoidRegion::EllipsoidRegion(Eigen::VectorXd center, Eigen::MatrixXd shape, double radius)
    : center_(std::move(center)), shape_(std::move(shape)), radius_(radius) {
  const auto p = center_.size();
  if (p == 0 || shape_.rows() != p || shape_.cols() != p)
    throw std::invalid_argument("EllipsoidRegion: shape must be a square matrix matching center");
  if (!(radius_ > 0.0)) throw std::invalid_argument("EllipsoidRegion: radius must be > 0");
  const double scale = std::max(shape_.cwiseAbs().maxCoeff(), 1e-300);
  if ((shape_ - shape_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("EllipsoidRegion: shape matrix is not symmetric");
}

double EllipsoidRegion::quadratic_form(std::span<const double> theta) const {
  if (theta.size() != dim())
    throw std::invalid_argument("ellipsoid: parameter dimension " + std::to_string(theta.size()) +
                                " does not match region dimension " + std::to_string(dim()));
  const Eigen::VectorXd diff =
      Eigen::Map<const Eigen::VectorXd>(theta.data(), theta.size()) - center_;
  return diff.dot(shape_ * diff);
}

bool EllipsoidRegion::contains(std::span<const double> theta) const {
  return quadratic_form(theta) <= radius_;
}

bool ellipsoid_contains(const EllipsoidRegion& region, std::span<const double> theta) {
  return region.contains(theta);
}

Eigen::VectorXd ellipsoid_coordinates(const RegressionModel& logistic) {
  const auto slopes = logistic.slopes();
  Eigen::VectorXd v(slopes.size() + 1);
  for (std::size_t k = 0; k < slopes.size(); ++k) v(k) = slopes[k];
  v(slopes.size()) = logistic.intercept();
  return v;
}

EllipsoidRegion build_ellipsoid(const LabeledSample& train, double delta,
                                const MleSettings& settings) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("build_ellipsoid: delta must lie in (0, 1)");
  const MleFit fit = logistic_mle_fit(train, settings);
  if (fit.separated)
    throw FitError("build_ellipsoid: the sample is (quasi-)separated and the MLE does not exist; "
                   "use a larger n or report the regularised fit instead");
  const LogLikelihood ll = logistic_log_likelihood(train, fit.model.parameters());

  // Reorder (a, b) -> (b, a).
  const auto p = static_cast<Eigen::Index>(train.dim() + 1);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(p);
  for (Eigen::Index i = 0; i + 1 < p; ++i) perm.indices()(i) = static_cast<int>(i + 1);
  perm.indices()(p - 1) = 0;
  // perm maps ellipsoid coordinate i to parameter index perm(i).
  Eigen::MatrixXd info(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      info(i, j) = -ll.hessian(perm.indices()(i), perm.indices()(j));
  info = 0.5 * (info + info.transpose());

  return EllipsoidRegion(ellipsoid_coordinates(fit.model), std::move(info),
                         chi2_quantile(1.0 - delta, static_cast<int>(p)));
}

}  // namespace dfcr
