#pragma once

// Asymptotic normal-theory confidence ellipsoid around the logistic MLE, and
// the chi-square quantile it needs.

#include <Eigen/Dense>

#include <span>

#include "dfcr/core.hpp"
#include "dfcr/estimators.hpp"

namespace dfcr {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double regularized_gamma_p(double a, double x);
/// CDF of the chi-square distribution with `dof` degrees of freedom.
double chi2_cdf(double x, int dof);
/// x with chi2_cdf(x, dof) = p, found by bisection.
double chi2_quantile(double p, int dof);

/// {theta : (theta - center)^T shape (theta - center) <= radius}.
/// Parameter vectors are ordered (b_1..b_d, a): slopes first, intercept last.
class EllipsoidRegion {
 public:
  EllipsoidRegion(Eigen::VectorXd center, Eigen::MatrixXd shape, double radius);

  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }
  double radius() const { return radius_; }
  std::size_t dim() const { return static_cast<std::size_t>(center_.size()); }

  double quadratic_form(std::span<const double> theta) const;
  /// Closed region: the boundary belongs to it.
  bool contains(std::span<const double> theta) const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
  double radius_;
};

/// Center: logistic MLE. Shape: the observed information -d^2 L at the MLE
/// (analytic). Radius: the (1 - delta) quantile of chi^2(d + 1).
/// Throws FitError when the data are separated.
EllipsoidRegion build_ellipsoid(const LabeledSample& train, double delta,
                                const MleSettings& settings = {});

bool ellipsoid_contains(const EllipsoidRegion& region, std::span<const double> theta);

/// (b_1..b_d, a) of a logistic model.
Eigen::VectorXd ellipsoid_coordinates(const RegressionModel& logistic);

}  // namespace dfcr
