#include <string>

#include "dfcr/estimators.hpp"

namespace dfcr {

RegressionModel linear_erm_fit(const LabeledSample& train, std::shared_ptr<const BasisSet> basis) {
  if (!basis) throw std::invalid_argument("linear_erm_fit: basis is null");
  if (basis->input_dim() != train.dim())
    throw std::invalid_argument("linear_erm_fit: basis expects dimension " +
                                std::to_string(basis->input_dim()) + ", sample has " +
                                std::to_string(train.dim()));
  const std::size_t n = train.size();
  const std::size_t cols = basis->size();
  Eigen::MatrixXd design(n, cols);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> x = train.inputs().point(i);
    for (std::size_t c = 0; c < cols; ++c) design(i, c) = (*basis)(c, x);
  }
  const Eigen::Map<const Eigen::VectorXd> y(train.labels().data(), n);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const auto rank = static_cast<std::size_t>(qr.rank());
  if (rank < cols)
    throw FitError("linear_erm_fit: design matrix is rank deficient by " +
                   std::to_string(cols - rank) + " of " + std::to_string(cols) + " columns");
  const Eigen::VectorXd coef = qr.solve(y);
  return RegressionModel::linear_basis(std::move(basis),
                                       std::vector<double>(coef.data(), coef.data() + cols));
}

}  // namespace dfcr
