#include <string>

#include "dfcr/core.hpp"

namespace dfcr {

FitError::FitError(const std::string& what, std::optional<std::size_t> dataset)
    : std::runtime_error(dataset ? "dataset " + std::to_string(*dataset) + ": " + what : what),
      dataset_(dataset) {}

InputMatrix::InputMatrix(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

InputMatrix InputMatrix::from_points(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw std::invalid_argument("InputMatrix: at least one point is required");
  const std::size_t dim = points.front().size();
  if (dim == 0) throw std::invalid_argument("InputMatrix: points must have dimension >= 1");
  InputMatrix m(points.size(), dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim)
      throw std::invalid_argument("InputMatrix: point " + std::to_string(i) + " has dimension " +
                                  std::to_string(points[i].size()) + ", expected " +
                                  std::to_string(dim));
    for (std::size_t k = 0; k < dim; ++k) m(i, k) = points[i][k];
  }
  return m;
}

InputMatrix InputMatrix::from_1d(std::span<const double> xs) {
  InputMatrix m(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) m(i, 0) = xs[i];
  return m;
}

std::vector<double> InputMatrix::point(std::size_t i) const {
  std::vector<double> p(dim_);
  for (std::size_t k = 0; k < dim_; ++k) p[k] = (*this)(i, k);
  return p;
}

LabeledSample::LabeledSample(InputMatrix inputs, std::vector<double> labels)
    : inputs_(std::move(inputs)), labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("LabeledSample: n must be >= 1");
  if (inputs_.dim() == 0) throw std::invalid_argument("LabeledSample: d must be >= 1");
  if (inputs_.rows() != labels_.size())
    throw std::invalid_argument("LabeledSample: " + std::to_string(inputs_.rows()) +
                                " inputs but " + std::to_string(labels_.size()) + " labels");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0)
      throw std::invalid_argument("LabeledSample: label " + std::to_string(i) +
                                  " is not -1 or +1");
  }
}

LabeledSample LabeledSample::from_1d(std::span<const double> xs, std::span<const double> labels) {
  return LabeledSample(InputMatrix::from_1d(xs), std::vector<double>(labels.begin(), labels.end()));
}

}  // namespace dfcr
