#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dfcr/estimators.hpp"
#include "dfcr/kernels.hpp"

namespace dfcr {
namespace {

// The k smallest (distance, index) pairs, nearest first.
void select_nearest(std::span<const double> dist, std::size_t k, std::vector<std::size_t>& idx) {
  idx.resize(dist.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto closer = [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  };
  if (k < idx.size()) std::nth_element(idx.begin(), idx.begin() + k, idx.end(), closer);
  idx.resize(k);
  std::sort(idx.begin(), idx.end(), closer);
}

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k > n)
    throw std::invalid_argument("knn: k must satisfy 1 <= k <= n, given k=" + std::to_string(k) +
                                " n=" + std::to_string(n));
}

}  // namespace

std::size_t default_k(std::size_t n, double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::invalid_argument("default_k: alpha must lie in (0.5, 1), given " +
                                std::to_string(alpha));
  // The small offset keeps exact powers such as 1024^0.7 = 128 from rounding down.
  const double k = std::floor(std::pow(static_cast<double>(n), alpha) + 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

double knn_predict(const LabeledSample& train, std::size_t k, std::span<const double> x) {
  check_k(k, train.size());
  if (x.size() != train.dim())
    throw std::invalid_argument("knn_predict: query has dimension " + std::to_string(x.size()) +
                                ", training inputs have " + std::to_string(train.dim()));
  std::vector<double> dist(train.size());
  kernels::squared_distances(train.inputs().data(), train.dim(), x, dist);
  std::vector<std::size_t> idx;
  select_nearest(dist, k, idx);
  double sum = 0.0;
  for (std::size_t j : idx) sum += train.labels()[j];
  return sum / static_cast<double>(k);
}

NeighborTable::NeighborTable(const InputMatrix& inputs, std::size_t k) : k_(k) {
  const std::size_t n = inputs.rows();
  check_k(k, n);
  const std::size_t d = inputs.dim();

  std::vector<std::size_t> position;
  if (d == 1) {
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    const auto x = inputs.column(0);
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return x[a] < x[b] || (x[a] == x[b] && a < b);
    });
    position.resize(n);
    for (std::size_t r = 0; r < n; ++r) position[order_[r]] = r;
  }

  window_start_.assign(n, kNoWindow);
  explicit_row_.assign(n, kNoWindow);
  std::vector<double> dist(n);
  std::vector<double> query(d);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) query[c] = inputs(i, c);
    kernels::squared_distances(inputs.data(), d, query, dist);
    select_nearest(dist, k, idx);
    if (d == 1) {
      std::size_t lo = n, hi = 0;
      for (std::size_t j : idx) {
        lo = std::min(lo, position[j]);
        hi = std::max(hi, position[j]);
      }
      if (hi - lo + 1 == k) {
        window_start_[i] = lo;
        continue;
      }
    }
    explicit_row_[i] = explicit_.size() / k;
    explicit_.insert(explicit_.end(), idx.begin(), idx.end());
  }
}

std::vector<std::size_t> NeighborTable::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  if (window_start_[i] != kNoWindow) {
    out.assign(order_.begin() + window_start_[i], order_.begin() + window_start_[i] + k_);
  } else {
    const auto base = explicit_.begin() + explicit_row_[i] * k_;
    out.assign(base, base + k_);
  }
  return out;
}

void NeighborTable::average(std::span<const double> labels, std::span<double> out) const {
  const std::size_t n = window_start_.size();
  if (labels.size() != n || out.size() != n)
    throw std::invalid_argument("NeighborTable::average: label count does not match the table");
  // Label sums are small integers, so the window and explicit routes agree exactly.
  std::vector<double> prefix;
  if (!order_.empty()) {
    prefix.resize(n + 1);
    prefix[0] = 0.0;
    for (std::size_t r = 0; r < n; ++r) prefix[r + 1] = prefix[r] + labels[order_[r]];
  }
  const double kd = static_cast<double>(k_);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    if (window_start_[i] != kNoWindow) {
      sum = prefix[window_start_[i] + k_] - prefix[window_start_[i]];
    } else {
      const std::size_t* row = explicit_.data() + explicit_row_[i] * k_;
      for (std::size_t c = 0; c < k_; ++c) sum += labels[row[c]];
    }
    out[i] = sum / kd;
  }
}

}  // namespace dfcr
