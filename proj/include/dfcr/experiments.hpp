#pragma once

// Synthetic scenarios, parameter-grid rank maps, Monte Carlo coverage studies
// and shrinkage curves.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dfcr/core.hpp"
#include "dfcr/ellipsoid.hpp"
#include "dfcr/estimators.hpp"
#include "dfcr/rng.hpp"

namespace dfcr {

enum class Scenario { gaussian_mixture, uniform_input };

std::string to_string(Scenario scenario);
/// "gaussian-mixture" or "uniform-input"; throws std::invalid_argument otherwise.
Scenario parse_scenario(const std::string& name);

struct ScenarioConfig {
  Scenario scenario = Scenario::gaussian_mixture;
  std::size_t n = 500;
  std::uint64_t master_seed = 0;
  double true_a = 0.0;
  double true_b = 2.0;

  RegressionModel true_model() const { return RegressionModel::logistic(true_a, {true_b}); }
  void validate() const;
};

/// Y fair +-1 coin, X | Y ~ Normal(Y, 1). E[Y | X = x] = tanh(x).
LabeledSample gen_gaussian_mixture(std::size_t n, RngStream stream);
/// X ~ Uniform(-1, 1), Y = sign(tanh(X) + U) with U ~ Uniform(-1, 1).
LabeledSample gen_uniform_input(std::size_t n, RngStream stream);
LabeledSample generate_sample(Scenario scenario, std::size_t n, RngStream stream);

/// Rectangular lattice over (a, b): a_i = a_min + i (a_max - a_min) / (res - 1),
/// likewise b_j. With res = 1 the lattice is the single point (a_min, b_min).
struct GridSpec {
  double a_min = -2.0, a_max = 2.0;
  double b_min = -1.0, b_max = 5.0;
  int resolution = 81;

  void validate() const;
  double a(int i) const;
  double b(int j) const;
  std::size_t cells() const { return static_cast<std::size_t>(resolution) * resolution; }
};

struct RankMapMeta {
  std::string engine;
  Scenario scenario = Scenario::gaussian_mixture;
  int m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  /// Neighbour count, kNN only.
  std::optional<std::size_t> k;
};

/// values[i * res + j] is the relative rank psi / m of (a_i, b_j).
struct RankMap {
  GridSpec grid;
  std::vector<double> values;
  RankMapMeta meta;
  /// (a, b) of the original-sample fit when the engine yields a logistic model.
  std::optional<std::pair<double, double>> point_estimate;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.resolution + j]; }
};

/// One sample and one stem (window q1 = 1, q2 = m - 1) drawn from the master
/// seed, reused for every grid cell.
RankMap rank_map(const ScenarioConfig& config, const RankingEngine& engine, int m,
                 const GridSpec& grid, unsigned workers = 1);

/// A resampling engine or the asymptotic ellipsoid.
struct CoverageMethod {
  std::optional<RankingEngine> engine;
  double delta = 0.05;
  MleSettings ellipsoid_settings;

  static CoverageMethod resampling(RankingEngine engine);
  static CoverageMethod ellipsoid(double delta);
  bool is_ellipsoid() const { return !engine.has_value(); }
  std::string name() const;
};

struct CoverageReport {
  std::string method;
  Scenario scenario = Scenario::gaussian_mixture;
  std::size_t n = 0;
  /// Zero for the ellipsoid.
  int m = 0;
  int q = 0;
  std::size_t requested = 0;
  /// Completed trials; failed trials are excluded from the denominator.
  std::size_t trials = 0;
  std::size_t hits = 0;
  std::size_t excluded = 0;
  double nominal = 0.0;

  double level() const { return trials ? static_cast<double>(hits) / trials : 0.0; }
};

/// Trial t draws its sample and stem from streams derived from
/// (master seed, t), so hit counts do not depend on the worker count.
CoverageReport coverage_mc(const ScenarioConfig& config, const CoverageMethod& method, int m,
                           int q, std::size_t trials, unsigned workers = 1);

struct ShrinkageRow {
  std::size_t n = 0;
  std::size_t repeats = 0;
  /// Mean over repeats of the fraction of grid cells accepted.
  double accepted_fraction = 0.0;
};

/// config.n is ignored; each entry of n_list gets `repeats` fresh samples and
/// stems with window q1 = 1, q2 = q.
std::vector<ShrinkageRow> shrinkage_curve(const ScenarioConfig& config,
                                          const RankingEngine& engine, int m, int q,
                                          const std::vector<std::size_t>& n_list,
                                          const GridSpec& grid, std::size_t repeats,
                                          unsigned workers = 1);

/// Streams used by the experiments, exposed so tests can replay a trial.
RngStream sample_stream(std::uint64_t master_seed, std::uint64_t task, std::uint64_t index);
RngStream stem_stream(std::uint64_t master_seed, std::uint64_t task, std::uint64_t index);

}  // namespace dfcr
