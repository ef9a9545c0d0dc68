#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "dfcr/candidate_test.hpp"
#include "dfcr/experiments.hpp"

namespace dfcr {
namespace {

constexpr std::uint64_t kRankMapTask = 1;
constexpr std::uint64_t kCoverageTask = 2;
constexpr std::uint64_t kShrinkageTask = 3;

// Runs body(begin, end) over contiguous chunks of [0, count). The first
// exception in chunk order is rethrown after all workers have joined.
void parallel_chunks(std::size_t count, unsigned workers,
                     const std::function<void(std::size_t, std::size_t, unsigned)>& body) {
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
  const auto w = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (w == 1) {
    body(0, count, 0);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (unsigned t = 0; t < w; ++t) {
    const std::size_t begin = count * t / w;
    const std::size_t end = count * (t + 1) / w;
    threads.emplace_back([&, t, begin, end] {
      try {
        body(begin, end, t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string cell_label(double a, double b) {
  std::ostringstream os;
  os.precision(6);
  os << "grid cell (a=" << a << ", b=" << b << "): ";
  return os.str();
}

// Relative ranks of every grid cell against one prepared engine and stem.
void rank_cells(const PreparedEngine& prepared, const StemRandomness& stem, const GridSpec& grid,
                std::size_t begin, std::size_t end, std::vector<int>& ranks) {
  const int res = grid.resolution;
  for (std::size_t c = begin; c < end; ++c) {
    const int i = static_cast<int>(c / res);
    const int j = static_cast<int>(c % res);
    const double a = grid.a(i), b = grid.b(j);
    try {
      ranks[c] = test_candidate(RegressionModel::logistic(a, {b}), stem, prepared).rank;
    } catch (const FitError& e) {
      throw FitError(cell_label(a, b) + e.what());
    }
  }
}

void check_m(int m) {
  if (m < 2) throw std::invalid_argument("m must be >= 2, given " + std::to_string(m));
}

}  // namespace

void GridSpec::validate() const {
  if (resolution < 1)
    throw std::invalid_argument("grid resolution must be >= 1, given " + std::to_string(resolution));
  for (double v : {a_min, a_max, b_min, b_max})
    if (!std::isfinite(v)) throw std::invalid_argument("grid limits must be finite");
  if (resolution > 1 && (!(a_min < a_max) || !(b_min < b_max)))
    throw std::invalid_argument("grid limits must satisfy a_min < a_max and b_min < b_max");
}

double GridSpec::a(int i) const {
  return resolution == 1 ? a_min : a_min + i * (a_max - a_min) / (resolution - 1);
}

double GridSpec::b(int j) const {
  return resolution == 1 ? b_min : b_min + j * (b_max - b_min) / (resolution - 1);
}

RankMap rank_map(const ScenarioConfig& config, const RankingEngine& engine, int m,
                 const GridSpec& grid, unsigned workers) {
  config.validate();
  grid.validate();
  check_m(m);
  const std::uint64_t seed = config.master_seed;
  const PreparedEngine prepared = [&] {
    try {
      return PreparedEngine(engine, generate_sample(config.scenario, config.n,
                                                    sample_stream(seed, kRankMapTask, 0)));
    } catch (const FitError& e) {
      throw FitError(std::string("rank map: original sample: ") + e.what());
    }
  }();
  const StemRandomness stem =
      init_stem_window(config.n, m, 1, m - 1, stem_stream(seed, kRankMapTask, 0));

  std::vector<int> ranks(grid.cells());
  parallel_chunks(grid.cells(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    rank_cells(prepared, stem, grid, begin, end, ranks);
  });

  RankMap map;
  map.grid = grid;
  map.values.resize(ranks.size());
  for (std::size_t c = 0; c < ranks.size(); ++c) map.values[c] = static_cast<double>(ranks[c]) / m;
  map.meta = RankMapMeta{engine_name(engine), config.scenario, m, config.n, seed, std::nullopt};
  if (prepared.k() > 0) map.meta.k = prepared.k();
  const auto& fit = prepared.original_model();
  if (fit && fit->family() == ModelFamily::logistic && fit->slopes().size() == 1)
    map.point_estimate = std::make_pair(fit->intercept(), fit->slopes()[0]);
  return map;
}

CoverageMethod CoverageMethod::resampling(RankingEngine engine) {
  CoverageMethod method;
  method.engine = std::move(engine);
  return method;
}

CoverageMethod CoverageMethod::ellipsoid(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1), given " + std::to_string(delta));
  CoverageMethod method;
  method.delta = delta;
  return method;
}

std::string CoverageMethod::name() const { return engine ? engine_name(*engine) : "ellipsoid"; }

CoverageReport coverage_mc(const ScenarioConfig& config, const CoverageMethod& method, int m,
                           int q, std::size_t trials, unsigned workers) {
  config.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!method.is_ellipsoid()) {
    check_m(m);
    if (q < 1 || q > m)
      throw std::invalid_argument("q must satisfy 1 <= q <= m, given q = " + std::to_string(q) +
                                  ", m = " + std::to_string(m));
  }
  const std::uint64_t seed = config.master_seed;
  const RegressionModel truth = config.true_model();
  const std::vector<double> truth_coords = {config.true_b, config.true_a};

  std::vector<std::size_t> hits(std::max(workers, 1u), 0), failed(std::max(workers, 1u), 0);
  parallel_chunks(trials, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    for (std::size_t t = begin; t < end; ++t) {
      const LabeledSample sample =
          generate_sample(config.scenario, config.n, sample_stream(seed, kCoverageTask, t));
      try {
        bool hit;
        if (method.is_ellipsoid()) {
          hit = build_ellipsoid(sample, method.delta, method.ellipsoid_settings)
                    .contains(truth_coords);
        } else {
          const StemRandomness stem =
              init_stem_window(config.n, m, 1, q, stem_stream(seed, kCoverageTask, t));
          hit = test_candidate(truth, sample, stem, *method.engine).accepted;
        }
        hits[w] += hit ? 1 : 0;
      } catch (const FitError&) {
        ++failed[w];
      }
    }
  });

  CoverageReport report;
  report.method = method.name();
  report.scenario = config.scenario;
  report.n = config.n;
  report.m = method.is_ellipsoid() ? 0 : m;
  report.q = method.is_ellipsoid() ? 0 : q;
  report.requested = trials;
  for (auto h : hits) report.hits += h;
  for (auto f : failed) report.excluded += f;
  report.trials = trials - report.excluded;
  report.nominal = method.is_ellipsoid() ? 1.0 - method.delta : static_cast<double>(q) / m;
  return report;
}

std::vector<ShrinkageRow> shrinkage_curve(const ScenarioConfig& config,
                                          const RankingEngine& engine, int m, int q,
                                          const std::vector<std::size_t>& n_list,
                                          const GridSpec& grid, std::size_t repeats,
                                          unsigned workers) {
  grid.validate();
  check_m(m);
  if (q < 1 || q > m)
    throw std::invalid_argument("q must satisfy 1 <= q <= m, given q = " + std::to_string(q));
  if (n_list.empty()) throw std::invalid_argument("n-list must be nonempty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw std::invalid_argument("n-list entries must be >= 1");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("n-list must be strictly increasing");
  }
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (repeats >= (1u << 24)) throw std::invalid_argument("repeats must be < 2^24");

  const std::uint64_t seed = config.master_seed;
  std::vector<ShrinkageRow> rows;
  for (std::size_t n : n_list) {
    std::vector<std::size_t> accepted(repeats, 0);
    // Repeats are the parallel unit; each is a full sweep over the grid.
    parallel_chunks(repeats, workers, [&](std::size_t begin, std::size_t end, unsigned) {
      for (std::size_t r = begin; r < end; ++r) {
        const std::uint64_t index = (static_cast<std::uint64_t>(n) << 24) | r;
        std::vector<int> ranks(grid.cells());
        try {
          const PreparedEngine prepared(
              engine, generate_sample(config.scenario, n, sample_stream(seed, kShrinkageTask, index)));
          const StemRandomness stem =
              init_stem_window(n, m, 1, q, stem_stream(seed, kShrinkageTask, index));
          rank_cells(prepared, stem, grid, 0, grid.cells(), ranks);
        } catch (const FitError& e) {
          throw FitError("shrinkage n=" + std::to_string(n) + " repeat " + std::to_string(r) +
                         ": " + e.what());
        }
        accepted[r] = static_cast<std::size_t>(
            std::count_if(ranks.begin(), ranks.end(), [&](int k) { return k <= q; }));
      }
    });
    std::size_t total = 0;
    for (auto a : accepted) total += a;
    rows.push_back(ShrinkageRow{
        n, repeats, static_cast<double>(total) / (static_cast<double>(repeats) * grid.cells())});
  }
  return rows;
}

}  // namespace dfcr
