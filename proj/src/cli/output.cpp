#include "dfcr/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "dfcr/kernels.hpp"

namespace dfcr::cli {
namespace fs = std::filesystem;

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, ptr);
}

std::string rank_map_csv(const RankMap& map) {
  std::string out = "a,b,relative_rank\n";
  const int res = map.grid.resolution;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      out += format_number(map.grid.a(i));
      out += ',';
      out += format_number(map.grid.b(j));
      out += ',';
      out += format_number(map.at(i, j));
      out += '\n';
    }
  return out;
}

std::string coverage_csv(const std::vector<CoverageReport>& reports) {
  std::ostringstream os;
  os << "method,n,m,q,trials,hits,coverage\n";
  for (const auto& r : reports) {
    os << r.method << ',' << r.n << ',';
    if (r.method != "ellipsoid") os << r.m;
    os << ',';
    if (r.method != "ellipsoid") os << r.q;
    os << ',' << r.trials << ',' << r.hits << ',' << format_number(r.level()) << '\n';
  }
  return os.str();
}

std::string shrinkage_csv(const std::string& method, int m, int q,
                          const std::vector<ShrinkageRow>& rows) {
  std::ostringstream os;
  os << "method,n,m,q,repeats,accepted_fraction\n";
  for (const auto& r : rows)
    os << method << ',' << r.n << ',' << m << ',' << q << ',' << r.repeats << ','
       << format_number(r.accepted_fraction) << '\n';
  return os.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  const fs::path abs = fs::absolute(path, ec);
  const std::string shown = (ec ? path : abs).string();
  if (abs.has_parent_path()) {
    fs::create_directories(abs.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory for " + shown + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + shown + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw std::runtime_error("write to " + shown + " failed");
}

void emit_csv(const RankMap& map, const fs::path& path) { write_file(path, rank_map_csv(map)); }

void emit_csv(const std::vector<CoverageReport>& reports, const fs::path& path) {
  write_file(path, coverage_csv(reports));
}

Rgb ramp_color(double relative_rank, int m) {
  // Light yellow -> teal -> dark blue.
  static constexpr double anchors[3][3] = {{255, 255, 217}, {65, 182, 196}, {8, 29, 88}};
  const double lo = 1.0 / m;
  double t = m > 1 ? (relative_rank - lo) / (1.0 - lo) : 1.0;
  t = std::clamp(t, 0.0, 1.0);
  const int seg = t < 0.5 ? 0 : 1;
  const double u = t < 0.5 ? 2.0 * t : 2.0 * t - 1.0;
  auto mix = [&](int c) {
    return static_cast<unsigned char>(
        std::lround(anchors[seg][c] + u * (anchors[seg + 1][c] - anchors[seg][c])));
  };
  return Rgb{mix(0), mix(1), mix(2)};
}

namespace {

std::optional<std::pair<int, int>> nearest_cell(const GridSpec& grid, double a, double b) {
  const int res = grid.resolution;
  auto index = [res](double v, double lo, double hi) -> std::optional<int> {
    if (v < lo || v > hi) return std::nullopt;
    if (res == 1) return 0;
    return static_cast<int>(std::lround((v - lo) / (hi - lo) * (res - 1)));
  };
  const auto i = index(a, grid.a_min, grid.a_max);
  const auto j = index(b, grid.b_min, grid.b_max);
  if (!i || !j) return std::nullopt;
  return std::make_pair(*i, *j);
}

}  // namespace

std::string heatmap_ppm(const RankMap& map, const HeatmapOptions& options) {
  const int res = map.grid.resolution;
  if (res < 1 || map.values.size() != map.grid.cells())
    throw std::invalid_argument("render_heatmap: map is empty or malformed");
  if (options.block < 1) throw std::invalid_argument("render_heatmap: block must be >= 1");
  const int block = options.block;
  const int side = res * block;
  std::vector<Rgb> pixels(static_cast<std::size_t>(side) * side);
  auto fill_cell = [&](int i, int j, Rgb color) {
    if (i < 0 || j < 0 || i >= res || j >= res) return;
    const int y0 = (res - 1 - j) * block;
    const int x0 = i * block;
    for (int y = y0; y < y0 + block; ++y)
      for (int x = x0; x < x0 + block; ++x) pixels[static_cast<std::size_t>(y) * side + x] = color;
  };
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) fill_cell(i, j, ramp_color(map.at(i, j), map.meta.m));

  auto mark = [&](std::pair<double, double> ab, Rgb color) {
    const auto cell = nearest_cell(map.grid, ab.first, ab.second);
    if (!cell) return;
    const auto [i, j] = *cell;
    for (int d = -1; d <= 1; ++d) {
      fill_cell(i + d, j, color);
      fill_cell(i, j + d, color);
    }
  };
  if (options.truth) mark(*options.truth, Rgb{220, 20, 60});
  if (options.mark_estimate && map.point_estimate) mark(*map.point_estimate, Rgb{255, 140, 0});

  std::string out = "P6\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  out.reserve(out.size() + pixels.size() * 3);
  for (const Rgb& p : pixels) {
    out += static_cast<char>(p.r);
    out += static_cast<char>(p.g);
    out += static_cast<char>(p.b);
  }
  return out;
}

void render_heatmap(const RankMap& map, const fs::path& path, const HeatmapOptions& options) {
  write_file(path, heatmap_ppm(map, options));
}

namespace {

std::string rank_map_meta(const RankMap& map) {
  std::ostringstream os;
  os << "engine = " << map.meta.engine << "\n";
  os << "scenario = " << to_string(map.meta.scenario) << "\n";
  os << "m = " << map.meta.m << "\n";
  os << "n = " << map.meta.n << "\n";
  os << "seed = " << map.meta.seed << "\n";
  if (map.meta.k) os << "k = " << *map.meta.k << "\n";
  if (map.point_estimate)
    os << "point_estimate = " << format_number(map.point_estimate->first) << ","
       << format_number(map.point_estimate->second) << "\n";
  return os.str();
}

void run_rankmap(const RunConfig& c, const fs::path& dir, std::ostream& log) {
  const ScenarioConfig scenario = make_scenario(c, c.n.front());
  const RankMap map = rank_map(scenario, make_engine(c), c.m, c.grid, c.workers);
  emit_csv(map, dir / "rankmap.csv");
  write_file(dir / "rankmap.meta", rank_map_meta(map));
  HeatmapOptions options;
  options.block = c.block;
  options.truth = std::make_pair(scenario.true_a, scenario.true_b);
  render_heatmap(map, dir / "rankmap.ppm", options);
  log << "rankmap: " << map.grid.cells() << " cells, engine " << map.meta.engine;
  if (map.meta.k) log << " (k = " << *map.meta.k << ")";
  log << "\n";
}

void run_coverage(const RunConfig& c, const fs::path& dir, std::ostream& log) {
  const CoverageMethod method = make_method(c);
  std::vector<CoverageReport> reports;
  std::ostringstream meta;
  for (std::size_t n : c.n) {
    const CoverageReport r = coverage_mc(make_scenario(c, n), method, c.m, c.q, c.trials, c.workers);
    log << "coverage: " << r.method << " n=" << n << " hits " << r.hits << "/" << r.trials
        << " = " << format_number(r.level()) << " (nominal " << format_number(r.nominal)
        << ", excluded " << r.excluded << ")\n";
    meta << "n = " << n << ": requested = " << r.requested << ", excluded = " << r.excluded
         << ", nominal = " << format_number(r.nominal);
    if (r.method == "knn") meta << ", k = " << default_k(n, c.alpha);
    meta << "\n";
    reports.push_back(r);
  }
  emit_csv(reports, dir / "coverage.csv");
  write_file(dir / "coverage.meta", meta.str());
}

void run_shrinkage(const RunConfig& c, const fs::path& dir, std::ostream& log) {
  const RankingEngine engine = make_engine(c);
  const auto rows = shrinkage_curve(make_scenario(c, c.n.front()), engine, c.m, c.q, c.n, c.grid,
                                    c.repeats, c.workers);
  for (const auto& r : rows)
    log << "shrinkage: n=" << r.n << " accepted fraction " << format_number(r.accepted_fraction)
        << "\n";
  write_file(dir / "shrinkage.csv", shrinkage_csv(engine_name(engine), c.m, c.q, rows));
}

void run_ellipsoid_demo(const RunConfig& c, const fs::path& dir, std::ostream& log) {
  const ScenarioConfig scenario = make_scenario(c, c.n.front());
  const LabeledSample sample = generate_sample(scenario.scenario, scenario.n,
                                               sample_stream(scenario.master_seed, 4, 0));
  const EllipsoidRegion region = build_ellipsoid(sample, c.delta);

  // Two-level map: inside -> 1/2 (light end), outside -> 1 (dark end).
  RankMap map;
  map.grid = c.grid;
  map.meta = RankMapMeta{"ellipsoid", scenario.scenario, 2, scenario.n, scenario.master_seed, {}};
  map.point_estimate = std::make_pair(region.center()(1), region.center()(0));
  map.values.resize(c.grid.cells());
  std::string csv = "a,b,inside\n";
  for (int i = 0; i < c.grid.resolution; ++i)
    for (int j = 0; j < c.grid.resolution; ++j) {
      const double a = c.grid.a(i), b = c.grid.b(j);
      const bool inside = region.contains(std::vector<double>{b, a});
      map.values[static_cast<std::size_t>(i) * c.grid.resolution + j] = inside ? 0.5 : 1.0;
      csv += format_number(a) + "," + format_number(b) + "," + (inside ? "1" : "0") + "\n";
    }
  write_file(dir / "ellipsoid.csv", csv);

  std::ostringstream meta;
  meta << "coordinates = b,a\n";
  meta << "center = " << format_number(region.center()(0)) << ","
       << format_number(region.center()(1)) << "\n";
  meta << "shape = " << format_number(region.shape()(0, 0)) << ","
       << format_number(region.shape()(0, 1)) << "," << format_number(region.shape()(1, 1))
       << "\n";
  meta << "radius = " << format_number(region.radius()) << "\n";
  write_file(dir / "ellipsoid.meta", meta.str());

  HeatmapOptions options;
  options.block = c.block;
  options.truth = std::make_pair(scenario.true_a, scenario.true_b);
  render_heatmap(map, dir / "ellipsoid.ppm", options);
  const bool hit = region.contains(std::vector<double>{scenario.true_b, scenario.true_a});
  log << "ellipsoid-demo: center (a, b) = (" << format_number(region.center()(1)) << ", "
      << format_number(region.center()(0)) << "), contains truth: " << (hit ? "yes" : "no")
      << "\n";
}

}  // namespace

void run(const RunConfig& c, std::ostream& log) {
  if (c.isa != "auto") kernels::select_isa(*kernels::parse_isa(c.isa));
  const fs::path dir(c.out);
  write_file(dir / "config.resolved", format_config(c));
  switch (c.subcommand) {
    case Subcommand::rankmap: run_rankmap(c, dir, log); break;
    case Subcommand::coverage: run_coverage(c, dir, log); break;
    case Subcommand::shrinkage: run_shrinkage(c, dir, log); break;
    case Subcommand::ellipsoid_demo: run_ellipsoid_demo(c, dir, log); break;
  }
}

}  // namespace dfcr::cli
