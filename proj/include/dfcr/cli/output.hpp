#pragma once

// CSV, metadata and PPM writers, and the subcommand drivers.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dfcr/cli/config.hpp"
#include "dfcr/experiments.hpp"

namespace dfcr::cli {

/// Shortest round-trip decimal form, always with '.' as separator.
std::string format_number(double value);

/// Long format: header a,b,relative_rank then one row per cell, a outer.
std::string rank_map_csv(const RankMap& map);
/// Header method,n,m,q,trials,hits,coverage; m and q empty for the ellipsoid.
std::string coverage_csv(const std::vector<CoverageReport>& reports);
/// Header method,n,m,q,repeats,accepted_fraction.
std::string shrinkage_csv(const std::string& method, int m, int q,
                          const std::vector<ShrinkageRow>& rows);

/// Writes `contents` to `path`, creating parent directories. Errors name the
/// absolute path.
void write_file(const std::filesystem::path& path, const std::string& contents);

void emit_csv(const RankMap& map, const std::filesystem::path& path);
void emit_csv(const std::vector<CoverageReport>& reports, const std::filesystem::path& path);

struct HeatmapOptions {
  int block = 4;
  /// (a, b) to mark, drawn at the nearest cell when inside the grid window.
  std::optional<std::pair<double, double>> truth;
  bool mark_estimate = true;
};

struct Rgb {
  unsigned char r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Linear ramp: relative rank 1/m maps to the light end, 1 to the dark end.
Rgb ramp_color(double relative_rank, int m);

/// Binary PPM (P6), res*block pixels square; b grows upward, a to the right.
std::string heatmap_ppm(const RankMap& map, const HeatmapOptions& options);
void render_heatmap(const RankMap& map, const std::filesystem::path& path,
                    const HeatmapOptions& options = {});

/// Executes one configured run, writing config.resolved and the outputs into
/// config.out. Progress lines go to `log`.
void run(const RunConfig& config, std::ostream& log);

}  // namespace dfcr::cli
