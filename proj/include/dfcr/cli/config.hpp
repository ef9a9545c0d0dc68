#pragma once

// Run configuration: command-line flags layered over an optional flat
// `key = value` config file, validated before any computation starts.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfcr/experiments.hpp"

namespace dfcr::cli {

enum class Subcommand { rankmap, coverage, shrinkage, ellipsoid_demo };

std::string to_string(Subcommand sub);
std::optional<Subcommand> parse_subcommand(const std::string& name);

/// Invalid configuration; the message names the key, the value and the legal range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// --help / --version; carries the text to print and exit 0 with.
struct HelpRequest {
  std::string text;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::coverage;
  Scenario scenario = Scenario::gaussian_mixture;
  /// knn | perceptron | mle | ellipsoid
  std::string engine = "knn";
  /// One entry for rankmap and ellipsoid-demo; one report row each for
  /// coverage; the increasing n-list for shrinkage.
  std::vector<std::size_t> n;
  int m = 20;
  int q = 19;
  std::size_t trials = 10000;
  double alpha = 0.7;
  double delta = 0.05;
  GridSpec grid;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out = "out";
  std::size_t repeats = 20;
  int block = 4;
  /// auto | scalar | avx2
  std::string isa = "auto";
  /// lm | gd (perceptron only)
  std::string optimizer = "lm";
};

/// Keys accepted both as `--key` flags and as config-file keys.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines; '#' starts a comment. Unknown or repeated keys
/// are rejected. `origin` names the source in error messages.
std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin);

/// Builds and validates a RunConfig from raw key/value strings. Keys absent
/// from `values` take their subcommand-specific defaults.
RunConfig resolve_config(Subcommand sub, const std::map<std::string, std::string>& values);

/// argv[0] is the program name. Flags override values from --config FILE.
/// Throws ConfigError on invalid input and HelpRequest for --help.
RunConfig parse_config(int argc, const char* const* argv);

/// Canonical `key = value` text; feeding it back through --config
/// reproduces the run.
std::string format_config(const RunConfig& config);

/// Library objects described by the config.
RankingEngine make_engine(const RunConfig& config);
CoverageMethod make_method(const RunConfig& config);
ScenarioConfig make_scenario(const RunConfig& config, std::size_t n);

}  // namespace dfcr::cli
