#include "dfcr/cli/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dfcr/cli/output.hpp"
#include "dfcr/kernels.hpp"

namespace dfcr::cli {
namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& value,
                          const std::string& legal) {
  throw ConfigError("invalid value for '" + key + "': '" + value + "' (" + legal + ")");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) parts.push_back(trim(item));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

template <class T>
bool parse_integer(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

bool parse_double(const std::string& text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty() && std::isfinite(out);
}

template <class T>
T integer_in(const std::string& key, const std::string& value, long long lo, long long hi,
             const std::string& legal) {
  long long v = 0;
  if (!parse_integer(value, v) || v < lo || v > hi) invalid(key, value, legal);
  return static_cast<T>(v);
}

double double_in_open(const std::string& key, const std::string& value, double lo, double hi) {
  double v = 0;
  if (!parse_double(value, v) || !(v > lo && v < hi))
    invalid(key, value,
            "must be a number in (" + format_number(lo) + ", " + format_number(hi) + ")");
  return v;
}

constexpr long long kMaxN = 1'000'000;
constexpr long long kMaxM = 100'000;
constexpr long long kMaxTrials = 100'000'000;

struct Defaults {
  std::vector<std::size_t> n;
  int m;
  std::string engine;
  int resolution;
};

Defaults defaults_for(Subcommand sub) {
  switch (sub) {
    case Subcommand::rankmap: return {{500}, 40, "knn", 81};
    case Subcommand::coverage: return {{20}, 20, "knn", 81};
    case Subcommand::shrinkage: return {{50, 200, 800}, 20, "perceptron", 21};
    case Subcommand::ellipsoid_demo: return {{500}, 20, "ellipsoid", 81};
  }
  return {{20}, 20, "knn", 81};
}

}  // namespace

std::string to_string(Subcommand sub) {
  switch (sub) {
    case Subcommand::rankmap: return "rankmap";
    case Subcommand::coverage: return "coverage";
    case Subcommand::shrinkage: return "shrinkage";
    case Subcommand::ellipsoid_demo: return "ellipsoid-demo";
  }
  return "unknown";
}

std::optional<Subcommand> parse_subcommand(const std::string& name) {
  for (auto sub : {Subcommand::rankmap, Subcommand::coverage, Subcommand::shrinkage,
                   Subcommand::ellipsoid_demo})
    if (to_string(sub) == name) return sub;
  return std::nullopt;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "subcommand", "scenario", "engine", "n",       "m",    "q",     "trials",
      "full",       "alpha",    "delta",  "grid",    "seed", "workers", "out",
      "repeats",    "block",    "isa",    "optimizer"};
  return keys;
}

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin) {
  const auto& keys = config_keys();
  std::map<std::string, std::string> values;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(where + "unknown key '" + key + "'");
    if (!values.emplace(key, value).second)
      throw ConfigError(where + "key '" + key + "' given twice");
  }
  return values;
}

RunConfig resolve_config(Subcommand sub, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("unknown key '" + key + "'");
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };

  const Defaults d = defaults_for(sub);
  RunConfig c;
  c.subcommand = sub;
  c.n = d.n;
  c.m = d.m;
  c.engine = d.engine;
  c.grid.resolution = d.resolution;

  if (auto v = get("subcommand"); v && *v != to_string(sub))
    throw ConfigError("invalid value for 'subcommand': '" + *v + "' (this run is '" +
                      to_string(sub) + "')");

  if (auto v = get("scenario")) {
    try {
      c.scenario = parse_scenario(*v);
    } catch (const std::invalid_argument&) {
      invalid("scenario", *v, "must be gaussian-mixture or uniform-input");
    }
  }

  if (auto v = get("engine")) c.engine = *v;
  {
    std::vector<std::string> legal;
    switch (sub) {
      case Subcommand::coverage: legal = {"knn", "perceptron", "mle", "ellipsoid"}; break;
      case Subcommand::ellipsoid_demo: legal = {"ellipsoid"}; break;
      default: legal = {"knn", "perceptron", "mle"}; break;
    }
    if (std::find(legal.begin(), legal.end(), c.engine) == legal.end()) {
      std::string names;
      for (const auto& l : legal) names += (names.empty() ? "" : ", ") + l;
      invalid("engine", c.engine, "must be one of " + names + " for " + to_string(sub));
    }
  }

  if (auto v = get("n")) {
    c.n.clear();
    for (const auto& part : split(*v, ','))
      c.n.push_back(integer_in<std::size_t>("n", part, 1, kMaxN,
                                            "sample sizes must be integers in 1.." +
                                                std::to_string(kMaxN)));
    if (c.n.empty()) invalid("n", *v, "must list at least one sample size");
  }
  if ((sub == Subcommand::rankmap || sub == Subcommand::ellipsoid_demo) && c.n.size() != 1)
    invalid("n", get("n").value_or(""), "exactly one sample size for " + to_string(sub));
  if (sub == Subcommand::shrinkage)
    for (std::size_t i = 1; i < c.n.size(); ++i)
      if (c.n[i] <= c.n[i - 1])
        invalid("n", get("n").value_or(""), "the n-list must be strictly increasing");

  if (auto v = get("m"))
    c.m = integer_in<int>("m", *v, 2, kMaxM, "m must be an integer in 2.." + std::to_string(kMaxM));
  c.q = c.m - 1;
  if (auto v = get("q")) {
    long long q = 0;
    if (!parse_integer(*v, q)) invalid("q", *v, "q must be an integer with 1 ≤ q ≤ m");
    if (q > c.m) invalid("q", *v, "q must be ≤ m (m = " + std::to_string(c.m) + ")");
    if (q < 1) invalid("q", *v, "q must be ≥ 1");
    c.q = static_cast<int>(q);
  }

  bool full = false;
  if (auto v = get("full")) {
    if (*v == "true" || *v == "1")
      full = true;
    else if (*v != "false" && *v != "0")
      invalid("full", *v, "must be true or false");
  }
  c.trials = full ? 30000 : 10000;
  if (auto v = get("trials"))
    c.trials = integer_in<std::size_t>("trials", *v, 1, kMaxTrials,
                                       "must be an integer in 1.." + std::to_string(kMaxTrials));

  if (auto v = get("alpha")) c.alpha = double_in_open("alpha", *v, 0.5, 1.0);
  if (auto v = get("delta")) c.delta = double_in_open("delta", *v, 0.0, 1.0);

  if (auto v = get("grid")) {
    const auto parts = split(*v, ',');
    const std::string legal = "expected a_min,a_max,b_min,b_max,res with a_min < a_max, "
                              "b_min < b_max and res in 1..2000";
    if (parts.size() != 5) invalid("grid", *v, legal);
    double lim[4];
    for (int i = 0; i < 4; ++i)
      if (!parse_double(parts[i], lim[i])) invalid("grid", *v, legal);
    long long res = 0;
    if (!parse_integer(parts[4], res) || res < 1 || res > 2000) invalid("grid", *v, legal);
    c.grid = GridSpec{lim[0], lim[1], lim[2], lim[3], static_cast<int>(res)};
    try {
      c.grid.validate();
    } catch (const std::invalid_argument&) {
      invalid("grid", *v, legal);
    }
  }

  if (auto v = get("seed")) {
    if (!parse_integer(*v, c.seed)) invalid("seed", *v, "must be an integer in 0..2^64-1");
  }
  if (auto v = get("workers"))
    c.workers = integer_in<unsigned>("workers", *v, 1, 256, "must be an integer in 1..256");
  if (auto v = get("out")) {
    if (v->empty()) invalid("out", *v, "must be a nonempty directory path");
    c.out = *v;
  }
  if (auto v = get("repeats"))
    c.repeats = integer_in<std::size_t>("repeats", *v, 1, 1'000'000,
                                        "must be an integer in 1..1000000");
  if (auto v = get("block"))
    c.block = integer_in<int>("block", *v, 1, 64, "must be an integer in 1..64");
  if (auto v = get("isa")) {
    if (*v != "auto") {
      const auto isa = kernels::parse_isa(*v);
      if (!isa) invalid("isa", *v, "must be auto, scalar or avx2");
      if (!kernels::isa_supported(*isa)) invalid("isa", *v, "not supported by this CPU");
    }
    c.isa = *v;
  }
  if (auto v = get("optimizer")) {
    if (*v != "lm" && *v != "gd") invalid("optimizer", *v, "must be lm or gd");
    c.optimizer = *v;
  }
  return c;
}

RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Distribution-free confidence regions for binary classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dfcr 1.0");

  const std::vector<std::pair<std::string, std::string>> options = {
      {"scenario", "gaussian-mixture | uniform-input"},
      {"engine", "knn | perceptron | mle | ellipsoid"},
      {"n", "sample size, or comma-separated list"},
      {"m", "resampling parameter"},
      {"q", "upper rank threshold (coverage, shrinkage)"},
      {"trials", "Monte Carlo trials (coverage)"},
      {"alpha", "kNN exponent, k = floor(n^alpha)"},
      {"delta", "ellipsoid level 1 - delta"},
      {"grid", "a_min,a_max,b_min,b_max,res"},
      {"seed", "master seed"},
      {"workers", "worker threads"},
      {"out", "output directory"},
      {"repeats", "repeats per n (shrinkage)"},
      {"block", "heatmap pixels per cell"},
      {"isa", "auto | scalar | avx2"},
      {"optimizer", "perceptron optimizer: lm | gd"},
  };

  struct SubState {
    CLI::App* app;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;
    std::string config_file;
    CLI::Option* config_opt;
    CLI::Option* full_opt;
    bool full = false;
  };
  std::vector<std::unique_ptr<SubState>> subs;
  for (auto sub : {Subcommand::rankmap, Subcommand::coverage, Subcommand::shrinkage,
                   Subcommand::ellipsoid_demo}) {
    auto st = std::make_unique<SubState>();
    st->app = app.add_subcommand(to_string(sub), "run the " + to_string(sub) + " experiment");
    for (const auto& [key, help] : options) st->opts[key] = st->app->add_option("--" + key, st->raw[key], help);
    st->config_opt = st->app->add_option("--config", st->config_file, "flat key = value file");
    st->full_opt = st->app->add_flag("--full", st->full, "30000 trials instead of 10000");
    subs.push_back(std::move(st));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw HelpRequest{os.str()};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  for (std::size_t s = 0; s < subs.size(); ++s) {
    auto& st = *subs[s];
    if (!st.app->parsed()) continue;
    const Subcommand sub = *parse_subcommand(st.app->get_name());
    std::map<std::string, std::string> values;
    if (st.config_opt->count() > 0) {
      std::ifstream in(st.config_file);
      if (!in) throw ConfigError("cannot read config file '" + st.config_file + "'");
      std::ostringstream text;
      text << in.rdbuf();
      values = parse_config_text(text.str(), st.config_file);
    }
    for (const auto& [key, opt] : st.opts)
      if (opt->count() > 0) values[key] = st.raw[key];
    if (st.full_opt->count() > 0) values["full"] = "true";
    return resolve_config(sub, values);
  }
  throw ConfigError("a subcommand is required: rankmap, coverage, shrinkage or ellipsoid-demo");
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "subcommand = " << to_string(c.subcommand) << "\n";
  os << "scenario = " << to_string(c.scenario) << "\n";
  os << "engine = " << c.engine << "\n";
  os << "n = ";
  for (std::size_t i = 0; i < c.n.size(); ++i) os << (i ? "," : "") << c.n[i];
  os << "\n";
  if (c.subcommand != Subcommand::ellipsoid_demo) os << "m = " << c.m << "\n";
  if (c.subcommand == Subcommand::coverage || c.subcommand == Subcommand::shrinkage)
    os << "q = " << c.q << "\n";
  if (c.subcommand == Subcommand::coverage) os << "trials = " << c.trials << "\n";
  os << "alpha = " << format_number(c.alpha) << "\n";
  os << "delta = " << format_number(c.delta) << "\n";
  if (c.subcommand != Subcommand::coverage)
    os << "grid = " << format_number(c.grid.a_min) << "," << format_number(c.grid.a_max) << ","
       << format_number(c.grid.b_min) << "," << format_number(c.grid.b_max) << ","
       << c.grid.resolution << "\n";
  os << "seed = " << c.seed << "\n";
  os << "workers = " << c.workers << "\n";
  os << "out = " << c.out << "\n";
  if (c.subcommand == Subcommand::shrinkage) os << "repeats = " << c.repeats << "\n";
  if (c.subcommand == Subcommand::rankmap || c.subcommand == Subcommand::ellipsoid_demo)
    os << "block = " << c.block << "\n";
  os << "isa = " << c.isa << "\n";
  os << "optimizer = " << c.optimizer << "\n";
  return os.str();
}

RankingEngine make_engine(const RunConfig& c) {
  if (c.engine == "knn") return KnnEngine{std::nullopt, c.alpha};
  if (c.engine == "perceptron")
    return PerceptronEngine{c.optimizer == "gd" ? PerceptronSettings::gradient_descent()
                                                : PerceptronSettings{}};
  if (c.engine == "mle") return LogisticMleEngine{};
  throw ConfigError("engine '" + c.engine + "' is not a resampling engine");
}

CoverageMethod make_method(const RunConfig& c) {
  if (c.engine == "ellipsoid") return CoverageMethod::ellipsoid(c.delta);
  return CoverageMethod::resampling(make_engine(c));
}

ScenarioConfig make_scenario(const RunConfig& c, std::size_t n) {
  ScenarioConfig s;
  s.scenario = c.scenario;
  s.n = n;
  s.master_seed = c.seed;
  return s;
}

}  // namespace dfcr::cli
