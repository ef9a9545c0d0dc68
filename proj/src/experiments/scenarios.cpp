#include <cmath>
#include <stdexcept>
#include <string>

#include "dfcr/experiments.hpp"

namespace dfcr {

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::gaussian_mixture: return "gaussian-mixture";
    case Scenario::uniform_input: return "uniform-input";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "gaussian-mixture") return Scenario::gaussian_mixture;
  if (name == "uniform-input") return Scenario::uniform_input;
  throw std::invalid_argument("unknown scenario '" + name +
                              "' (expected gaussian-mixture or uniform-input)");
}

void ScenarioConfig::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!std::isfinite(true_a) || !std::isfinite(true_b))
    throw std::invalid_argument("true parameters must be finite");
}

LabeledSample gen_gaussian_mixture(std::size_t n, RngStream stream) {
  if (n < 1) throw std::invalid_argument("gen_gaussian_mixture: n must be >= 1");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = stream.uniform01() < 0.5 ? 1.0 : -1.0;
    x[i] = y[i] + stream.normal();
  }
  return LabeledSample::from_1d(std::move(x), std::move(y));
}

LabeledSample gen_uniform_input(std::size_t n, RngStream stream) {
  if (n < 1) throw std::invalid_argument("gen_uniform_input: n must be >= 1");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = stream.uniform(-1.0, 1.0);
    y[i] = std::tanh(x[i]) + stream.uniform(-1.0, 1.0) >= 0.0 ? 1.0 : -1.0;
  }
  return LabeledSample::from_1d(std::move(x), std::move(y));
}

LabeledSample generate_sample(Scenario scenario, std::size_t n, RngStream stream) {
  switch (scenario) {
    case Scenario::gaussian_mixture: return gen_gaussian_mixture(n, stream);
    case Scenario::uniform_input: return gen_uniform_input(n, stream);
  }
  throw std::invalid_argument("generate_sample: unknown scenario");
}

RngStream sample_stream(std::uint64_t master_seed, std::uint64_t task, std::uint64_t index) {
  return RngStream(master_seed, 0).derive({task, index, 0});
}

RngStream stem_stream(std::uint64_t master_seed, std::uint64_t task, std::uint64_t index) {
  return RngStream(master_seed, 0).derive({task, index, 1});
}

}  // namespace dfcr
