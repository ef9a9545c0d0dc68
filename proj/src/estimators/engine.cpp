#include <string>

#include "dfcr/estimators.hpp"
#include "dfcr/kernels.hpp"

namespace dfcr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t resolve_k(const KnnEngine& engine, std::size_t n) {
  return engine.k ? *engine.k : default_k(n, engine.alpha);
}

// Fit on (inputs, labels) and return the model-family fit, if any.
std::optional<RegressionModel> fit_model(const RankingEngine& engine, const InputMatrix& inputs,
                                         std::span<const double> labels) {
  return std::visit(
      Overloaded{
          [](const KnnEngine&) -> std::optional<RegressionModel> { return std::nullopt; },
          [&](const PerceptronEngine& e) -> std::optional<RegressionModel> {
            return perceptron_fit(inputs, labels, e.settings).model;
          },
          [&](const LogisticMleEngine& e) -> std::optional<RegressionModel> {
            return logistic_mle_fit(inputs, labels, e.settings).model;
          },
          [&](const LinearErmEngine& e) -> std::optional<RegressionModel> {
            LabeledSample train(inputs, std::vector<double>(labels.begin(), labels.end()));
            return linear_erm_fit(train, e.basis);
          },
      },
      engine);
}

}  // namespace

std::string engine_name(const RankingEngine& engine) {
  return std::visit(Overloaded{
                        [](const KnnEngine&) { return std::string("knn"); },
                        [](const PerceptronEngine&) { return std::string("perceptron"); },
                        [](const LogisticMleEngine&) { return std::string("mle"); },
                        [](const LinearErmEngine&) { return std::string("linear-erm"); },
                    },
                    engine);
}

FittedPredictor::FittedPredictor(RegressionModel model, std::size_t dataset)
    : model_(std::move(model)), dataset_(dataset) {}

FittedPredictor::FittedPredictor(std::shared_ptr<const LabeledSample> train, std::size_t k,
                                 std::size_t dataset)
    : knn_train_(std::move(train)), k_(k), dataset_(dataset) {
  if (!knn_train_) throw std::invalid_argument("FittedPredictor: null training sample");
  if (k_ < 1 || k_ > knn_train_->size())
    throw std::invalid_argument("FittedPredictor: k must satisfy 1 <= k <= n");
}

double FittedPredictor::operator()(std::span<const double> x) const {
  if (model_) return (*model_)(x);
  return knn_predict(*knn_train_, k_, x);
}

FittedPredictor fit_predictor(const RankingEngine& engine, const LabeledSample& train,
                              std::size_t dataset) {
  try {
    if (const auto* knn = std::get_if<KnnEngine>(&engine))
      return FittedPredictor(std::make_shared<const LabeledSample>(train),
                             resolve_k(*knn, train.size()), dataset);
    return FittedPredictor(*fit_model(engine, train.inputs(), train.labels()), dataset);
  } catch (const FitError& e) {
    if (e.dataset()) throw;
    throw FitError(e.what(), dataset);
  }
}

PreparedEngine::PreparedEngine(RankingEngine engine, LabeledSample sample)
    : engine_(std::move(engine)), sample_(std::move(sample)) {
  if (const auto* knn = std::get_if<KnnEngine>(&engine_))
    table_ = std::make_shared<const NeighborTable>(sample_.inputs(),
                                                   resolve_k(*knn, sample_.size()));
  original_fit_.resize(sample_.size());
  try {
    if (table_) {
      table_->average(sample_.labels(), original_fit_);
    } else {
      original_model_ = fit_model(engine_, sample_.inputs(), sample_.labels());
      original_model_->evaluate_rows(sample_.inputs(), original_fit_);
    }
  } catch (const FitError& e) {
    throw FitError(e.what(), 0);
  }
}

void PreparedEngine::fitted_values(std::span<const double> labels, std::size_t dataset,
                                   std::span<double> out) const {
  try {
    if (table_) {
      table_->average(labels, out);
      return;
    }
    fit_model(engine_, sample_.inputs(), labels)->evaluate_rows(sample_.inputs(), out);
  } catch (const FitError& e) {
    if (e.dataset()) throw;
    throw FitError(e.what(), dataset);
  }
}

ReferenceVector PreparedEngine::reference_vector(std::span<const double> candidate_values,
                                                 const AlternativeOutputs& alternatives) const {
  const std::size_t n = sample_.size();
  if (candidate_values.size() != n || alternatives.n() != n)
    throw std::invalid_argument("reference_vector: candidate/alternatives do not match n = " +
                                std::to_string(n));
  const int m = alternatives.m();
  std::vector<double> z(m);
  z[0] = kernels::mean_squared_diff(candidate_values, original_fit_);
  std::vector<double> fit(n);
  for (int j = 1; j < m; ++j) {
    fitted_values(alternatives.labels(j), static_cast<std::size_t>(j), fit);
    z[j] = kernels::mean_squared_diff(candidate_values, fit);
  }
  return ReferenceVector(std::move(z));
}

ReferenceVector engine_reference_vector(const RankingEngine& engine,
                                        const RegressionModel& candidate,
                                        const LabeledSample& sample,
                                        const AlternativeOutputs& alternatives) {
  const PreparedEngine fresh(engine, sample);
  return fresh.reference_vector(candidate.evaluate_rows(sample.inputs()), alternatives);
}

}  // namespace dfcr
