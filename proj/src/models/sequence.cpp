#include "scdt/models/sequence.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "scdt/data/sources.hpp"
#include "scdt/nn/serialize.hpp"

namespace scdt::models {

namespace {

std::vector<std::size_t> all_ids(std::size_t n) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return ids;
}

// Eval-mode outputs for every window of the set, batch by batch.
template <typename F>
void for_batches(const data::WindowSet& set, std::size_t batch, F&& f) {
  const auto ids = all_ids(set.size());
  for (std::size_t start = 0; start < ids.size(); start += batch) {
    const auto n = std::min(batch, ids.size() - start);
    f(start, std::span<const std::size_t>(ids).subspan(start, n));
  }
}

}  // namespace

nn::TrainConfig ClassifierSpec::train_config(std::uint64_t seed) const {
  nn::TrainConfig c;
  c.learning_rate = learning_rate;
  c.batch_size = batch_size;
  c.epochs = epochs;
  c.loss = nn::Loss::categorical_cross_entropy;
  c.seed = seed;
  return c;
}

nn::TrainConfig TtrSpec::train_config(std::uint64_t seed) const {
  nn::TrainConfig c;
  c.learning_rate = learning_rate;
  c.batch_size = batch_size;
  c.epochs = epochs;
  c.loss = nn::Loss::mae;
  c.l1_per_layer = {l1_first};
  c.seed = seed;
  return c;
}

nn::Network build_classifier(const ClassifierSpec& spec, Eigen::Index features, std::uint64_t seed) {
  nn::Network net;
  net.add<nn::Lstm>(features, spec.units, true, spec.dropout);
  net.add<nn::Lstm>(spec.units, spec.units, false, spec.dropout);
  net.add<nn::Dense>(spec.units, data::kNumClasses, nn::Activation::softmax);
  net.initialize(seed);
  return net;
}

nn::Network build_ttr(const TtrSpec& spec, Eigen::Index features, std::uint64_t seed) {
  nn::Network net;
  net.add<nn::Lstm>(features, spec.units, true, spec.dropout);
  net.add<nn::Lstm>(spec.units, spec.units, false, spec.dropout);
  net.add<nn::Dense>(spec.units, 1, nn::Activation::linear);
  net.initialize(seed);
  return net;
}

ClassCensus class_census(const data::WindowSet& set) {
  ClassCensus c{};
  for (std::size_t i = 0; i < set.size(); ++i) ++c[static_cast<std::size_t>(set.label(i))];
  return c;
}

void require_all_classes(const ClassCensus& census) {
  std::string text;
  bool missing = false;
  for (int k = 0; k < data::kNumClasses; ++k) {
    const long n = census[static_cast<std::size_t>(k)];
    missing = missing || n == 0;
    if (!text.empty()) text += ", ";
    text += std::string(data::to_string(data::class_from_index(k))) + "=" + std::to_string(n);
  }
  if (missing) throw std::invalid_argument("classifier training set lacks a class: " + text);
}

TrainedModel train_classifier(const ClassifierSpec& spec, const data::WindowSet& train,
                              const data::WindowSet* validation, std::uint64_t seed) {
  require_all_classes(class_census(train));
  TrainedModel out{build_classifier(spec, train.input_features(), seed), {}};
  data::ClassSource tr(train);
  std::optional<data::ClassSource> va;
  if (validation) va.emplace(*validation);
  out.result = nn::train(out.net, tr, va ? &*va : nullptr, spec.train_config(seed));
  return out;
}

std::vector<Classification> classify(nn::Network& classifier, const data::WindowSet& set,
                                     std::size_t batch) {
  std::vector<Classification> out(set.size());
  for_batches(set, batch, [&](std::size_t start, std::span<const std::size_t> ids) {
    const nn::Matrix p = classifier.predict(set.sequence_batch(ids));
    if (p.cols() != data::kNumClasses) throw std::invalid_argument("classify: not a classifier");
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      auto& c = out[start + static_cast<std::size_t>(r)];
      c.probabilities = p.row(r).transpose();
      c.label = data::from_one_hot(c.probabilities);
    }
  });
  return out;
}

metrics::ConfusionMatrix confusion(const data::WindowSet& set,
                                   const std::vector<Classification>& predicted) {
  if (predicted.size() != set.size()) throw std::invalid_argument("confusion: length mismatch");
  metrics::ConfusionMatrix m(data::kNumClasses);
  for (std::size_t i = 0; i < set.size(); ++i)
    m.add(static_cast<int>(set.label(i)), static_cast<int>(predicted[i].label));
  return m;
}

data::WindowSet ttr_windows(const data::WindowSet& set) {
  return set.filter([](const data::WindowSet& s, std::size_t i) { return s.ttr(i) > 0; });
}

std::vector<double> TtrModel::predict(const data::WindowSet& set, std::size_t batch) {
  std::vector<double> out(set.size());
  for_batches(set, batch, [&](std::size_t start, std::span<const std::size_t> ids) {
    const nn::Matrix p = net.predict(set.sequence_batch(ids));
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      out[start + static_cast<std::size_t>(r)] = target.inverse(p(r, 0));
  });
  return out;
}

TtrModel train_ttr(sim::ScenarioId scenario, const TtrSpec& spec, data::WindowSet train,
                   std::optional<data::WindowSet> validation, data::TtrTransform target, std::vector<int> features,
                   std::uint64_t seed) {
  if (scenario == sim::ScenarioId::normal) throw std::invalid_argument("train_ttr: S0 has no recovery");
  train.select_features(features);
  auto positive = ttr_windows(train);
  if (positive.empty())
    throw std::invalid_argument("train_ttr: no disrupted windows for " + std::string(sim::to_string(scenario)));
  TtrModel m;
  m.scenario = scenario;
  m.target = target;
  m.features = std::move(features);
  m.net = build_ttr(spec, positive.input_features(), seed);
  data::TtrSource tr(positive, target);
  std::optional<data::WindowSet> vpos;
  std::optional<data::TtrSource> va;
  if (validation) {
    validation->select_features(m.features);
    vpos.emplace(ttr_windows(*validation));
    if (!vpos->empty()) va.emplace(*vpos, target);
  }
  m.result = nn::train(m.net, tr, va ? &*va : nullptr, spec.train_config(seed));
  return m;
}

nlohmann::json to_json(const TtrModel& m) {
  return {{"scenario", sim::to_string(m.scenario)},
          {"scale", m.target.scale},
          {"target", m.target.log ? "log" : "linear"},
          {"features", m.features},
          {"network", nn::network_to_json(m.net)}};
}

TtrModel ttr_from_json(const nlohmann::json& j) {
  TtrModel m;
  m.scenario = sim::parse_scenario(j.at("scenario").get<std::string>());
  m.target.scale = j.at("scale").get<double>();
  m.target.log = j.at("target").get<std::string>() == "log";
  m.features = j.at("features").get<std::vector<int>>();
  m.net = nn::network_from_json(j.at("network"));
  return m;
}

}  // namespace scdt::models
