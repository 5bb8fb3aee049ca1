#pragma once

#include <array>
#include <optional>
#include <vector>

#include "scdt/data/sources.hpp"
#include "scdt/data/windows.hpp"
#include "scdt/metrics/metrics.hpp"
#include "scdt/nn/network.hpp"
#include "scdt/nn/train.hpp"

namespace scdt::models {

struct ClassifierSpec {
  int units = 16;
  double dropout = 0.1;
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
  int epochs = 20;

  [[nodiscard]] nn::TrainConfig train_config(std::uint64_t seed) const;
};

struct TtrSpec {
  int units = 64;
  double dropout = 0.1;
  double l1_first = 1e-3;
  double learning_rate = 1e-4;
  std::size_t batch_size = 16;
  int epochs = 20;

  [[nodiscard]] nn::TrainConfig train_config(std::uint64_t seed) const;
};

/// LSTM(units, sequences) -> LSTM(units) -> dense softmax over the classes.
nn::Network build_classifier(const ClassifierSpec& spec, Eigen::Index features, std::uint64_t seed);
/// LSTM(units, sequences) -> LSTM(units) -> linear scalar.
nn::Network build_ttr(const TtrSpec& spec, Eigen::Index features, std::uint64_t seed);

using ClassCensus = std::array<long, data::kNumClasses>;
ClassCensus class_census(const data::WindowSet& set);

/// Throws std::invalid_argument naming the census if any class is absent.
void require_all_classes(const ClassCensus& census);

struct TrainedModel {
  nn::Network net;
  nn::TrainResult result;
};

TrainedModel train_classifier(const ClassifierSpec& spec, const data::WindowSet& train,
                              const data::WindowSet* validation, std::uint64_t seed);

struct Classification {
  data::PhaseClass label = data::PhaseClass::normal;
  Eigen::Matrix<double, data::kNumClasses, 1> probabilities;
};

/// Arg-max over each row of the classifier output; ties go to the lower class.
std::vector<Classification> classify(nn::Network& classifier, const data::WindowSet& set,
                                     std::size_t batch = 512);

metrics::ConfusionMatrix confusion(const data::WindowSet& set,
                                   const std::vector<Classification>& predicted);

/// Windows eligible for time-to-recovery regression: ttr > 0.
data::WindowSet ttr_windows(const data::WindowSet& set);

struct TtrModel {
  sim::ScenarioId scenario = sim::ScenarioId::supplier_loss;
  data::TtrTransform target;
  std::vector<int> features;  // empty = all
  nn::Network net;
  nn::TrainResult result;

  /// Days, clamped at 0, for every window of the set in order.
  [[nodiscard]] std::vector<double> predict(const data::WindowSet& set, std::size_t batch = 512);
};

/// `train` and `validation` must hold one scenario's windows. Throws when no
/// window has ttr > 0.
TtrModel train_ttr(sim::ScenarioId scenario, const TtrSpec& spec, data::WindowSet train,
                   std::optional<data::WindowSet> validation, data::TtrTransform target, std::vector<int> features,
                   std::uint64_t seed);

nlohmann::json to_json(const TtrModel& m);
TtrModel ttr_from_json(const nlohmann::json& j);

}  // namespace scdt::models
