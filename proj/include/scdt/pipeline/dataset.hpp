#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "scdt/data/labels.hpp"
#include "scdt/data/split.hpp"
#include "scdt/data/windows.hpp"
#include "scdt/sim/simulator.hpp"

namespace scdt::pipeline {

inline constexpr std::array<const char*, sim::kNumFeatures> kFeatureNames{
    "interarrival",  "proc_supplier", "proc_manufacturer", "proc_distributor", "queue_supplier",
    "queue_manufacturer", "queue_distributor", "wip", "lead_time", "flow_time",
    "waiting_time", "processing_time", "daily_output"};

enum class Part { train, validation, test };
std::string_view to_string(Part p);

/// Replications of one scenario with labels and their split.
struct ScenarioData {
  sim::ScenarioId id = sim::ScenarioId::normal;
  std::vector<sim::ReplicationTrace> traces;
  std::vector<data::LabelledTrace> labels;
  data::SplitAssignment split;

  [[nodiscard]] const std::vector<int>& part(Part p) const;
};

struct DatasetConfig {
  sim::SimParams sim;
  int replications = 50;
  data::RecoveryRule recovery;
  data::SplitSpec split;
  std::uint64_t split_seed = 7;
};

struct Dataset {
  DatasetConfig config;
  std::array<ScenarioData, 5> scenarios;

  [[nodiscard]] const ScenarioData& at(sim::ScenarioId id) const {
    return scenarios[static_cast<std::size_t>(id)];
  }
};

/// Splits and labels already-simulated traces.
ScenarioData assemble_scenario(sim::ScenarioId id, std::vector<sim::ReplicationTrace> traces,
                               const DatasetConfig& config);
Dataset simulate_dataset(const DatasetConfig& config);

/// Min-max statistics over the raw features of the given scenarios' part.
data::NormalizationStats fit_stats(const Dataset& ds, std::span<const sim::ScenarioId> scenarios,
                                   Part part);

data::WindowSet make_window_set(const Dataset& ds, std::span<const sim::ScenarioId> scenarios,
                                Part part, const data::NormalizationStats& stats,
                                int window = data::kWindowSize);

/// Largest time-to-recovery among the training windows of a scenario.
int max_train_ttr(const Dataset& ds, sim::ScenarioId id);

// Trace files: one CSV per replication under <root>/S<k>/, plus manifest.json.
void write_traces(const std::filesystem::path& root, const Dataset& ds);
Dataset read_traces(const std::filesystem::path& root, const DatasetConfig& config);
void write_trace_csv(const std::filesystem::path& path, const sim::ReplicationTrace& trace);
std::vector<sim::DailyRecord> read_trace_csv(const std::filesystem::path& path);

nlohmann::json to_json(const data::SplitAssignment& split);

}  // namespace scdt::pipeline
