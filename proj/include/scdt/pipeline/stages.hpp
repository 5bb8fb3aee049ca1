#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scdt/pipeline/config.hpp"
#include "scdt/pipeline/dataset.hpp"

namespace scdt::pipeline {

inline constexpr const char* kToolVersion = "scdt 1.0.0";

/// Normalization statistics fitted during prep.
struct PrepStats {
  data::NormalizationStats detector;    // S0 train
  data::NormalizationStats classifier;  // S1..S4 train
  std::array<data::NormalizationStats, 4> ttr;  // per disrupted scenario, own train

  [[nodiscard]] const data::NormalizationStats& for_ttr(sim::ScenarioId id) const;
};

nlohmann::json to_json(const PrepStats& s);
PrepStats prep_stats_from_json(const nlohmann::json& j);

/// Output directory of one run with lazily loaded shared inputs.
class Workspace {
 public:
  Workspace(std::filesystem::path root, RunConfig config);

  [[nodiscard]] const std::filesystem::path& root() const { return root_; }
  [[nodiscard]] const RunConfig& config() const { return config_; }
  [[nodiscard]] std::filesystem::path path(std::string_view relative) const { return root_ / relative; }
  [[nodiscard]] std::string config_hash() const;

  /// Traces under data/, loaded on first use.
  const Dataset& dataset();
  const PrepStats& stats();
  void reset_cache();

  /// Scenarios written by `simulate`; empty means all.
  std::vector<sim::ScenarioId> simulate_only;

 private:
  std::filesystem::path root_;
  RunConfig config_;
  std::optional<Dataset> dataset_;
  std::optional<PrepStats> stats_;
};

struct StageResult {
  std::string stage;
  bool passed = true;  // false: validation or acceptance check failed
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> inputs;   // paths relative to the workspace
  std::vector<std::string> outputs;
};

const std::vector<std::string>& stage_names();

/// Runs one stage, then writes manifests/<stage>.json. Throws on error.
StageResult run_stage(Workspace& ws, const std::string& stage);

/// True when manifests/<stage>.json matches the current config and every
/// recorded input and output file still has its recorded hash.
bool stage_current(const Workspace& ws, const std::string& stage);

/// FNV-1a 64 of a file's bytes as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

}  // namespace scdt::pipeline
