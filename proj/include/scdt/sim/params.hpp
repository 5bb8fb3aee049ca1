#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace scdt::sim {

inline constexpr int kNumStages = 3;
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Parameters of the virtual three-echelon make-to-order chain. Rates are in
/// events per day, times in days. Defaults are the reference configuration.
struct SimParams {
  int num_replications = 300;
  int replication_length = 1095;
  int warmup = 180;
  double arrival_rate = 15.0;
  int order_qty = 1;
  std::array<double, kNumStages> service_rates{18.0, 19.0, 20.0};
  /// Input buffer capacity in front of each stage, excluding the server.
  std::array<double, kNumStages> buffer_caps{kUnbounded, 15.0, 10.0};
  std::array<int, kNumStages> server_caps{1, 1, 1};
  int duration_min = 30;
  int duration_max = 60;
  int onset_min = 300;
  int onset_max = 600;
  double disrupted_arrival_rate = 30.0;
  double disrupted_service_rate = 0.0;
  std::uint64_t base_seed = 20230401;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  /// Number of recorded days per replication (warmup..replication_length).
  [[nodiscard]] int recorded_days() const { return replication_length - warmup + 1; }
};

enum class ScenarioId : int {
  normal = 0,
  supplier_loss = 1,
  manufacturer_loss = 2,
  distributor_loss = 3,
  demand_surge = 4,
};

inline constexpr std::array<ScenarioId, 5> kAllScenarios{
    ScenarioId::normal, ScenarioId::supplier_loss, ScenarioId::manufacturer_loss,
    ScenarioId::distributor_loss, ScenarioId::demand_surge};

inline constexpr std::array<ScenarioId, 4> kDisruptedScenarios{
    ScenarioId::supplier_loss, ScenarioId::manufacturer_loss, ScenarioId::distributor_loss,
    ScenarioId::demand_surge};

std::string_view to_string(ScenarioId id);  // "S0".."S4"
ScenarioId parse_scenario(std::string_view text);

/// Stage index (0-based) whose capacity is lost, if any.
std::optional<int> disrupted_stage(ScenarioId id);

struct DisruptionWindow {
  int onset = 0;     // first disrupted day
  int duration = 0;  // days; the window is [onset, onset + duration)

  [[nodiscard]] int end() const { return onset + duration; }
  [[nodiscard]] bool contains(double t) const { return t >= onset && t < end(); }
};

struct ScenarioSpec {
  ScenarioId id = ScenarioId::normal;
  std::optional<DisruptionWindow> window;  // empty for S0

  static ScenarioSpec normal() { return {}; }
  static ScenarioSpec disrupted(ScenarioId id, int onset, int duration);
};

enum class RateRole { arrival, stage1, stage2, stage3 };

/// Rate in force at time t for the given role under the scenario.
double effective_rate(double base, const ScenarioSpec& scenario, double t, RateRole role,
                      const SimParams& params);

}  // namespace scdt::sim
