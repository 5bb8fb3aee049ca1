#include "scdt/sim/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scdt::sim {

void SimParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SimParams: " + what); };
  if (num_replications < 1) fail("num_replications must be >= 1");
  if (warmup < 0 || warmup >= replication_length) fail("warmup must lie in [0, replication_length)");
  if (!(arrival_rate >= 0.0) || !(disrupted_arrival_rate >= 0.0) || !(disrupted_service_rate >= 0.0))
    fail("rates must be non-negative");
  if (order_qty < 1) fail("order_qty must be >= 1");
  for (int i = 0; i < kNumStages; ++i) {
    if (!(service_rates[i] >= 0.0)) fail("service rates must be non-negative");
    if (!(buffer_caps[i] >= 0.0)) fail("buffer capacities must be non-negative");
    if (std::isfinite(buffer_caps[i]) && buffer_caps[i] != std::floor(buffer_caps[i]))
      fail("buffer capacities must be whole units");
    if (server_caps[i] != 1) fail("only single-server stages are supported");
  }
  if (duration_min < 1 || duration_max < duration_min) fail("invalid disruption duration range");
  if (onset_min < 0 || onset_max < onset_min) fail("invalid disruption onset range");
  if (onset_max + duration_max >= replication_length)
    fail("latest disruption must end before the replication does");
}

std::string_view to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::normal: return "S0";
    case ScenarioId::supplier_loss: return "S1";
    case ScenarioId::manufacturer_loss: return "S2";
    case ScenarioId::distributor_loss: return "S3";
    case ScenarioId::demand_surge: return "S4";
  }
  return "S?";
}

ScenarioId parse_scenario(std::string_view text) {
  for (auto id : kAllScenarios)
    if (text == to_string(id)) return id;
  throw std::invalid_argument("unknown scenario '" + std::string(text) + "'");
}

std::optional<int> disrupted_stage(ScenarioId id) {
  switch (id) {
    case ScenarioId::supplier_loss: return 0;
    case ScenarioId::manufacturer_loss: return 1;
    case ScenarioId::distributor_loss: return 2;
    default: return std::nullopt;
  }
}

ScenarioSpec ScenarioSpec::disrupted(ScenarioId id, int onset, int duration) {
  if (id == ScenarioId::normal) throw std::invalid_argument("S0 carries no disruption window");
  if (onset < 0 || duration < 1) throw std::invalid_argument("invalid disruption window");
  return ScenarioSpec{id, DisruptionWindow{onset, duration}};
}

double effective_rate(double base, const ScenarioSpec& scenario, double t, RateRole role,
                      const SimParams& params) {
  if (!scenario.window || !scenario.window->contains(t)) return base;
  if (role == RateRole::arrival)
    return scenario.id == ScenarioId::demand_surge ? params.disrupted_arrival_rate : base;
  const int stage = static_cast<int>(role) - static_cast<int>(RateRole::stage1);
  return disrupted_stage(scenario.id) == stage ? params.disrupted_service_rate : base;
}

}  // namespace scdt::sim
