#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "scdt/random.hpp"
#include "scdt/sim/params.hpp"
#include "scdt/sim/trace.hpp"

namespace scdt::sim {

/// Timestamps of one order as it moves through the line.
struct OrderTimes {
  std::int64_t id = 0;
  double arrival = 0.0;
  double interarrival = 0.0;
  std::array<double, kNumStages> service_start{};
  std::array<double, kNumStages> service_end{};
  double fulfilled = 0.0;

  [[nodiscard]] double lead_time() const { return fulfilled - arrival; }
  [[nodiscard]] double flow_time() const { return fulfilled - service_start[0]; }
};

/// State observed at one hourly snapshot.
struct Snapshot {
  double wip = 0.0;  // every unfulfilled order, including those queued at the supplier
  std::array<double, kNumStages> queue{};
};

/// Raw events of one simulated day.
struct DayLog {
  std::vector<Snapshot> snapshots;
  std::vector<OrderTimes> fulfilled;
};

/// Collapses one day of events into the 13-feature record. Per-order time
/// features fall back to `previous` (or zero) on days with no fulfilment.
DailyRecord aggregate_day(int day, const DayLog& log, const DailyRecord* previous);

struct LineOptions {
  /// Infinite supply of orders in front of the supplier; arrivals are ignored.
  bool saturated = false;
  int snapshots_per_day = 24;
};

/// Event-driven three-stage flow line with finite buffers and
/// blocking-after-service. Calls `on_day` after each completed day.
class FlowLine {
 public:
  using DayCallback = std::function<void(int day, const DayLog&, const DayAudit&)>;

  FlowLine(const SimParams& params, const ScenarioSpec& scenario, std::uint64_t seed,
           LineOptions options = {});
  ~FlowLine();
  FlowLine(const FlowLine&) = delete;
  FlowLine& operator=(const FlowLine&) = delete;

  /// Simulates days [0, last_day] inclusive.
  void run(int last_day, const DayCallback& on_day);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Draws onset and duration for a disrupted scenario from the replication's
/// window substream; S0 gets no window.
ScenarioSpec sample_scenario(const SimParams& params, ScenarioId id, int replication);

ReplicationTrace run_replication(const SimParams& params, const ScenarioSpec& scenario,
                                 int replication);

/// Runs `replications` independent replications of one scenario.
std::vector<ReplicationTrace> generate_scenario_dataset(const SimParams& params, ScenarioId id,
                                                        int replications);

}  // namespace scdt::sim
