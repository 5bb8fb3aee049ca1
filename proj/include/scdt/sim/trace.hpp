#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "scdt/sim/params.hpp"

namespace scdt::sim {

inline constexpr int kNumFeatures = 13;

/// Feature order of a daily record.
enum Feature : int {
  kInterarrival = 0,
  kProcSupplier,
  kProcManufacturer,
  kProcDistributor,
  kQueueSupplier,
  kQueueManufacturer,
  kQueueDistributor,
  kWip,
  kLeadTime,
  kFlowTime,
  kWaitingTime,
  kProcessingTime,
  kDailyOutput,
};

using FeatureVector = std::array<double, kNumFeatures>;

struct DailyRecord {
  int day = 0;
  FeatureVector features{};
};

/// Counters gathered alongside each recorded day, used to audit the run.
struct DayAudit {
  std::int64_t arrivals = 0;   // cumulative at end of day
  std::int64_t fulfilled = 0;  // cumulative at end of day
  std::int64_t in_system = 0;  // orders present at end of day
  double max_queue[kNumStages]{};
  int blocking_violations = 0;  // blocked server while downstream had room
  int order_violations = 0;     // fulfilment out of arrival order
  int disrupted_completions = 0;
};

struct ReplicationTrace {
  ScenarioSpec scenario;
  int replication = 0;
  std::uint64_t seed = 0;
  std::vector<DailyRecord> records;
  std::vector<DayAudit> audit;  // parallel to records
};

}  // namespace scdt::sim
