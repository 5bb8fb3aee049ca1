#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scdt/sim/trace.hpp"

namespace scdt::data {

inline constexpr int kNumClasses = 6;

/// Operating phase of one day. The order is fixed and defines the one-hot
/// layout used by the classifier.
enum class PhaseClass : int {
  normal = 0,
  surge_demand = 1,
  supplier_loss = 2,
  manufacturer_loss = 3,
  distributor_loss = 4,
  recovery = 5,
};

std::string_view to_string(PhaseClass c);
PhaseClass class_from_index(int index);  // throws std::out_of_range

/// Class assigned to the disruption window of a scenario (S1..S4).
PhaseClass disruption_class(sim::ScenarioId id);

using OneHot = Eigen::Matrix<double, kNumClasses, 1>;

OneHot one_hot(PhaseClass c);

/// Arg-max of a class score vector; ties go to the lower class index.
template <typename Derived>
PhaseClass from_one_hot(const Eigen::MatrixBase<Derived>& scores) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k)
    if (scores(k) > scores(best)) best = k;
  return class_from_index(static_cast<int>(best));
}

/// End of the post-disruption recovery: the first day at or after the end of
/// the disruption from which WIP stays at or below the given percentile of the
/// pre-onset WIP for `consecutive_days` days.
struct RecoveryRule {
  double percentile = 0.95;
  int consecutive_days = 3;

  [[nodiscard]] std::string id() const;
};

struct RecoveryInfo {
  int recovery_day = 0;
  double wip_threshold = 0.0;
  bool censored = false;  // never recovered before the trace ended
};

RecoveryInfo find_recovery(const sim::ReplicationTrace& trace, const RecoveryRule& rule);

struct LabelledRecord {
  sim::DailyRecord record;
  PhaseClass label = PhaseClass::normal;
  bool anomalous = false;
  int ttr = 0;  // days until recovery, 0 outside [onset, recovery)
};

struct LabelledTrace {
  std::vector<LabelledRecord> records;
  std::optional<RecoveryInfo> recovery;  // empty for S0
};

LabelledTrace label_trace(const sim::ReplicationTrace& trace, const RecoveryRule& rule);

/// Linear-interpolated percentile (p in [0, 1]) of unsorted values.
double percentile(std::vector<double> values, double p);

}  // namespace scdt::data
