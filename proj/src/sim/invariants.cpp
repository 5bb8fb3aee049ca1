#include "scdt/sim/invariants.hpp"

#include <cmath>
#include <sstream>

namespace scdt::sim {

std::vector<std::string> check_invariants(const ReplicationTrace& trace, const SimParams& params) {
  std::vector<std::string> out;
  auto fail = [&](int day, const std::string& what) {
    std::ostringstream os;
    os << "rep " << trace.replication << " day " << day << ": " << what;
    out.push_back(os.str());
  };

  if (static_cast<int>(trace.records.size()) != params.recorded_days())
    fail(-1, "expected " + std::to_string(params.recorded_days()) + " records, got " +
                 std::to_string(trace.records.size()));
  if (trace.audit.size() != trace.records.size()) fail(-1, "audit length differs from records");

  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    const auto& f = r.features;
    if (k > 0 && r.day != trace.records[k - 1].day + 1) fail(r.day, "days not consecutive");
    if (f[kDailyOutput] < 0 || f[kDailyOutput] != std::floor(f[kDailyOutput]))
      fail(r.day, "daily output not a non-negative integer");
    if (f[kFlowTime] < 0 || f[kLeadTime] < f[kFlowTime] - 1e-9) fail(r.day, "LT >= FT >= 0 violated");
    if (std::abs(f[kWaitingTime] - (f[kLeadTime] - f[kFlowTime])) > 1e-9)
      fail(r.day, "WT != LT - FT");
    for (int i = 0; i < kNumStages; ++i)
      if (f[kQueueSupplier + i] > params.buffer_caps[i]) fail(r.day, "mean queue above capacity");

    if (k >= trace.audit.size()) continue;
    const auto& a = trace.audit[k];
    if (a.arrivals != a.fulfilled + a.in_system)
      fail(r.day, "conservation: arrivals " + std::to_string(a.arrivals) + " != fulfilled " +
                      std::to_string(a.fulfilled) + " + in system " + std::to_string(a.in_system));
    for (int i = 0; i < kNumStages; ++i)
      if (a.max_queue[i] > params.buffer_caps[i])
        fail(r.day, "queue " + std::to_string(i + 1) + " exceeded its capacity");
    if (a.blocking_violations > 0) fail(r.day, "stage blocked while downstream had room");
    if (a.order_violations > 0) fail(r.day, "orders fulfilled out of arrival order");
    if (a.disrupted_completions > 0) fail(r.day, "disrupted stage completed a service");
  }
  return out;
}

}  // namespace scdt::sim
