#include "scdt/data/labels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scdt::data {

std::string_view to_string(PhaseClass c) {
  switch (c) {
    case PhaseClass::normal: return "Normal";
    case PhaseClass::surge_demand: return "SurgeDemand";
    case PhaseClass::supplier_loss: return "SupplierLoss";
    case PhaseClass::manufacturer_loss: return "ManufacturerLoss";
    case PhaseClass::distributor_loss: return "DistributorLoss";
    case PhaseClass::recovery: return "Recovery";
  }
  return "?";
}

PhaseClass class_from_index(int index) {
  if (index < 0 || index >= kNumClasses)
    throw std::out_of_range("unknown class id " + std::to_string(index));
  return static_cast<PhaseClass>(index);
}

PhaseClass disruption_class(sim::ScenarioId id) {
  switch (id) {
    case sim::ScenarioId::supplier_loss: return PhaseClass::supplier_loss;
    case sim::ScenarioId::manufacturer_loss: return PhaseClass::manufacturer_loss;
    case sim::ScenarioId::distributor_loss: return PhaseClass::distributor_loss;
    case sim::ScenarioId::demand_surge: return PhaseClass::surge_demand;
    case sim::ScenarioId::normal: break;
  }
  throw std::invalid_argument("S0 has no disruption class");
}

OneHot one_hot(PhaseClass c) {
  OneHot v = OneHot::Zero();
  v(static_cast<int>(c)) = 1.0;
  return v;
}

std::string RecoveryRule::id() const {
  std::ostringstream os;
  os << "wip-p" << percentile * 100.0 << "-" << consecutive_days << "d";
  return os.str();
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

RecoveryInfo find_recovery(const sim::ReplicationTrace& trace, const RecoveryRule& rule) {
  const auto& window = trace.scenario.window;
  if (!window) throw std::invalid_argument("find_recovery: trace has no disruption window");
  if (trace.records.empty()) throw std::invalid_argument("find_recovery: empty trace");

  std::vector<double> baseline;
  for (const auto& r : trace.records)
    if (r.day < window->onset) baseline.push_back(r.features[sim::kWip]);
  if (baseline.empty()) throw std::invalid_argument("find_recovery: no pre-onset days recorded");

  RecoveryInfo info;
  info.wip_threshold = percentile(baseline, rule.percentile);
  int run = 0;
  for (const auto& r : trace.records) {
    if (r.day < window->end()) continue;
    run = r.features[sim::kWip] <= info.wip_threshold ? run + 1 : 0;
    if (run == rule.consecutive_days) {
      info.recovery_day = r.day - rule.consecutive_days + 1;
      return info;
    }
  }
  info.recovery_day = trace.records.back().day;
  info.censored = true;
  return info;
}

LabelledTrace label_trace(const sim::ReplicationTrace& trace, const RecoveryRule& rule) {
  LabelledTrace out;
  out.records.reserve(trace.records.size());
  const auto& window = trace.scenario.window;
  if (window) out.recovery = find_recovery(trace, rule);

  for (const auto& r : trace.records) {
    LabelledRecord lr;
    lr.record = r;
    if (window) {
      const int recovery_day = out.recovery->recovery_day;
      if (r.day >= window->onset && r.day < window->end())
        lr.label = disruption_class(trace.scenario.id);
      else if (r.day >= window->end() && r.day < recovery_day)
        lr.label = PhaseClass::recovery;
      if (r.day >= window->onset && r.day < recovery_day) lr.ttr = recovery_day - r.day;
    }
    lr.anomalous = lr.label != PhaseClass::normal;
    out.records.push_back(lr);
  }
  return out;
}

}  // namespace scdt::data
