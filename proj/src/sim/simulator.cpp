#include "scdt/sim/simulator.hpp"

#include <cmath>
#include <deque>
#include <queue>

namespace scdt::sim {

DailyRecord aggregate_day(int day, const DayLog& log, const DailyRecord* previous) {
  DailyRecord rec;
  rec.day = day;
  auto& f = rec.features;

  if (!log.snapshots.empty()) {
    const double n = static_cast<double>(log.snapshots.size());
    for (const auto& s : log.snapshots) {
      f[kWip] += s.wip;
      f[kQueueSupplier] += s.queue[0];
      f[kQueueManufacturer] += s.queue[1];
      f[kQueueDistributor] += s.queue[2];
    }
    f[kWip] /= n;
    f[kQueueSupplier] /= n;
    f[kQueueManufacturer] /= n;
    f[kQueueDistributor] /= n;
  }

  f[kDailyOutput] = static_cast<double>(log.fulfilled.size());
  if (log.fulfilled.empty()) {
    if (previous != nullptr) {
      for (int k : {kInterarrival, kProcSupplier, kProcManufacturer, kProcDistributor, kLeadTime,
                    kFlowTime, kWaitingTime, kProcessingTime})
        f[k] = previous->features[k];
    }
    return rec;
  }

  for (const auto& o : log.fulfilled) {
    double processing = 0.0;
    for (int i = 0; i < kNumStages; ++i) {
      const double tp = o.service_end[i] - o.service_start[i];
      f[kProcSupplier + i] += tp;
      processing += tp;
    }
    f[kInterarrival] += o.interarrival;
    f[kLeadTime] += o.lead_time();
    f[kFlowTime] += o.flow_time();
    f[kWaitingTime] += o.lead_time() - o.flow_time();
    f[kProcessingTime] += processing;
  }
  const double n = static_cast<double>(log.fulfilled.size());
  for (int k : {kInterarrival, kProcSupplier, kProcManufacturer, kProcDistributor, kLeadTime,
                kFlowTime, kWaitingTime, kProcessingTime})
    f[k] /= n;
  return rec;
}

namespace {

enum class EventKind { arrival, completion, rate_change };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  int stage;
  std::uint64_t version;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

enum class ServerStatus { idle, busy, blocked };

struct Server {
  ServerStatus status = ServerStatus::idle;
  OrderTimes unit;
  std::uint64_t version = 0;
};

RateRole stage_role(int stage) {
  return static_cast<RateRole>(static_cast<int>(RateRole::stage1) + stage);
}

}  // namespace

struct FlowLine::Impl {
  SimParams params;
  ScenarioSpec scenario;
  LineOptions options;
  Rng arrival_rng;
  std::array<Rng, kNumStages> stage_rng;

  double now = 0.0;
  std::uint64_t seq = 0;
  std::priority_queue<Event, std::vector<Event>, Later> events;
  std::uint64_t arrival_version = 0;

  std::int64_t next_id = 0;
  std::int64_t last_fulfilled_id = -1;
  double last_arrival = 0.0;
  std::array<std::deque<OrderTimes>, kNumStages> buffers;  // buffers[0] is the order backlog
  std::array<Server, kNumStages> servers;

  DayLog today;
  DayAudit audit;

  Impl(const SimParams& p, const ScenarioSpec& s, std::uint64_t seed, LineOptions o)
      : params(p),
        scenario(s),
        options(o),
        arrival_rng(substream(seed, Stream::arrivals)),
        stage_rng{substream(seed, Stream::stage1), substream(seed, Stream::stage2),
                  substream(seed, Stream::stage3)} {}

  void push(double time, EventKind kind, int stage, std::uint64_t version) {
    events.push(Event{time, seq++, kind, stage, version});
  }

  double stage_rate(int i) const {
    return effective_rate(params.service_rates[i], scenario, now, stage_role(i), params);
  }

  void schedule_arrival() {
    ++arrival_version;
    if (options.saturated) return;
    const double rate =
        effective_rate(params.arrival_rate, scenario, now, RateRole::arrival, params);
    if (auto dt = sample_event_time(rate, arrival_rng))
      push(now + *dt, EventKind::arrival, -1, arrival_version);
  }

  void schedule_completion(int i) {
    auto& server = servers[i];
    ++server.version;
    if (auto dt = sample_event_time(stage_rate(i), stage_rng[i]))
      push(now + *dt, EventKind::completion, i, server.version);
  }

  bool has_input(int i) const { return (i == 0 && options.saturated) || !buffers[i].empty(); }

  bool can_accept(int i) const {
    if (servers[i].status == ServerStatus::idle && buffers[i].empty()) return true;
    return static_cast<double>(buffers[i].size()) < params.buffer_caps[i];
  }

  OrderTimes new_order() {
    OrderTimes o;
    o.id = next_id++;
    o.arrival = now;
    o.interarrival = now - last_arrival;
    last_arrival = now;
    ++audit.arrivals;
    return o;
  }

  void pull(int i) {
    auto& server = servers[i];
    if (server.status != ServerStatus::idle) return;
    if (!has_input(i)) {
      // Zero-capacity buffer: take the finished unit straight from upstream.
      if (i > 0 && servers[i - 1].status == ServerStatus::blocked) release(i - 1);
      return;
    }
    if (i == 0 && options.saturated) {
      server.unit = new_order();
    } else {
      server.unit = buffers[i].front();
      buffers[i].pop_front();
    }
    server.unit.service_start[i] = now;
    server.status = ServerStatus::busy;
    schedule_completion(i);
    if (i > 0 && servers[i - 1].status == ServerStatus::blocked) release(i - 1);
  }

  void deliver(int i, const OrderTimes& unit) {
    buffers[i].push_back(unit);
    pull(i);
  }

  void fulfil(OrderTimes unit) {
    unit.fulfilled = now;
    if (unit.id != last_fulfilled_id + 1) ++audit.order_violations;
    last_fulfilled_id = unit.id;
    ++audit.fulfilled;
    today.fulfilled.push_back(unit);
  }

  // Server i holds a finished unit; pass it on or stay blocked.
  void release(int i) {
    auto& server = servers[i];
    if (i == kNumStages - 1) {
      server.status = ServerStatus::idle;
      fulfil(server.unit);
      pull(i);
      return;
    }
    if (!can_accept(i + 1)) {
      server.status = ServerStatus::blocked;
      return;
    }
    server.status = ServerStatus::idle;
    deliver(i + 1, server.unit);
    pull(i);
  }

  void on_completion(int i) {
    auto& server = servers[i];
    server.unit.service_end[i] = now;
    if (scenario.window && scenario.window->contains(now) && disrupted_stage(scenario.id) == i)
      ++audit.disrupted_completions;
    release(i);
  }

  void on_arrival() {
    for (int k = 0; k < params.order_qty; ++k) {
      auto order = new_order();
      if (k > 0) order.interarrival = 0.0;
      buffers[0].push_back(order);
    }
    pull(0);
    schedule_arrival();
  }

  void on_rate_change() {
    if (scenario.id == ScenarioId::demand_surge) schedule_arrival();
    if (auto stage = disrupted_stage(scenario.id);
        stage && servers[*stage].status == ServerStatus::busy)
      schedule_completion(*stage);
  }

  void advance_to(double t) {
    while (!events.empty() && events.top().time < t) {
      const Event ev = events.top();
      events.pop();
      now = ev.time;
      switch (ev.kind) {
        case EventKind::arrival:
          if (ev.version == arrival_version) on_arrival();
          break;
        case EventKind::completion:
          if (ev.version == servers[ev.stage].version &&
              servers[ev.stage].status == ServerStatus::busy)
            on_completion(ev.stage);
          break;
        case EventKind::rate_change:
          on_rate_change();
          break;
      }
    }
    now = t;
  }

  std::int64_t in_system() const {
    std::int64_t n = 0;
    for (int i = 0; i < kNumStages; ++i) {
      if (!(i == 0 && options.saturated)) n += static_cast<std::int64_t>(buffers[i].size());
      if (servers[i].status != ServerStatus::idle) ++n;
    }
    return n;
  }

  void snapshot() {
    Snapshot s;
    s.wip = static_cast<double>(in_system());
    for (int i = 0; i < kNumStages; ++i) {
      s.queue[i] = (i == 0 && options.saturated) ? 0.0 : static_cast<double>(buffers[i].size());
      audit.max_queue[i] = std::max(audit.max_queue[i], s.queue[i]);
    }
    for (int i = 0; i + 1 < kNumStages; ++i)
      if (servers[i].status == ServerStatus::blocked && can_accept(i + 1))
        ++audit.blocking_violations;
    today.snapshots.push_back(s);
  }

  void run(int last_day, const DayCallback& on_day) {
    if (scenario.window) {
      push(scenario.window->onset, EventKind::rate_change, -1, 0);
      push(scenario.window->end(), EventKind::rate_change, -1, 0);
    }
    schedule_arrival();
    pull(0);
    const int per_day = options.snapshots_per_day;
    for (int day = 0; day <= last_day; ++day) {
      today.snapshots.clear();
      today.fulfilled.clear();
      const std::int64_t arrivals = audit.arrivals;
      const std::int64_t fulfilled = audit.fulfilled;
      audit = DayAudit{};
      audit.arrivals = arrivals;
      audit.fulfilled = fulfilled;
      for (int k = 0; k < per_day; ++k) {
        advance_to(day + static_cast<double>(k) / per_day);
        snapshot();
      }
      advance_to(day + 1.0);
      audit.in_system = in_system();
      on_day(day, today, audit);
    }
  }
};

FlowLine::FlowLine(const SimParams& params, const ScenarioSpec& scenario, std::uint64_t seed,
                   LineOptions options)
    : impl_(std::make_unique<Impl>(params, scenario, seed, options)) {}

FlowLine::~FlowLine() = default;

void FlowLine::run(int last_day, const DayCallback& on_day) { impl_->run(last_day, on_day); }

ScenarioSpec sample_scenario(const SimParams& params, ScenarioId id, int replication) {
  if (id == ScenarioId::normal) return ScenarioSpec::normal();
  auto rng = substream(replication_seed(params.base_seed, static_cast<std::uint32_t>(id),
                                        static_cast<std::uint32_t>(replication)),
                       Stream::window);
  const auto onset = uniform_int(rng, params.onset_min, params.onset_max);
  const auto duration = uniform_int(rng, params.duration_min, params.duration_max);
  return ScenarioSpec::disrupted(id, static_cast<int>(onset), static_cast<int>(duration));
}

ReplicationTrace run_replication(const SimParams& params, const ScenarioSpec& scenario,
                                 int replication) {
  params.validate();
  ReplicationTrace trace;
  trace.scenario = scenario;
  trace.replication = replication;
  trace.seed = replication_seed(params.base_seed, static_cast<std::uint32_t>(scenario.id),
                                static_cast<std::uint32_t>(replication));
  trace.records.reserve(static_cast<std::size_t>(params.recorded_days()));
  trace.audit.reserve(static_cast<std::size_t>(params.recorded_days()));

  FlowLine line(params, scenario, trace.seed);
  DailyRecord previous;
  bool have_previous = false;
  line.run(params.replication_length, [&](int day, const DayLog& log, const DayAudit& audit) {
    DailyRecord rec = aggregate_day(day, log, have_previous ? &previous : nullptr);
    previous = rec;
    have_previous = true;
    if (day >= params.warmup) {
      trace.records.push_back(rec);
      trace.audit.push_back(audit);
    }
  });
  return trace;
}

std::vector<ReplicationTrace> generate_scenario_dataset(const SimParams& params, ScenarioId id,
                                                        int replications) {
  if (replications < 1) throw std::invalid_argument("generate_scenario_dataset: need >= 1 replication");
  std::vector<ReplicationTrace> out;
  out.reserve(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r)
    out.push_back(run_replication(params, sample_scenario(params, id, r), r));
  return out;
}

}  // namespace scdt::sim
