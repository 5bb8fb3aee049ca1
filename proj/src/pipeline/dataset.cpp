#include "scdt/pipeline/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "scdt/log.hpp"
#include "scdt/nn/serialize.hpp"

namespace scdt::pipeline {

std::string_view to_string(Part p) {
  switch (p) {
    case Part::train: return "train";
    case Part::validation: return "validation";
    case Part::test: return "test";
  }
  return "?";
}

const std::vector<int>& ScenarioData::part(Part p) const {
  switch (p) {
    case Part::train: return split.train;
    case Part::validation: return split.validation;
    case Part::test: return split.test;
  }
  throw std::logic_error("unknown part");
}

ScenarioData assemble_scenario(sim::ScenarioId id, std::vector<sim::ReplicationTrace> traces,
                               const DatasetConfig& config) {
  ScenarioData s;
  s.id = id;
  s.traces = std::move(traces);
  if (s.traces.empty()) return s;
  s.labels.reserve(s.traces.size());
  for (const auto& t : s.traces) s.labels.push_back(data::label_trace(t, config.recovery));
  s.split = data::split_dataset(static_cast<int>(s.traces.size()), config.split,
                                config.split_seed + static_cast<std::uint64_t>(id));
  return s;
}

Dataset simulate_dataset(const DatasetConfig& config) {
  config.sim.validate();
  Dataset ds;
  ds.config = config;
  for (auto id : sim::kAllScenarios)
    ds.scenarios[static_cast<std::size_t>(id)] =
        assemble_scenario(id, sim::generate_scenario_dataset(config.sim, id, config.replications), config);
  return ds;
}

data::NormalizationStats fit_stats(const Dataset& ds, std::span<const sim::ScenarioId> scenarios,
                                   Part part) {
  Eigen::Index rows = 0;
  for (auto id : scenarios)
    for (int r : ds.at(id).part(part))
      rows += static_cast<Eigen::Index>(ds.at(id).traces[static_cast<std::size_t>(r)].records.size());
  if (rows == 0) throw std::invalid_argument("fit_stats: no records in the selected part");
  data::RowMatrix all(rows, sim::kNumFeatures);
  Eigen::Index at = 0;
  for (auto id : scenarios) {
    for (int r : ds.at(id).part(part)) {
      const auto m = data::feature_matrix(ds.at(id).traces[static_cast<std::size_t>(r)]);
      all.middleRows(at, m.rows()) = m;
      at += m.rows();
    }
  }
  return data::fit_minmax(all);
}

data::WindowSet make_window_set(const Dataset& ds, std::span<const sim::ScenarioId> scenarios,
                                Part part, const data::NormalizationStats& stats, int window) {
  data::WindowSet set(window);
  for (auto id : scenarios) {
    const auto& sd = ds.at(id);
    for (int r : sd.part(part)) {
      const auto i = static_cast<std::size_t>(r);
      set.add_series(data::normalize_series(sd.traces[i], sd.labels[i], stats));
    }
  }
  return set;
}

int max_train_ttr(const Dataset& ds, sim::ScenarioId id) {
  int best = 0;
  const auto& sd = ds.at(id);
  for (int r : sd.split.train)
    for (const auto& rec : sd.labels[static_cast<std::size_t>(r)].records) best = std::max(best, rec.ttr);
  return best;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error(path.string() + ": bad number '" + std::string(s) + "'");
  return v;
}

std::filesystem::path rep_file(sim::ScenarioId id, int replication) {
  char name[32];
  std::snprintf(name, sizeof name, "rep_%03d.csv", replication);
  return std::filesystem::path(std::string(sim::to_string(id))) / name;
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const sim::ReplicationTrace& trace) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "day";
  for (const char* name : kFeatureNames) out << ',' << name;
  out << '\n';
  for (const auto& rec : trace.records) {
    out << rec.day;
    for (double v : rec.features) out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<sim::DailyRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<sim::DailyRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    sim::DailyRecord rec;
    std::size_t pos = 0;
    for (int col = 0; col <= sim::kNumFeatures; ++col) {
      const auto comma = line.find(',', pos);
      if ((comma == std::string::npos) != (col == sim::kNumFeatures))
        throw std::runtime_error(path.string() + ": expected 14 columns");
      const std::string_view field(line.data() + pos, (comma == std::string::npos ? line.size() : comma) - pos);
      const double v = parse_double(field, path);
      if (col == 0)
        rec.day = static_cast<int>(v);
      else
        rec.features[static_cast<std::size_t>(col - 1)] = v;
      pos = comma + 1;
    }
    out.push_back(rec);
  }
  return out;
}

nlohmann::json to_json(const data::SplitAssignment& split) {
  return {{"train", split.train}, {"validation", split.validation}, {"test", split.test}};
}

void write_traces(const std::filesystem::path& root, const Dataset& ds) {
  nlohmann::json manifest;
  manifest["format"] = "scdt-traces";
  manifest["version"] = 1;
  manifest["base_seed"] = ds.config.sim.base_seed;
  manifest["replications"] = ds.config.replications;
  manifest["features"] = kFeatureNames;
  for (const auto& sd : ds.scenarios) {
    if (sd.traces.empty()) continue;
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& t : sd.traces) {
      const auto file = rep_file(sd.id, t.replication);
      write_trace_csv(root / file, t);
      nlohmann::json r{{"replication", t.replication}, {"seed", t.seed}, {"file", file.generic_string()}};
      if (t.scenario.window) {
        r["onset"] = t.scenario.window->onset;
        r["duration"] = t.scenario.window->duration;
      }
      reps.push_back(r);
    }
    manifest["scenarios"][std::string(sim::to_string(sd.id))] = reps;
  }
  nn::write_json(root / "manifest.json", manifest);
}

Dataset read_traces(const std::filesystem::path& root, const DatasetConfig& config) {
  const auto manifest = nn::read_json(root / "manifest.json");
  if (manifest.value("format", "") != "scdt-traces")
    throw std::runtime_error(root.string() + ": not a trace directory");
  Dataset ds;
  ds.config = config;
  ds.config.replications = manifest.at("replications").get<int>();
  ds.config.sim.base_seed = manifest.at("base_seed").get<std::uint64_t>();
  for (auto id : sim::kAllScenarios) {
    std::vector<sim::ReplicationTrace> traces;
    const auto& scenarios = manifest.at("scenarios");
    const std::string name(sim::to_string(id));
    if (!scenarios.contains(name)) {
      ds.scenarios[static_cast<std::size_t>(id)].id = id;
      continue;
    }
    for (const auto& r : scenarios.at(name)) {
      sim::ReplicationTrace t;
      t.replication = r.at("replication").get<int>();
      t.seed = r.at("seed").get<std::uint64_t>();
      t.scenario = r.contains("onset") ? sim::ScenarioSpec::disrupted(id, r.at("onset").get<int>(),
                                                                      r.at("duration").get<int>())
                                       : sim::ScenarioSpec::normal();
      t.records = read_trace_csv(root / r.at("file").get<std::string>());
      traces.push_back(std::move(t));
    }
    ds.scenarios[static_cast<std::size_t>(id)] = assemble_scenario(id, std::move(traces), ds.config);
  }
  return ds;
}

}  // namespace scdt::pipeline
