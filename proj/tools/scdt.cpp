#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scdt/log.hpp"
#include "scdt/pipeline/stages.hpp"

using namespace scdt;

namespace {

constexpr int kExitError = 1;
constexpr int kExitFailedCheck = 2;

struct Options {
  std::string profile = "desk";
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out;
  bool quiet = false;
  std::vector<std::string> scenarios;
  int reps = 0;
  long long seed = -1;
};

pipeline::RunConfig resolve_config(const Options& o) {
  auto cfg = pipeline::RunConfig::for_profile(o.profile == "paper" ? pipeline::Profile::paper
                                                                   : pipeline::Profile::desk);
  if (!o.config_file.empty()) cfg.apply_file(o.config_file);
  for (const auto& kv : o.overrides) cfg.apply_text(kv);
  if (o.reps > 0) cfg.set("sim.replications", std::to_string(o.reps));
  if (o.seed >= 0) cfg.set("sim.seed", std::to_string(o.seed));
  return cfg;
}

const char* describe(const std::string& stage) {
  static const std::map<std::string, const char*> text = {
      {"simulate", "Simulate replications and write daily traces"},
      {"validate", "Check the simulator against the CTMC throughput"},
      {"prep", "Label, split and fit normalization statistics"},
      {"train-ae", "Train the window autoencoder on normal data"},
      {"fit-detector", "Fit PCA and the one-class SVM on reconstruction errors"},
      {"train-classifier", "Train the disruption class LSTM"},
      {"train-ttr", "Train one time-to-recovery LSTM per disruption scenario"},
      {"detect", "Flag disrupted test windows and report lags"},
      {"evaluate", "Score the classifier and TTR models on test data"},
      {"grid-search", "Sweep nu and gamma for the one-class SVM"},
  };
  auto it = text.find(stage);
  return it == text.end() ? "" : it->second;
}

std::filesystem::path output_root(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("SCDT_OUTPUT"); env && *env) return env;
  return std::filesystem::path("runs") / o.profile;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supply chain disruption twin: simulation, detection, identification and recovery prediction"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--profile", o.profile, "Default configuration profile")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  app.add_option("-c,--config", o.config_file, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", o.overrides, "Override one key, e.g. --set ae.epochs=50");
  app.add_option("-o,--out", o.out, "Output directory (default: $SCDT_OUTPUT or runs/<profile>)");
  app.add_flag("-q,--quiet", o.quiet, "Only print warnings and errors");

  std::vector<std::string> stages;
  for (const auto& name : pipeline::stage_names()) {
    auto* sub = app.add_subcommand(name, describe(name));
    if (name == "simulate") {
      sub->add_option("--scenario", o.scenarios, "Scenario(s) to simulate, S0..S4 (default all)")
          ->check(CLI::IsMember({"S0", "S1", "S2", "S3", "S4"}));
      sub->add_option("--reps", o.reps, "Replications per scenario")->check(CLI::PositiveNumber);
      sub->add_option("--seed", o.seed, "Base simulation seed")->check(CLI::NonNegativeNumber);
    }
  }
  app.add_subcommand("all", "Run every stage in order");
  auto* show = app.add_subcommand("config", "Print the resolved configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (o.quiet) set_log_level(LogLevel::warning);

  try {
    const auto cfg = resolve_config(o);
    if (show->parsed()) {
      std::cout << cfg.to_text();
      return 0;
    }
    pipeline::Workspace ws(output_root(o), cfg);
    for (const auto& s : o.scenarios) ws.simulate_only.push_back(sim::parse_scenario(s));

    const auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "all")
      stages = pipeline::stage_names();
    else
      stages = {sub->get_name()};

    bool passed = true;
    for (const auto& stage : stages) {
      const auto r = pipeline::run_stage(ws, stage);
      std::cout << nlohmann::json{{"stage", r.stage}, {"passed", r.passed}, {"summary", r.summary}}.dump(2) << '\n';
      passed = passed && r.passed;
    }
    return passed ? 0 : kExitFailedCheck;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
