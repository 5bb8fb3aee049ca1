#include "doctest.h"
#include "scdt/pipeline/config.hpp"
#include "scdt/pipeline/stages.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

using namespace scdt;
using namespace scdt::pipeline;

TEST_CASE("config text round trip") {
  auto cfg = RunConfig::for_profile(Profile::desk);
  cfg.set("ae.epochs", "7");
  cfg.set("ttr.features", "wip,lead_time");
  cfg.set("grid.nu", "0.05,0.1");
  auto back = RunConfig::for_profile(Profile::paper);
  back.apply_text(cfg.to_text());
  CHECK(back.to_text() == cfg.to_text());
  CHECK(back.autoencoder.epochs == 7);
  CHECK(back.ttr_features.size() == 2);
}

TEST_CASE("profiles differ in scale only") {
  const auto desk = RunConfig::for_profile(Profile::desk);
  const auto paper = RunConfig::for_profile(Profile::paper);
  CHECK(desk.dataset.replications == 50);
  CHECK(desk.autoencoder.epochs == 200);
  CHECK(paper.dataset.replications == 300);
  CHECK(paper.autoencoder.epochs == 1000);
  CHECK(desk.ocsvm.nu == paper.ocsvm.nu);
}

TEST_CASE("malformed config is rejected") {
  auto cfg = RunConfig::for_profile(Profile::desk);
  CHECK_THROWS_AS(cfg.set("ae.epoch", "3"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.set("ae.epochs", "three"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.apply_text("# comment\nae.epochs 3\n"), std::invalid_argument);
  try {
    cfg.apply_text("ae.epochs = 3\nnope = 1\n");
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  cfg.apply_text("ae.epochs = 4  # trailing\n\n");
  CHECK(cfg.autoencoder.epochs == 4);
}

TEST_CASE("stage manifests make reruns skippable") {
  const auto root = std::filesystem::temp_directory_path() / "scdt_stage_test";
  std::filesystem::remove_all(root);
  auto cfg = RunConfig::for_profile(Profile::desk);
  cfg.set("sim.replications", "5");
  Workspace ws(root, cfg);
  CHECK_FALSE(stage_current(ws, "simulate"));
  const auto sim = run_stage(ws, "simulate");
  CHECK(sim.passed);
  CHECK(std::filesystem::exists(root / "manifests" / "simulate.json"));
  CHECK(stage_current(ws, "simulate"));

  const auto prep = run_stage(ws, "prep");
  CHECK(prep.passed);
  CHECK(stage_current(ws, "prep"));

  std::ofstream(root / prep.outputs.front(), std::ios::app) << "x";
  CHECK_FALSE(stage_current(ws, "prep"));

  cfg.set("sim.seed", "99");
  Workspace other(root, cfg);
  CHECK_FALSE(stage_current(other, "simulate"));
  std::filesystem::remove_all(root);
}
