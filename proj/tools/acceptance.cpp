// Runs the desk-scale pipeline (reusing up-to-date stages) and prints one
// PASS/FAIL line per acceptance criterion. Exit code 0 if all pass, 2 if any fails, 1 on error.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scdt/data/normalize.hpp"
#include "scdt/detect/ocsvm.hpp"
#include "scdt/log.hpp"
#include "scdt/metrics/metrics.hpp"
#include "scdt/nn/gradcheck.hpp"
#include "scdt/nn/serialize.hpp"
#include "scdt/pipeline/stages.hpp"
#include "scdt/random.hpp"
#include "scdt/sim/invariants.hpp"

using namespace scdt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Line {
  int id;
  bool pass;
  std::string text;
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double get(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

json manifest(const pipeline::Workspace& ws, const std::string& stage) {
  return nn::read_json(ws.path("manifests/" + stage + ".json"));
}

void run_pipeline(pipeline::Workspace& ws, bool reuse) {
  for (const auto& stage : pipeline::stage_names()) {
    if (reuse && pipeline::stage_current(ws, stage)) {
      log_info("stage " + stage + " is up to date");
      continue;
    }
    pipeline::run_stage(ws, stage);
  }
}

Line criterion1(pipeline::Workspace& ws) {
  const auto m = manifest(ws, "validate");
  const auto& s = m.at("summary");
  const double oracle = s.at("oracle_throughput").get<double>();
  const double wall = m.at("wall_time_s").get<double>();
  const bool oracle_ok = std::abs(oracle - 10.69) <= 0.02;
  const bool ci = s.at("ci_contains_oracle").get<bool>();
  const bool not_rejected = !s.at("rejected").get<bool>();
  return {1, oracle_ok && ci && not_rejected && wall < 120.0,
          "simulator validation: oracle " + num(oracle, 8) + ", simulated " + num(s.at("simulated_mean").get<double>(), 6) +
              " (99% CI " + num(s.at("ci_low").get<double>(), 6) + ".." + num(s.at("ci_high").get<double>(), 6) +
              "), z " + num(s.at("z").get<double>(), 3) + (not_rejected ? " not rejected" : " rejected") + ", " +
              num(wall, 3) + " s"};
}

Line criterion2(pipeline::Workspace& ws) {
  const auto m = manifest(ws, "detect");
  const auto& s = m.at("summary");
  const double recall = get(s.at("recall")), accuracy = get(s.at("accuracy"));
  const double s0 = s.at("s0_flag_fraction").get<double>();
  double total = 0.0;
  for (const auto& stage : pipeline::stage_names()) total += manifest(ws, stage).at("wall_time_s").get<double>();
  const bool pass = recall >= 0.90 && accuracy >= 0.80 && s0 >= 0.01 && s0 <= 0.05 && total < 4 * 3600.0;
  std::string held_out;
  if (s.contains("s0_validation_flag_fraction"))
    held_out = " (held-out S0 validation " + num(s.at("s0_validation_flag_fraction").get<double>()) + ")";
  return {2, pass,
          "detection: recall " + num(recall) + ", accuracy " + num(accuracy) + ", S0 flag fraction " + num(s0) +
              held_out + ", pipeline " + num(total / 60.0, 3) + " min"};
}

Line criterion3(pipeline::Workspace& ws) {
  const auto m = manifest(ws, "detect");
  const auto& l = m.at("summary").at("lag_stats");
  const double mean = get(l.at("mean")), median = get(l.at("median"));
  return {3, mean <= 10.0 && median <= 6.0,
          "detection lag: mean " + num(mean) + " d, median " + num(median) + " d, max " + num(get(l.at("max"))) +
              " d, undetected " + std::to_string(l.at("undetected").get<long>())};
}

struct GridRow {
  double nu, gamma, accuracy, f1, mean_lag, fa;
};

std::vector<GridRow> read_grid(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<GridRow> rows;
  auto field = [](const std::string& s) { return s.empty() ? std::nan("") : std::stod(s); };
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    while (f.size() < 8) f.emplace_back();
    rows.push_back({field(f[0]), field(f[1]), field(f[2]), field(f[3]), field(f[4]), field(f[6])});
  }
  return rows;
}

Line criterion4(pipeline::Workspace& ws) {
  const auto rows = read_grid(ws.path("reports/grid.csv"));
  const GridRow* best_acc = nullptr;
  const GridRow* best_f1 = nullptr;
  for (const auto& r : rows) {
    if (!std::isnan(r.accuracy) && (!best_acc || r.accuracy > best_acc->accuracy)) best_acc = &r;
    if (!std::isnan(r.f1) && (!best_f1 || r.f1 > best_f1->f1)) best_f1 = &r;
  }
  auto in_region = [](const GridRow* r) { return r && r->nu <= 0.1 + 1e-12 && r->gamma >= 0.1 - 1e-12 && r->gamma <= 100 + 1e-9; };
  std::map<double, std::vector<GridRow>> by_gamma;
  for (const auto& r : rows) by_gamma[r.gamma].push_back(r);
  int lag_breaks = 0, fa_breaks = 0;
  for (auto& [g, v] : by_gamma) {
    std::sort(v.begin(), v.end(), [](const GridRow& a, const GridRow& b) { return a.nu < b.nu; });
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].mean_lag > v[i - 1].mean_lag + 1e-9) ++lag_breaks;
      if (v[i].fa < v[i - 1].fa - 1e-9) ++fa_breaks;
    }
  }
  // Cells tied with the best count as best.
  auto region_attains = [&](auto metric, const GridRow* best) {
    if (!best) return false;
    for (const auto& r : rows)
      if (in_region(&r) && metric(r) >= metric(*best)) return true;
    return false;
  };
  const bool acc_ok = region_attains([](const GridRow& r) { return r.accuracy; }, best_acc);
  const bool f1_ok = region_attains([](const GridRow& r) { return r.f1; }, best_f1);
  const bool pass = acc_ok && f1_ok && lag_breaks == 0 && fa_breaks == 0;
  std::string text = "grid search: " + std::to_string(rows.size()) + " cells";
  if (best_acc) text += ", best accuracy " + num(best_acc->accuracy) + " at nu " + num(best_acc->nu) + " gamma " + num(best_acc->gamma);
  if (best_f1) text += ", best F1 " + num(best_f1->f1) + " at nu " + num(best_f1->nu) + " gamma " + num(best_f1->gamma);
  text += std::string(", region attains best: ") + (acc_ok && f1_ok ? "yes" : "no");
  text += ", mean-lag increases " + std::to_string(lag_breaks) + ", false-alarm decreases " + std::to_string(fa_breaks);
  return {4, pass, text};
}

Line criterion5(pipeline::Workspace& ws) {
  const auto rep = nn::read_json(ws.path("reports/classifier.json"));
  bool pass = true;
  std::string text = "classifier F1:";
  for (const auto& [name, c] : rep.at("classes").items()) {
    const double f1 = get(c.at("f1"));
    const double need = name == "Recovery" ? 0.85 : 0.90;
    pass = pass && f1 >= need;
    text += " " + name + " " + num(f1, 3);
  }
  const auto& lc = rep.at("largest_confusion");
  const std::string a = lc.at("actual"), p = lc.at("predicted");
  const bool nr = (a == "Normal" && p == "Recovery") || (a == "Recovery" && p == "Normal");
  text += "; largest confusion " + a + "->" + p + " (" + std::to_string(lc.at("count").get<long>()) + ")";
  return {5, pass && nr, text};
}

Line criterion6(pipeline::Workspace& ws) {
  const auto rep = nn::read_json(ws.path("reports/ttr.json"));
  bool pass = true;
  std::string text = "TTR:";
  for (const auto& [name, s] : rep.items()) {
    const double mape = get(s.at("errors").at("mape"));
    const double frac = s.at("final_window").at("fraction").get<double>();
    pass = pass && mape <= 0.35 && frac >= 0.70;
    text += " " + name + " MAPE " + num(mape, 3) + " final-window-within-20% " + num(frac, 3) + ";";
  }
  text.pop_back();
  return {6, pass, text};
}

// --- property suite --------------------------------------------------------

nn::Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  auto rng = substream(seed, Stream::init);
  nn::Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = 2.0 * uniform_open(rng) - 1.0;
  return m;
}

std::vector<std::string> property_failures(const pipeline::Workspace& ws) {
  std::vector<std::string> fail;

  {
    nn::Network dense;
    dense.add<nn::Dense>(5, 4, nn::Activation::tanh);
    dense.add<nn::Dense>(4, 3, nn::Activation::softmax);
    dense.initialize(3);
    const double e = nn::check_gradients(dense, nn::as_sequence(random_matrix(3, 5, 4)), 17, {1e-3}).max_relative_error;
    if (!(e < 1e-4)) fail.push_back("dense gradient error " + num(e));
    nn::Network lstm;
    lstm.add<nn::Lstm>(3, 4, true);
    lstm.add<nn::Lstm>(4, 3, false);
    lstm.add<nn::Dense>(3, 1, nn::Activation::linear);
    lstm.initialize(5);
    nn::Sequence seq;
    for (int t = 0; t < 5; ++t) seq.push_back(random_matrix(2, 3, 30 + static_cast<std::uint64_t>(t)));
    const double el = nn::check_gradients(lstm, seq, 5, {1e-3}).max_relative_error;
    if (!(el < 1e-4)) fail.push_back("lstm gradient error " + num(el));
  }

  {
    std::vector<double> x(20);
    auto rng = substream(1, Stream::init);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = 0.5 * static_cast<double>(k) + 0.1 * (uniform_open(rng) - 0.5);
    for (double nu : {0.1, 0.25, 0.5}) {
      detect::OcsvmParams p{nu, 2.0};
      const auto s = detect::ocsvm_solve(x, p);
      const auto ref = detect::qp_reference(x, nu, 2.0);
      const double diff = (s.alpha - ref).cwiseAbs().maxCoeff();
      if (!(diff < 1e-6)) fail.push_back("ocsvm alpha differs from QP by " + num(diff));
      const auto model = detect::ocsvm_fit(x, p);
      double rho = 0.0;
      int free = 0;
      auto f = [&](double q) {
        double v = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) v += ref(static_cast<Eigen::Index>(k)) * detect::rbf(x[k], q, 2.0);
        return v;
      };
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = ref(static_cast<Eigen::Index>(k));
        if (a > 1e-9 && a < s.bound - 1e-9) {
          rho += f(x[k]);
          ++free;
        }
      }
      rho /= std::max(free, 1);
      int mismatches = 0;
      for (int q = -40; q <= 240; ++q) {
        const double v = 0.05 * q;
        const double fm = model.decision(v);
        if (std::abs(fm) > 1e-6 && ((f(v) - rho >= 0.0) != (fm >= 0.0))) ++mismatches;
      }
      if (mismatches) fail.push_back("ocsvm decisions differ from QP at " + std::to_string(mismatches) + " points");
    }
  }

  {
    const metrics::BinaryCounts c{8, 1, 1, 10};
    if (*metrics::accuracy(c) != 18.0 / 20.0 || *metrics::precision(c) != 8.0 / 9.0 ||
        *metrics::recall(c) != 8.0 / 9.0 || std::abs(*metrics::f1(c) - 8.0 / 9.0) > 1e-15)
      fail.push_back("binary metric hand case");
    const std::vector<double> y{10, 20}, yh{9, 22};
    const auto e = metrics::regression_errors(y, yh);
    if (e.mae != 1.5 || e.mse != 2.5 || std::abs(*e.mape - 0.10) > 1e-15) fail.push_back("regression hand case");
    const std::vector<std::optional<int>> lags{4, 4, 23};
    const auto ls = metrics::lag_stats(lags);
    if (*ls.median != 4.0 || *ls.max != 23.0 || std::abs(*ls.mean - 31.0 / 3.0) > 1e-12)
      fail.push_back("lag hand case");
  }

  {
    const nn::Matrix m = random_matrix(50, 13, 8) * 100.0;
    const auto stats = data::fit_minmax(m);
    const auto back = data::invert_minmax(stats, data::apply_minmax(stats, m));
    const double err = (back - m).cwiseAbs().maxCoeff();
    if (!(err < 1e-12)) fail.push_back("min-max round trip error " + num(err));
  }

  {
    // Traces on disk carry no audit counters; rerun the simulator for them.
    long violations = 0, traces = 0;
    const auto& p = ws.config().dataset.sim;
    for (auto id : sim::kAllScenarios) {
      for (int r = 0; r < ws.config().dataset.replications; ++r) {
        const auto t = sim::run_replication(p, sim::sample_scenario(p, id, r), r);
        violations += static_cast<long>(sim::check_invariants(t, p).size());
        ++traces;
      }
    }
    if (violations) fail.push_back(std::to_string(violations) + " invariant violations over " + std::to_string(traces) + " traces");
  }
  return fail;
}

std::vector<std::string> rerun_differences(const fs::path& scratch) {
  auto cfg = pipeline::RunConfig::for_profile(pipeline::Profile::desk);
  cfg.apply_text(
      "sim.replications = 5\nae.epochs = 2\nclassifier.epochs = 1\nttr.epochs = 1\n"
      "grid.nu = 0.025,0.1\ngrid.gamma = 1,100\n");
  std::vector<std::map<std::string, std::string>> hashes;
  for (const char* name : {"a", "b"}) {
    const auto dir = scratch / name;
    fs::remove_all(dir);
    pipeline::Workspace ws(dir, cfg);
    run_pipeline(ws, false);
    std::map<std::string, std::string> h;
    for (const auto& stage : pipeline::stage_names())
      for (const auto& [file, hash] : manifest(ws, stage).at("outputs").items()) h[file] = hash.get<std::string>();
    hashes.push_back(std::move(h));
  }
  std::vector<std::string> diff;
  for (const auto& [file, hash] : hashes[0]) {
    const auto it = hashes[1].find(file);
    if (it == hashes[1].end() || it->second != hash) diff.push_back(file);
  }
  if (hashes[0].size() != hashes[1].size()) diff.push_back("output file lists differ");
  fs::remove_all(scratch);
  return diff;
}

Line criterion7(const pipeline::Workspace& ws, const fs::path& scratch) {
  auto fail = property_failures(ws);
  const auto diff = rerun_differences(scratch);
  for (const auto& f : diff) fail.push_back("rerun differs: " + f);
  std::string text = "property suite: gradients, OCSVM vs QP, metric hand cases, min-max round trip, invariants, byte-identical rerun";
  if (!fail.empty()) {
    text += "; failures:";
    for (const auto& f : fail) text += " " + f + ";";
    text.pop_back();
  }
  return {7, fail.empty(), text};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path root = "acceptance_run";
  if (const char* env = std::getenv("SCDT_OUTPUT"); env && *env) root = env;
  if (argc > 1) root = argv[1];
  set_log_level(LogLevel::warning);

  std::vector<Line> lines;
  try {
    pipeline::Workspace ws(root, pipeline::RunConfig::for_profile(pipeline::Profile::desk));
    run_pipeline(ws, true);
    for (auto* check : {criterion1, criterion2, criterion3, criterion4, criterion5, criterion6}) {
      try {
        lines.push_back(check(ws));
      } catch (const std::exception& e) {
        lines.push_back({static_cast<int>(lines.size()) + 1, false, std::string("error: ") + e.what()});
      }
    }
    try {
      lines.push_back(criterion7(ws, root / "rerun_scratch"));
    } catch (const std::exception& e) {
      lines.push_back({7, false, std::string("error: ") + e.what()});
    }
  } catch (const std::exception& e) {
    std::cerr << "pipeline error: " << e.what() << '\n';
    for (int id = 1; id <= 7; ++id) std::cout << "criterion " << id << ": FAIL (pipeline did not complete)\n";
    return 1;
  }

  bool all = true;
  for (const auto& l : lines) {
    std::cout << "criterion " << l.id << ": " << (l.pass ? "PASS" : "FAIL") << "  " << l.text << '\n';
    all = all && l.pass;
  }
  return all ? 0 : 2;
}
