#include "scdt/pipeline/stages.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "scdt/data/sources.hpp"
#include "scdt/detect/detector.hpp"
#include "scdt/log.hpp"
#include "scdt/models/sequence.hpp"
#include "scdt/nn/serialize.hpp"
#include "scdt/sim/invariants.hpp"
#include "scdt/sim/validation.hpp"

namespace scdt::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<sim::ScenarioId, 1> kNormalOnly{sim::ScenarioId::normal};

std::size_t ttr_slot(sim::ScenarioId id) {
  if (id == sim::ScenarioId::normal) throw std::invalid_argument("S0 has no TTR model");
  return static_cast<std::size_t>(id) - 1;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_curve(const fs::path& path, const nn::LearningCurve& c) {
  auto out = open_out(path);
  out << "epoch,train_loss,validation_loss\n";
  for (std::size_t e = 0; e < c.train.size(); ++e) {
    out << e + 1 << ',' << json(c.train[e]).dump() << ',';
    if (e < c.validation.size()) out << json(c.validation[e]).dump();
    out << '\n';
  }
}

json curve_summary(const nn::TrainResult& r) {
  json j{{"epochs", r.curve.train.size()}, {"diverged", r.diverged}};
  if (!r.curve.train.empty()) {
    j["first_train_loss"] = r.curve.train.front();
    j["final_train_loss"] = r.curve.train.back();
  }
  if (!r.curve.validation.empty()) j["final_validation_loss"] = r.curve.validation.back();
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

std::string ttr_file(sim::ScenarioId id) { return "models/ttr_" + std::string(sim::to_string(id)) + ".json"; }

nn::Network load_network(const Workspace& ws, const std::string& rel) {
  return nn::network_from_json(nn::read_json(ws.path(rel)));
}

struct LoadedDetector {
  nn::Network autoencoder;
  detect::DetectorModel model;
  data::NormalizationStats stats;
  std::string fit_split;
};

LoadedDetector load_detector(const Workspace& ws) {
  const auto bundle = nn::read_json(ws.path("models/detector.json"));
  if (bundle.value("format", "") != "scdt-detector" || bundle.value("version", 0) != 1)
    throw std::runtime_error("models/detector.json: unsupported detector bundle");
  const std::string ae_file = bundle.at("autoencoder").at("file").get<std::string>();
  if (file_hash(ws.path(ae_file)) != bundle.at("autoencoder").at("hash").get<std::string>())
    throw std::runtime_error("detector bundle was fitted on a different " + ae_file + "; rerun fit-detector");
  LoadedDetector d{load_network(ws, ae_file), {}, detect::stats_from_json(bundle.at("stats")),
                   bundle.at("fit_split").get<std::string>()};
  d.model.mode = detect::parse_error_mode(bundle.at("error_mode").get<std::string>());
  d.model.pca = detect::pca_from_json(bundle.at("pca"));
  d.model.svm = detect::ocsvm_from_json(bundle.at("ocsvm"));
  return d;
}

Part fit_part(const std::string& name) { return name == "validation" ? Part::validation : Part::test; }

Eigen::VectorXd scores_of(LoadedDetector& d, const data::WindowSet& set) {
  return detect::pc_scores(d.model, detect::reconstruction_errors(d.autoencoder, set, d.model.mode));
}

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// --- stages ---------------------------------------------------------------

StageResult simulate(Workspace& ws) {
  StageResult r;
  const auto& cfg = ws.config();
  Dataset ds;
  ds.config = cfg.dataset;
  const auto wanted = ws.simulate_only.empty()
                          ? std::vector<sim::ScenarioId>(sim::kAllScenarios.begin(), sim::kAllScenarios.end())
                          : ws.simulate_only;
  long violations = 0;
  json per = json::object();
  for (auto id : wanted) {
    auto traces = sim::generate_scenario_dataset(cfg.dataset.sim, id, cfg.dataset.replications);
    long v = 0;
    for (const auto& t : traces) {
      for (const auto& msg : sim::check_invariants(t, cfg.dataset.sim)) {
        if (v < 5) log_warning(std::string(sim::to_string(id)) + " rep " + std::to_string(t.replication) + ": " + msg);
        ++v;
      }
    }
    violations += v;
    per[std::string(sim::to_string(id))] = {{"replications", traces.size()}, {"invariant_violations", v}};
    ds.scenarios[static_cast<std::size_t>(id)] = assemble_scenario(id, std::move(traces), cfg.dataset);
  }
  fs::remove_all(ws.path("data"));
  write_traces(ws.path("data"), ds);
  ws.reset_cache();
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& entry : fs::recursive_directory_iterator(ws.path("data"))) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), ws.root()).generic_string();
    r.outputs.push_back(rel);
  }
  std::sort(r.outputs.begin(), r.outputs.end());
  for (const auto& rel : r.outputs) h = fnv1a(file_hash(ws.path(rel)), fnv1a(rel, h));
  r.summary = {{"scenarios", per}, {"invariant_violations", violations}, {"dataset_checksum", hex64(h)}};
  r.passed = violations == 0;
  return r;
}

StageResult validate(Workspace& ws) {
  StageResult r;
  sim::ValidationOptions opt;
  opt.alpha = ws.config().validation_alpha;
  const auto rep = sim::validate_simulator(ws.config().dataset.sim, opt);
  r.summary = {{"oracle_throughput", rep.oracle_throughput},
               {"simulated_mean", rep.simulated_mean},
               {"simulated_sd", rep.simulated_sd},
               {"days", rep.replications},
               {"alpha", rep.alpha},
               {"ci_low", rep.simulated_mean - rep.half_width},
               {"ci_high", rep.simulated_mean + rep.half_width},
               {"ci_contains_oracle", rep.ci_contains_oracle()},
               {"z", rep.test.z},
               {"z_critical", rep.test.critical},
               {"rejected", rep.test.reject}};
  nn::write_json(ws.path("reports/validation.json"), r.summary);
  r.outputs = {"reports/validation.json"};
  r.passed = !rep.test.reject && rep.ci_contains_oracle();
  return r;
}

StageResult prep(Workspace& ws) {
  StageResult r;
  const auto& ds = ws.dataset();
  const auto dis = std::span<const sim::ScenarioId>(sim::kDisruptedScenarios);
  PrepStats st;
  st.detector = fit_stats(ds, kNormalOnly, Part::train);
  st.classifier = fit_stats(ds, dis, Part::train);
  for (auto id : sim::kDisruptedScenarios) {
    std::array<sim::ScenarioId, 1> one{id};
    st.ttr[ttr_slot(id)] = fit_stats(ds, one, Part::train);
  }
  nn::write_json(ws.path("prep/stats.json"), to_json(st));

  json splits = json::object();
  json windows = json::object();
  auto labels = open_out(ws.path("prep/labels.csv"));
  labels << "scenario,replication,day,label,anomalous,ttr\n";
  for (const auto& sd : ds.scenarios) {
    const std::string name(sim::to_string(sd.id));
    json recs = json::array();
    for (std::size_t i = 0; i < sd.traces.size(); ++i) {
      const auto& t = sd.traces[i];
      const auto& lt = sd.labels[i];
      json rj{{"replication", t.replication}};
      if (t.scenario.window) {
        rj["onset"] = t.scenario.window->onset;
        rj["duration"] = t.scenario.window->duration;
      }
      if (lt.recovery) {
        rj["recovery_day"] = lt.recovery->recovery_day;
        rj["wip_threshold"] = lt.recovery->wip_threshold;
        rj["censored"] = lt.recovery->censored;
      }
      recs.push_back(rj);
      for (const auto& rec : lt.records)
        labels << name << ',' << t.replication << ',' << rec.record.day << ',' << data::to_string(rec.label) << ','
               << (rec.anomalous ? 1 : 0) << ',' << rec.ttr << '\n';
    }
    splits[name] = {{"split", to_json(sd.split)}, {"replications", recs}};
    json w = json::object();
    for (Part p : {Part::train, Part::validation, Part::test}) {
      long n = 0;
      for (int rep : sd.part(p))
        n += std::max<long>(0, static_cast<long>(sd.traces[static_cast<std::size_t>(rep)].records.size()) -
                                   data::kWindowSize + 1);
      w[std::string(to_string(p))] = n;
    }
    windows[name] = w;
  }
  nn::write_json(ws.path("prep/splits.json"), splits);
  ws.reset_cache();
  r.summary = {{"windows", windows}, {"constant_detector_features", st.detector.constant_features()}};
  r.inputs = {"data/manifest.json"};
  r.outputs = {"prep/stats.json", "prep/splits.json", "prep/labels.csv"};
  return r;
}

StageResult train_ae(Workspace& ws) {
  StageResult r;
  const auto& cfg = ws.config();
  const auto& ds = ws.dataset();
  const auto train = make_window_set(ds, kNormalOnly, Part::train, ws.stats().detector);
  const auto val = make_window_set(ds, kNormalOnly, Part::validation, ws.stats().detector);
  auto ae = detect::build_autoencoder(cfg.autoencoder, cfg.autoencoder_seed);
  data::ReconstructionSource trs(train), vas(val);
  const auto res = nn::train(ae, trs, &vas, cfg.autoencoder.train_config(cfg.autoencoder_seed),
                             [](int epoch, double tl, double vl) {
                               if ((epoch + 1) % 10 == 0)
                                 log_info("autoencoder epoch " + std::to_string(epoch + 1) + " train " +
                                          std::to_string(tl) + " validation " + std::to_string(vl));
                             });
  if (res.diverged) throw std::runtime_error("autoencoder training aborted: " + res.message);
  nn::write_json(ws.path("models/autoencoder.json"), nn::network_to_json(ae));
  write_curve(ws.path("curves/autoencoder.csv"), res.curve);
  r.summary = curve_summary(res);
  r.summary["train_windows"] = train.size();
  r.inputs = {"data/manifest.json", "prep/stats.json"};
  r.outputs = {"models/autoencoder.json", "curves/autoencoder.csv"};
  return r;
}

StageResult fit_detector(Workspace& ws) {
  StageResult r;
  const auto& cfg = ws.config();
  const auto& ds = ws.dataset();
  const auto& stats = ws.stats().detector;
  auto ae = load_network(ws, "models/autoencoder.json");
  const auto train = make_window_set(ds, kNormalOnly, Part::train, stats);
  const auto fit_set = make_window_set(ds, kNormalOnly, fit_part(cfg.detector_fit_split), stats);
  detect::DetectorModel m;
  m.mode = cfg.error_mode;
  m.pca = detect::fit_pca1(detect::reconstruction_errors(ae, train, m.mode));
  const Eigen::VectorXd scores =
      detect::pc_scores(m, detect::reconstruction_errors(ae, fit_set, m.mode));
  m.svm = detect::ocsvm_fit(as_vector(scores), cfg.ocsvm);
  json bundle{{"format", "scdt-detector"},
              {"version", 1},
              {"autoencoder", {{"file", "models/autoencoder.json"}, {"hash", file_hash(ws.path("models/autoencoder.json"))}}},
              {"stats", detect::to_json(stats)},
              {"error_mode", detect::to_string(m.mode)},
              {"fit_split", cfg.detector_fit_split},
              {"pca", detect::to_json(m.pca)},
              {"ocsvm", detect::to_json(m.svm)}};
  nn::write_json(ws.path("models/detector.json"), bundle);
  long flagged = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) flagged += m.svm.is_normal(scores(i)) ? 0 : 1;
  r.summary = {{"explained_ratio", m.pca.explained_ratio},
               {"fit_windows", scores.size()},
               {"score_min", scores.minCoeff()},
               {"score_max", scores.maxCoeff()},
               {"support_vectors", m.svm.support.size()},
               {"rho", m.svm.rho},
               {"iterations", m.svm.iterations},
               {"converged", m.svm.converged},
               {"fit_flag_fraction", static_cast<double>(flagged) / static_cast<double>(scores.size())}};
  r.inputs = {"data/manifest.json", "prep/stats.json", "models/autoencoder.json"};
  r.outputs = {"models/detector.json"};
  return r;
}

StageResult train_classifier(Workspace& ws) {
  StageResult r;
  const auto& cfg = ws.config();
  const auto& ds = ws.dataset();
  const auto dis = std::span<const sim::ScenarioId>(sim::kDisruptedScenarios);
  const auto train = make_window_set(ds, dis, Part::train, ws.stats().classifier);
  const auto val = make_window_set(ds, dis, Part::validation, ws.stats().classifier);
  const auto census = models::class_census(train);
  auto m = models::train_classifier(cfg.classifier, train, &val, cfg.classifier_seed);
  if (m.result.diverged) throw std::runtime_error("classifier training aborted: " + m.result.message);
  nn::write_json(ws.path("models/classifier.json"), nn::network_to_json(m.net));
  write_curve(ws.path("curves/classifier.csv"), m.result.curve);
  r.summary = curve_summary(m.result);
  json c = json::object();
  for (int k = 0; k < data::kNumClasses; ++k)
    c[std::string(data::to_string(data::class_from_index(k)))] = census[static_cast<std::size_t>(k)];
  r.summary["class_census"] = c;
  r.inputs = {"data/manifest.json", "prep/stats.json"};
  r.outputs = {"models/classifier.json", "curves/classifier.csv"};
  return r;
}

StageResult train_ttr(Workspace& ws) {
  StageResult r;
  const auto& cfg = ws.config();
  const auto& ds = ws.dataset();
  r.inputs = {"data/manifest.json", "prep/stats.json"};
  for (auto id : sim::kDisruptedScenarios) {
    std::array<sim::ScenarioId, 1> one{id};
    const auto& stats = ws.stats().for_ttr(id);
    const double scale = max_train_ttr(ds, id);
    auto m = models::train_ttr(id, cfg.ttr, make_window_set(ds, one, Part::train, stats),
                               make_window_set(ds, one, Part::validation, stats),
                               data::TtrTransform{scale, cfg.ttr_log_target}, cfg.ttr_features,
                               cfg.ttr_seed + static_cast<std::uint64_t>(id));
    if (m.result.diverged) throw std::runtime_error("TTR training aborted: " + m.result.message);
    const std::string name(sim::to_string(id));
    nn::write_json(ws.path(ttr_file(id)), models::to_json(m));
    write_curve(ws.path("curves/ttr_" + name + ".csv"), m.result.curve);
    auto s = curve_summary(m.result);
    s["scale"] = scale;
    s["target"] = cfg.ttr_log_target ? "log" : "linear";
    s["features"] = feature_list(m.features);
    r.summary[name] = s;
    r.outputs.push_back(ttr_file(id));
    r.outputs.push_back("curves/ttr_" + name + ".csv");
  }
  return r;
}

StageResult detect_stage(Workspace& ws) {
  StageResult r;
  const auto& ds = ws.dataset();
  auto d = load_detector(ws);
  auto scores_csv = open_out(ws.path("reports/pc_scores.csv"));
  scores_csv << "scenario,replication,end_day,score,flagged,anomalous\n";
  auto lags_csv = open_out(ws.path("reports/lags.csv"));
  lags_csv << "scenario,replication,onset,lag\n";
  json per = json::object();
  metrics::BinaryCounts all;
  std::vector<std::optional<int>> all_lags;
  double s0_fraction = 0.0;
  std::optional<double> s0_validation_fraction;
  std::vector<sim::ScenarioId> order{sim::ScenarioId::normal};
  order.insert(order.end(), sim::kDisruptedScenarios.begin(), sim::kDisruptedScenarios.end());
  for (auto id : order) {
    std::array<sim::ScenarioId, 1> one{id};
    const std::string name(sim::to_string(id));
    const auto set = make_window_set(ds, one, Part::test, d.stats);
    const auto series = detect::assemble_detections(set, scores_of(d, set), d.model.svm);
    for (const auto& s : series) {
      for (std::size_t i = 0; i < s.score.size(); ++i)
        scores_csv << name << ',' << s.replication << ',' << s.end_day[i] << ',' << json(s.score[i]).dump() << ','
                   << (s.flagged[i] ? 1 : 0) << ',' << (s.truth[i] ? 1 : 0) << '\n';
      if (s.onset) {
        lags_csv << name << ',' << s.replication << ',' << *s.onset << ',';
        if (s.lag) lags_csv << *s.lag;
        lags_csv << '\n';
      }
    }
    const auto counts = detect::window_counts(series);
    if (id == sim::ScenarioId::normal) {
      s0_fraction = detect::flag_fraction(series);
      per[name] = metrics::detection_report("test " + name, "detector", counts, nullptr);
      per[name]["flag_fraction"] = s0_fraction;
      if (d.fit_split != "validation") {
        const auto vset = make_window_set(ds, one, Part::validation, d.stats);
        s0_validation_fraction =
            detect::flag_fraction(detect::assemble_detections(vset, scores_of(d, vset), d.model.svm));
        per[name]["validation_flag_fraction"] = *s0_validation_fraction;
      }
      continue;
    }
    const auto l = detect::lags(series);
    const auto ls = metrics::lag_stats(l);
    per[name] = metrics::detection_report("test " + name, "detector", counts, &ls);
    per[name]["false_alarm_pct"] = detect::false_alarm_percent(series);
    all += counts;
    all_lags.insert(all_lags.end(), l.begin(), l.end());
  }
  const auto ls = metrics::lag_stats(all_lags);
  json overall = metrics::detection_report("test S1-S4", "detector", all, &ls);
  json report{{"disrupted", overall},
              {"scenarios", per},
              {"s0_flag_fraction", s0_fraction},
              {"explained_ratio", d.model.pca.explained_ratio},
              {"nu", d.model.svm.nu},
              {"gamma", d.model.svm.gamma}};
  nn::write_json(ws.path("reports/detection.json"), report);
  r.summary = {{"accuracy", metrics::to_json(metrics::accuracy(all))},
               {"recall", metrics::to_json(metrics::recall(all))},
               {"s0_flag_fraction", s0_fraction},
               {"lag_stats", metrics::to_json(ls)}};
  if (s0_validation_fraction) r.summary["s0_validation_flag_fraction"] = *s0_validation_fraction;
  r.inputs = {"data/manifest.json", "models/autoencoder.json", "models/detector.json"};
  r.outputs = {"reports/detection.json", "reports/pc_scores.csv", "reports/lags.csv"};
  return r;
}

StageResult evaluate(Workspace& ws) {
  StageResult r;
  const auto& ds = ws.dataset();
  const auto dis = std::span<const sim::ScenarioId>(sim::kDisruptedScenarios);

  auto classifier = load_network(ws, "models/classifier.json");
  const auto test = make_window_set(ds, dis, Part::test, ws.stats().classifier);
  const auto cm = models::confusion(test, models::classify(classifier, test));
  auto cm_csv = open_out(ws.path("reports/confusion.csv"));
  cm_csv << "actual";
  for (int k = 0; k < data::kNumClasses; ++k) cm_csv << ',' << data::to_string(data::class_from_index(k));
  cm_csv << '\n';
  json classes = json::object();
  for (int a = 0; a < data::kNumClasses; ++a) {
    const std::string name(data::to_string(data::class_from_index(a)));
    cm_csv << name;
    for (int p = 0; p < data::kNumClasses; ++p) cm_csv << ',' << cm.at(a, p);
    cm_csv << '\n';
    classes[name] = {{"support", cm.row_total(a)},
                     {"precision", metrics::to_json(cm.precision(a))},
                     {"recall", metrics::to_json(cm.recall(a))},
                     {"f1", metrics::to_json(cm.f1(a))}};
  }
  const auto [ca, cp] = cm.largest_confusion();
  json classification{{"accuracy", cm.accuracy()},
                      {"classes", classes},
                      {"largest_confusion",
                       {{"actual", data::to_string(data::class_from_index(ca))},
                        {"predicted", data::to_string(data::class_from_index(cp))},
                        {"count", cm.at(ca, cp)}}}};
  nn::write_json(ws.path("reports/classifier.json"), classification);

  auto err_csv = open_out(ws.path("reports/ttr_errors.csv"));
  err_csv << "scenario,mae,mse,rmse,mape,windows\n";
  auto pred_csv = open_out(ws.path("reports/ttr_predictions.csv"));
  pred_csv << "scenario,replication,end_day,actual,predicted\n";
  json ttr = json::object();
  for (auto id : sim::kDisruptedScenarios) {
    std::array<sim::ScenarioId, 1> one{id};
    const std::string name(sim::to_string(id));
    auto m = models::ttr_from_json(nn::read_json(ws.path(ttr_file(id))));
    auto set = make_window_set(ds, one, Part::test, ws.stats().for_ttr(id));
    set.select_features(m.features);
    const auto positive = models::ttr_windows(set);
    const auto pred = m.predict(positive);
    std::vector<double> actual(positive.size());
    for (std::size_t i = 0; i < positive.size(); ++i) {
      actual[i] = positive.ttr(i);
      const auto& s = positive.series_of(i);
      pred_csv << name << ',' << s.replication << ',' << positive.end_day(i) << ',' << actual[i] << ','
               << json(pred[i]).dump() << '\n';
    }
    const auto e = metrics::regression_errors(actual, pred);
    err_csv << name << ',' << json(e.mae).dump() << ',' << json(e.mse).dump() << ',' << json(e.rmse).dump()
            << ',' << (e.mape ? json(*e.mape).dump() : std::string()) << ',' << e.count << '\n';

    // Window ending on the last disrupted day of each test replication.
    long close = 0, total = 0;
    json finals = json::array();
    for (std::size_t i = 0; i < positive.size(); ++i) {
      const auto& s = positive.series_of(i);
      if (!s.window || positive.end_day(i) != s.window->end() - 1) continue;
      ++total;
      const bool ok = std::abs(pred[i] - actual[i]) <= 0.2 * actual[i];
      close += ok ? 1 : 0;
      finals.push_back({{"replication", s.replication}, {"actual", actual[i]}, {"predicted", pred[i]}});
    }
    ttr[name] = {{"errors", metrics::to_json(e)},
                 {"final_window", {{"within_20pct", close}, {"replications", total},
                                   {"fraction", total ? static_cast<double>(close) / static_cast<double>(total) : 0.0},
                                   {"cases", finals}}},
                 {"features", feature_list(m.features)}};
  }
  nn::write_json(ws.path("reports/ttr.json"), ttr);

  r.summary = {{"classifier", classification}, {"ttr", ttr}};
  for (auto& [k, v] : r.summary["ttr"].items()) v["final_window"].erase("cases");
  r.inputs = {"data/manifest.json", "prep/stats.json", "models/classifier.json"};
  for (auto id : sim::kDisruptedScenarios) r.inputs.push_back(ttr_file(id));
  r.outputs = {"reports/confusion.csv", "reports/classifier.json", "reports/ttr_errors.csv",
               "reports/ttr_predictions.csv", "reports/ttr.json"};
  return r;
}

StageResult grid_search(Workspace& ws) {
  StageResult r;
  const auto& cfg = ws.config();
  const auto& ds = ws.dataset();
  auto d = load_detector(ws);
  const auto fit_set = make_window_set(ds, kNormalOnly, fit_part(d.fit_split), d.stats);
  const auto fit_scores = as_vector(scores_of(d, fit_set));
  const auto eval = make_window_set(ds, std::span<const sim::ScenarioId>(sim::kDisruptedScenarios), Part::test,
                                    d.stats);
  const auto cells = detect::grid_search(cfg.grid_nu, cfg.grid_gamma, fit_scores, eval, scores_of(d, eval));
  detect::write_grid_csv(ws.path("reports/grid.csv"), cells);
  long failed = 0;
  for (const auto& c : cells) failed += c.error.empty() ? 0 : 1;
  r.summary = {{"cells", cells.size()}, {"failed_cells", failed}};
  r.inputs = {"data/manifest.json", "models/autoencoder.json", "models/detector.json"};
  r.outputs = {"reports/grid.csv"};
  return r;
}

const std::map<std::string, std::function<StageResult(Workspace&)>>& stage_table() {
  static const std::map<std::string, std::function<StageResult(Workspace&)>> t{
      {"simulate", simulate},           {"validate", validate},
      {"prep", prep},                   {"train-ae", train_ae},
      {"fit-detector", fit_detector},   {"train-classifier", train_classifier},
      {"train-ttr", train_ttr},         {"detect", detect_stage},
      {"evaluate", evaluate},           {"grid-search", grid_search}};
  return t;
}

}  // namespace

const data::NormalizationStats& PrepStats::for_ttr(sim::ScenarioId id) const { return ttr[ttr_slot(id)]; }

json to_json(const PrepStats& s) {
  json ttr = json::object();
  for (auto id : sim::kDisruptedScenarios) ttr[std::string(sim::to_string(id))] = detect::to_json(s.for_ttr(id));
  return {{"detector", detect::to_json(s.detector)}, {"classifier", detect::to_json(s.classifier)}, {"ttr", ttr}};
}

PrepStats prep_stats_from_json(const json& j) {
  PrepStats s;
  s.detector = detect::stats_from_json(j.at("detector"));
  s.classifier = detect::stats_from_json(j.at("classifier"));
  for (auto id : sim::kDisruptedScenarios)
    s.ttr[ttr_slot(id)] = detect::stats_from_json(j.at("ttr").at(std::string(sim::to_string(id))));
  return s;
}

Workspace::Workspace(fs::path root, RunConfig config) : root_(std::move(root)), config_(std::move(config)) {
  config_.validate();
}

std::string Workspace::config_hash() const { return hex64(fnv1a(config_.to_text())); }

const Dataset& Workspace::dataset() {
  if (!dataset_) {
    if (!fs::exists(path("data/manifest.json")))
      throw std::runtime_error("no traces in " + path("data").string() + "; run simulate first");
    dataset_ = read_traces(path("data"), config_.dataset);
  }
  return *dataset_;
}

const PrepStats& Workspace::stats() {
  if (!stats_) {
    if (!fs::exists(path("prep/stats.json")))
      throw std::runtime_error("no normalization statistics; run prep first");
    stats_ = prep_stats_from_json(nn::read_json(path("prep/stats.json")));
  }
  return *stats_;
}

void Workspace::reset_cache() {
  dataset_.reset();
  stats_.reset();
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"simulate",         "validate",  "prep",     "train-ae",
                                              "fit-detector",     "train-classifier", "train-ttr",
                                              "detect",           "evaluate",  "grid-search"};
  return names;
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return hex64(h);
}

StageResult run_stage(Workspace& ws, const std::string& stage) {
  const auto it = stage_table().find(stage);
  if (it == stage_table().end()) throw std::invalid_argument("unknown stage '" + stage + "'");
  fs::create_directories(ws.root());
  {
    auto snapshot = open_out(ws.path("config.resolved.txt"));
    snapshot << ws.config().to_text();
  }
  const auto start = std::chrono::steady_clock::now();
  log_info("stage " + stage + " started");
  StageResult r = it->second(ws);
  r.stage = stage;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto hashes = [&](const std::vector<std::string>& files) {
    json j = json::object();
    for (const auto& f : files) j[f] = file_hash(ws.path(f));
    return j;
  };
  const auto& cfg = ws.config();
  json manifest{{"stage", stage},
                {"tool_version", kToolVersion},
                {"config_hash", ws.config_hash()},
                {"config", cfg.to_json()},
                {"seeds",
                 {{"sim", cfg.dataset.sim.base_seed},
                  {"split", cfg.dataset.split_seed},
                  {"autoencoder", cfg.autoencoder_seed},
                  {"classifier", cfg.classifier_seed},
                  {"ttr", cfg.ttr_seed}}},
                {"inputs", hashes(r.inputs)},
                {"outputs", hashes(r.outputs)},
                {"wall_time_s", wall},
                {"passed", r.passed},
                {"summary", r.summary}};
  nn::write_json(ws.path("manifests/" + stage + ".json"), manifest);
  log_info("stage " + stage + " finished in " + std::to_string(wall) + " s");
  return r;
}

bool stage_current(const Workspace& ws, const std::string& stage) {
  const auto path = ws.path("manifests/" + stage + ".json");
  if (!fs::exists(path)) return false;
  try {
    const auto m = nn::read_json(path);
    if (m.at("config_hash").get<std::string>() != ws.config_hash()) return false;
    if (m.at("tool_version").get<std::string>() != kToolVersion) return false;
    for (const char* group : {"inputs", "outputs"})
      for (const auto& [file, hash] : m.at(group).items())
        if (!fs::exists(ws.path(file)) || file_hash(ws.path(file)) != hash.get<std::string>()) return false;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace scdt::pipeline
