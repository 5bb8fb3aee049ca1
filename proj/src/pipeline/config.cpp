#include "scdt/pipeline/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace scdt::pipeline {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    throw std::invalid_argument("bad value for " + key + ": '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_number<double>(key, s));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + fmt(x);
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument("bad value for " + key + ": '" + text + "'");
}

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T, typename Acc>
Field num(const char* key, Acc acc) {
  return Field{key,
               [acc](const RunConfig& c) {
                 if constexpr (std::is_floating_point_v<T>)
                   return fmt(static_cast<double>(acc(const_cast<RunConfig&>(c))));
                 else
                   return std::to_string(acc(const_cast<RunConfig&>(c)));
               },
               [acc, key](RunConfig& c, const std::string& v) { acc(c) = parse_number<T>(key, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(num<int>("sim.replications", [](RunConfig& c) -> int& { return c.dataset.replications; }));
    f.push_back(num<int>("sim.replication_length", [](RunConfig& c) -> int& { return c.dataset.sim.replication_length; }));
    f.push_back(num<int>("sim.warmup", [](RunConfig& c) -> int& { return c.dataset.sim.warmup; }));
    f.push_back(num<double>("sim.arrival_rate", [](RunConfig& c) -> double& { return c.dataset.sim.arrival_rate; }));
    f.push_back(num<int>("sim.order_qty", [](RunConfig& c) -> int& { return c.dataset.sim.order_qty; }));
    f.push_back(num<double>("sim.mu1", [](RunConfig& c) -> double& { return c.dataset.sim.service_rates[0]; }));
    f.push_back(num<double>("sim.mu2", [](RunConfig& c) -> double& { return c.dataset.sim.service_rates[1]; }));
    f.push_back(num<double>("sim.mu3", [](RunConfig& c) -> double& { return c.dataset.sim.service_rates[2]; }));
    f.push_back(num<double>("sim.q2", [](RunConfig& c) -> double& { return c.dataset.sim.buffer_caps[1]; }));
    f.push_back(num<double>("sim.q3", [](RunConfig& c) -> double& { return c.dataset.sim.buffer_caps[2]; }));
    f.push_back(num<int>("sim.onset_min", [](RunConfig& c) -> int& { return c.dataset.sim.onset_min; }));
    f.push_back(num<int>("sim.onset_max", [](RunConfig& c) -> int& { return c.dataset.sim.onset_max; }));
    f.push_back(num<int>("sim.duration_min", [](RunConfig& c) -> int& { return c.dataset.sim.duration_min; }));
    f.push_back(num<int>("sim.duration_max", [](RunConfig& c) -> int& { return c.dataset.sim.duration_max; }));
    f.push_back(num<double>("sim.surge_arrival_rate", [](RunConfig& c) -> double& { return c.dataset.sim.disrupted_arrival_rate; }));
    f.push_back(num<double>("sim.disrupted_service_rate", [](RunConfig& c) -> double& { return c.dataset.sim.disrupted_service_rate; }));
    f.push_back(num<std::uint64_t>("sim.seed", [](RunConfig& c) -> std::uint64_t& { return c.dataset.sim.base_seed; }));
    f.push_back(num<double>("validate.alpha", [](RunConfig& c) -> double& { return c.validation_alpha; }));
    f.push_back(num<double>("label.percentile", [](RunConfig& c) -> double& { return c.dataset.recovery.percentile; }));
    f.push_back(num<int>("label.consecutive_days", [](RunConfig& c) -> int& { return c.dataset.recovery.consecutive_days; }));
    f.push_back(num<double>("split.train", [](RunConfig& c) -> double& { return c.dataset.split.train; }));
    f.push_back(num<double>("split.validation", [](RunConfig& c) -> double& { return c.dataset.split.validation; }));
    f.push_back(num<double>("split.test", [](RunConfig& c) -> double& { return c.dataset.split.test; }));
    f.push_back(num<std::uint64_t>("split.seed", [](RunConfig& c) -> std::uint64_t& { return c.dataset.split_seed; }));
    f.push_back(num<int>("ae.epochs", [](RunConfig& c) -> int& { return c.autoencoder.epochs; }));
    f.push_back(num<double>("ae.learning_rate", [](RunConfig& c) -> double& { return c.autoencoder.learning_rate; }));
    f.push_back(num<std::size_t>("ae.batch_size", [](RunConfig& c) -> std::size_t& { return c.autoencoder.batch_size; }));
    f.push_back(num<std::uint64_t>("ae.seed", [](RunConfig& c) -> std::uint64_t& { return c.autoencoder_seed; }));
    f.push_back(Field{"detector.error_mode",
                      [](const RunConfig& c) { return std::string(detect::to_string(c.error_mode)); },
                      [](RunConfig& c, const std::string& v) { c.error_mode = detect::parse_error_mode(v); }});
    f.push_back(Field{"detector.fit_split", [](const RunConfig& c) { return c.detector_fit_split; },
                      [](RunConfig& c, const std::string& v) {
                        if (v != "test" && v != "validation")
                          throw std::invalid_argument("detector.fit_split must be test or validation");
                        c.detector_fit_split = v;
                      }});
    f.push_back(num<double>("detector.nu", [](RunConfig& c) -> double& { return c.ocsvm.nu; }));
    f.push_back(num<double>("detector.gamma", [](RunConfig& c) -> double& { return c.ocsvm.gamma; }));
    f.push_back(num<double>("detector.tolerance", [](RunConfig& c) -> double& { return c.ocsvm.tolerance; }));
    f.push_back(Field{"detector.polish", [](const RunConfig& c) { return std::string(c.ocsvm.polish ? "true" : "false"); },
                      [](RunConfig& c, const std::string& v) { c.ocsvm.polish = parse_bool("detector.polish", v); }});
    f.push_back(num<int>("classifier.epochs", [](RunConfig& c) -> int& { return c.classifier.epochs; }));
    f.push_back(num<double>("classifier.learning_rate", [](RunConfig& c) -> double& { return c.classifier.learning_rate; }));
    f.push_back(num<std::size_t>("classifier.batch_size", [](RunConfig& c) -> std::size_t& { return c.classifier.batch_size; }));
    f.push_back(num<int>("classifier.units", [](RunConfig& c) -> int& { return c.classifier.units; }));
    f.push_back(num<double>("classifier.dropout", [](RunConfig& c) -> double& { return c.classifier.dropout; }));
    f.push_back(num<std::uint64_t>("classifier.seed", [](RunConfig& c) -> std::uint64_t& { return c.classifier_seed; }));
    f.push_back(num<int>("ttr.epochs", [](RunConfig& c) -> int& { return c.ttr.epochs; }));
    f.push_back(num<double>("ttr.learning_rate", [](RunConfig& c) -> double& { return c.ttr.learning_rate; }));
    f.push_back(num<std::size_t>("ttr.batch_size", [](RunConfig& c) -> std::size_t& { return c.ttr.batch_size; }));
    f.push_back(num<int>("ttr.units", [](RunConfig& c) -> int& { return c.ttr.units; }));
    f.push_back(num<double>("ttr.dropout", [](RunConfig& c) -> double& { return c.ttr.dropout; }));
    f.push_back(num<double>("ttr.l1", [](RunConfig& c) -> double& { return c.ttr.l1_first; }));
    f.push_back(num<std::uint64_t>("ttr.seed", [](RunConfig& c) -> std::uint64_t& { return c.ttr_seed; }));
    f.push_back(Field{"ttr.target", [](const RunConfig& c) { return std::string(c.ttr_log_target ? "log" : "linear"); },
                      [](RunConfig& c, const std::string& v) {
                        if (v != "log" && v != "linear") throw std::invalid_argument("ttr.target must be log or linear");
                        c.ttr_log_target = v == "log";
                      }});
    f.push_back(Field{"ttr.features", [](const RunConfig& c) { return feature_list(c.ttr_features); },
                      [](RunConfig& c, const std::string& v) { c.ttr_features = parse_feature_list(v); }});
    f.push_back(Field{"grid.nu", [](const RunConfig& c) { return join(c.grid_nu); },
                      [](RunConfig& c, const std::string& v) { c.grid_nu = parse_doubles("grid.nu", v); }});
    f.push_back(Field{"grid.gamma", [](const RunConfig& c) { return join(c.grid_gamma); },
                      [](RunConfig& c, const std::string& v) { c.grid_gamma = parse_doubles("grid.gamma", v); }});
    return f;
  }();
  return table;
}

}  // namespace

std::vector<int> parse_feature_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& name : split_list(text)) {
    if (name == "all") return {};
    bool found = false;
    for (int k = 0; k < sim::kNumFeatures; ++k) {
      if (name == kFeatureNames[static_cast<std::size_t>(k)]) {
        out.push_back(k);
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("unknown feature '" + name + "'");
  }
  return out;
}

std::string feature_list(const std::vector<int>& features) {
  if (features.empty()) return "all";
  std::string out;
  for (int k : features) out += (out.empty() ? "" : ",") + std::string(kFeatureNames.at(static_cast<std::size_t>(k)));
  return out;
}

RunConfig RunConfig::for_profile(Profile p) {
  RunConfig c;
  c.autoencoder.epochs = 200;
  c.classifier.epochs = 120;
  c.ttr.epochs = 40;
  if (p == Profile::paper) {
    c.dataset.replications = 300;
    c.autoencoder.epochs = 1000;
    c.classifier.epochs = 20;
    c.ttr.epochs = 20;
  }
  return c;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, value);
      return;
    }
  }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
  return out;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : entries()) j[k] = v;
  return j;
}

void RunConfig::validate() const {
  dataset.sim.validate();
  dataset.split.validate();
  if (dataset.replications < 5) throw std::invalid_argument("sim.replications must be >= 5");
  ocsvm.validate();
  autoencoder.train_config(0).validate();
  classifier.train_config(0).validate();
  ttr.train_config(0).validate();
  if (grid_nu.empty() || grid_gamma.empty()) throw std::invalid_argument("grid lists must be non-empty");
  if (!(validation_alpha > 0.0 && validation_alpha < 1.0))
    throw std::invalid_argument("validate.alpha must be in (0, 1)");
}

void RunConfig::apply_text(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(number) + ": expected key = value");
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

void RunConfig::apply_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_text(buf.str());
}

}  // namespace scdt::pipeline
