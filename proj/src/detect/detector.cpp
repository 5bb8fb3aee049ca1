#include "scdt/detect/detector.hpp"

#include <fstream>
#include <stdexcept>

#include "scdt/log.hpp"

namespace scdt::detect {

Eigen::VectorXd pc_scores(const DetectorModel& model, const nn::Matrix& errors) {
  return project_rows(model.pca, errors);
}

std::vector<SeriesDetection> assemble_detections(const data::WindowSet& set,
                                                 const Eigen::VectorXd& scores,
                                                 const OcsvmModel& svm) {
  if (static_cast<std::size_t>(scores.size()) != set.size())
    throw std::invalid_argument("assemble_detections: one score per window required");
  std::vector<SeriesDetection> out;
  for (const auto& ids : set.by_series()) {
    if (ids.empty()) continue;
    const auto& series = set.series_of(ids.front());
    SeriesDetection d;
    d.scenario = series.scenario;
    d.replication = series.replication;
    if (series.window) d.onset = series.window->onset;
    for (std::size_t i : ids) {
      const int day = set.end_day(i);
      const double s = scores(static_cast<Eigen::Index>(i));
      const bool flag = !svm.is_normal(s);
      d.end_day.push_back(day);
      d.score.push_back(s);
      d.flagged.push_back(flag);
      d.truth.push_back(set.anomalous(i));
      const bool before = !d.onset || day < *d.onset;
      if (before) {
        ++d.pre_onset_windows;
        if (flag) ++d.false_alarms;
      } else if (flag && !d.lag) {
        d.lag = day - *d.onset;
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<SeriesDetection> detect(const DetectorModel& model, nn::Network& autoencoder,
                                    const data::WindowSet& set) {
  const nn::Matrix errors = reconstruction_errors(autoencoder, set, model.mode);
  return assemble_detections(set, pc_scores(model, errors), model.svm);
}

metrics::BinaryCounts window_counts(const std::vector<SeriesDetection>& series) {
  metrics::BinaryCounts c;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.truth.size(); ++i) {
      if (!s.truth[i])
        ++(s.flagged[i] ? c.fn : c.tp);
      else
        ++(s.flagged[i] ? c.tn : c.fp);
    }
  }
  return c;
}

std::vector<std::optional<int>> lags(const std::vector<SeriesDetection>& series) {
  std::vector<std::optional<int>> out;
  for (const auto& s : series)
    if (s.onset) out.push_back(s.lag);
  return out;
}

double false_alarm_percent(const std::vector<SeriesDetection>& series) {
  long alarms = 0, windows = 0;
  for (const auto& s : series) {
    alarms += s.false_alarms;
    windows += s.pre_onset_windows;
  }
  return windows == 0 ? 0.0 : 100.0 * static_cast<double>(alarms) / static_cast<double>(windows);
}

double flag_fraction(const std::vector<SeriesDetection>& series) {
  long flagged = 0, total = 0;
  for (const auto& s : series) {
    for (bool f : s.flagged) flagged += f ? 1 : 0;
    total += static_cast<long>(s.flagged.size());
  }
  return total == 0 ? 0.0 : static_cast<double>(flagged) / static_cast<double>(total);
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const Pca1<double>& pca) {
  return {{"mean", to_vec(pca.mean)},
          {"axis", to_vec(pca.axis)},
          {"eigenvalue", pca.eigenvalue},
          {"explained_ratio", pca.explained_ratio}};
}

Pca1<double> pca_from_json(const nlohmann::json& j) {
  Pca1<double> p;
  p.mean = from_vec(j.at("mean"));
  p.axis = from_vec(j.at("axis"));
  p.eigenvalue = j.at("eigenvalue").get<double>();
  p.explained_ratio = j.at("explained_ratio").get<double>();
  if (p.mean.size() != p.axis.size()) throw std::runtime_error("pca: mean/axis size mismatch");
  return p;
}

nlohmann::json to_json(const data::NormalizationStats& stats) {
  return {{"min", to_vec(stats.min)}, {"max", to_vec(stats.max)}};
}

data::NormalizationStats stats_from_json(const nlohmann::json& j) {
  data::NormalizationStats s;
  s.min = from_vec(j.at("min"));
  s.max = from_vec(j.at("max"));
  if (s.min.size() != s.max.size()) throw std::runtime_error("stats: min/max size mismatch");
  return s;
}

std::vector<GridCell> grid_search(const std::vector<double>& nus, const std::vector<double>& gammas,
                                  std::span<const double> fit_scores, const data::WindowSet& eval,
                                  const Eigen::VectorXd& eval_scores) {
  if (nus.empty() || gammas.empty()) throw std::invalid_argument("grid_search: empty grid");
  std::vector<GridCell> cells;
  for (double gamma : gammas) {
    for (double nu : nus) {
      GridCell cell;
      cell.nu = nu;
      cell.gamma = gamma;
      try {
        OcsvmParams p;
        p.nu = nu;
        p.gamma = gamma;
        const auto svm = ocsvm_fit(fit_scores, p);
        const auto series = assemble_detections(eval, eval_scores, svm);
        const auto counts = window_counts(series);
        const auto l = lags(series);
        const auto ls = metrics::lag_stats(l);
        cell.accuracy = metrics::accuracy(counts);
        cell.f1 = metrics::f1(counts);
        cell.mean_lag = ls.mean;
        cell.max_lag = ls.max;
        cell.false_alarm_pct = false_alarm_percent(series);
        if (!svm.converged) cell.error = "not converged";
      } catch (const std::exception& e) {
        cell.error = e.what();
        log_warning("grid cell nu=" + std::to_string(nu) + " gamma=" + std::to_string(gamma) +
                    " failed: " + e.what());
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_grid_csv(const std::filesystem::path& path, const std::vector<GridCell>& cells) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  auto field = [](const metrics::Metric& m) { return m ? std::to_string(*m) : std::string(); };
  out << "nu,gamma,accuracy,f1,mean_lag,max_lag,false_alarm_pct,error\n";
  for (const auto& c : cells)
    out << c.nu << ',' << c.gamma << ',' << field(c.accuracy) << ',' << field(c.f1) << ','
        << field(c.mean_lag) << ',' << field(c.max_lag) << ',' << c.false_alarm_pct << ',' << c.error
        << '\n';
}

}  // namespace scdt::detect
