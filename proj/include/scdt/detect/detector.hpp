#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "scdt/data/normalize.hpp"
#include "scdt/data/windows.hpp"
#include "scdt/detect/autoencoder.hpp"
#include "scdt/detect/ocsvm.hpp"
#include "scdt/detect/pca.hpp"
#include "scdt/metrics/metrics.hpp"

namespace scdt::detect {

/// Everything downstream of the autoencoder: error projection and boundary.
struct DetectorModel {
  ErrorMode mode = ErrorMode::per_feature;
  Pca1<double> pca;
  OcsvmModel svm;
};

Eigen::VectorXd pc_scores(const DetectorModel& model, const nn::Matrix& errors);

/// Per-window outcome for one replication, in day order.
struct SeriesDetection {
  sim::ScenarioId scenario = sim::ScenarioId::normal;
  int replication = 0;
  std::optional<int> onset;
  std::vector<int> end_day;
  std::vector<double> score;
  std::vector<bool> flagged;  // anomalous according to the detector
  std::vector<bool> truth;    // anomalous according to the labels
  std::optional<int> lag;     // first flag at or after onset, minus onset
  int false_alarms = 0;       // flags strictly before onset (every flag for S0)
  int pre_onset_windows = 0;
};

/// Groups scored windows by series and derives flags, lags and false alarms.
std::vector<SeriesDetection> assemble_detections(const data::WindowSet& set,
                                                 const Eigen::VectorXd& scores,
                                                 const OcsvmModel& svm);

std::vector<SeriesDetection> detect(const DetectorModel& model, nn::Network& autoencoder,
                                    const data::WindowSet& set);

metrics::BinaryCounts window_counts(const std::vector<SeriesDetection>& series);
std::vector<std::optional<int>> lags(const std::vector<SeriesDetection>& series);
/// Flags before onset over windows before onset, in percent.
double false_alarm_percent(const std::vector<SeriesDetection>& series);
/// Share of all windows flagged anomalous.
double flag_fraction(const std::vector<SeriesDetection>& series);

nlohmann::json to_json(const Pca1<double>& pca);
Pca1<double> pca_from_json(const nlohmann::json& j);
nlohmann::json to_json(const data::NormalizationStats& stats);
data::NormalizationStats stats_from_json(const nlohmann::json& j);

struct GridCell {
  double nu = 0.0;
  double gamma = 0.0;
  metrics::Metric accuracy;
  metrics::Metric f1;
  metrics::Metric mean_lag;
  metrics::Metric max_lag;
  double false_alarm_pct = 0.0;
  std::string error;  // fit failure, empty on success
};

inline const std::vector<double> kDefaultNuGrid{0.01, 0.025, 0.05, 0.075, 0.1, 0.2, 0.3, 0.4, 0.5};
inline const std::vector<double> kDefaultGammaGrid{0.01, 0.1, 1, 10, 100, 1000};

/// Refits the boundary for each (nu, gamma) on `fit_scores` and evaluates on
/// pre-scored windows of `eval`. A failing cell records its error and the
/// search continues.
std::vector<GridCell> grid_search(const std::vector<double>& nus, const std::vector<double>& gammas,
                                  std::span<const double> fit_scores, const data::WindowSet& eval,
                                  const Eigen::VectorXd& eval_scores);

void write_grid_csv(const std::filesystem::path& path, const std::vector<GridCell>& cells);

}  // namespace scdt::detect
