#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "scdt/detect/autoencoder.hpp"
#include "scdt/detect/detector.hpp"
#include "scdt/detect/ocsvm.hpp"
#include "scdt/models/sequence.hpp"
#include "scdt/pipeline/dataset.hpp"

namespace scdt::pipeline {

enum class Profile { desk, paper };

/// Every tunable of a pipeline run. Text form is one `key = value` per line;
/// `#` starts a comment.
struct RunConfig {
  DatasetConfig dataset;
  double validation_alpha = 0.01;

  detect::AutoencoderSpec autoencoder;
  std::uint64_t autoencoder_seed = 11;

  detect::ErrorMode error_mode = detect::ErrorMode::per_feature;
  detect::OcsvmParams ocsvm;
  std::string detector_fit_split = "test";  // S0 part the boundary is fitted on

  models::ClassifierSpec classifier;
  std::uint64_t classifier_seed = 13;

  models::TtrSpec ttr;
  std::uint64_t ttr_seed = 17;
  std::vector<int> ttr_features;  // empty = all
  bool ttr_log_target = true;

  std::vector<double> grid_nu = detect::kDefaultNuGrid;
  std::vector<double> grid_gamma = detect::kDefaultGammaGrid;

  static RunConfig for_profile(Profile p);

  /// Throws std::invalid_argument for an unknown key or a malformed value.
  void set(const std::string& key, const std::string& value);
  /// Every key with its current value, in a fixed order.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> entries() const;
  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] nlohmann::json to_json() const;
  void validate() const;

  /// Applies `key = value` lines; reports the line number on failure.
  void apply_text(const std::string& text);
  void apply_file(const std::filesystem::path& path);
};

std::vector<int> parse_feature_list(const std::string& text);
std::string feature_list(const std::vector<int>& features);

}  // namespace scdt::pipeline
