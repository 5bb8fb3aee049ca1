#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "scdt/nn/network.hpp"

namespace scdt::nn {

inline constexpr const char* kModelFormat = "scdt-model";
inline constexpr int kModelFormatVersion = 1;

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

/// Architecture plus flat row-major weights. Doubles round-trip exactly.
nlohmann::json network_to_json(const Network& net);
/// Throws std::runtime_error on a format or version mismatch.
Network network_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace scdt::nn
