#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ovicast/models.hpp"

namespace ovicast {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document. Every real number is stored as its shortest
/// round-trip decimal string, so save -> load -> predict is bit-identical.
nlohmann::json to_json(const TrainedModel& m);
TrainedModel model_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(std::string_view name, const nlohmann::json& j);

void save_model(const TrainedModel& m, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace ovicast
