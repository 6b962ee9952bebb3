#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ovicast/dataset.hpp"
#include "ovicast/features.hpp"

namespace ovicast {

enum class Response { Linear, ThresholdNonlinear };

std::string_view to_string(Response r) noexcept;
Response parse_response(std::string_view text);

struct SyntheticSpec {
  std::size_t weeks = 209;
  std::size_t drivers = 5;
  double autocorrelation = 0.8;  ///< AR(1) coefficient of every driver
  Response response = Response::ThresholdNonlinear;
  double noise_sd = 0.3;
  std::uint64_t seed = 20170601;
  IsoWeek start{2012, 32};
  std::size_t houses = 10;
};

struct SyntheticData {
  WeekGrid grid;
  std::vector<RawSeries> drivers;  ///< names are dataset keys (ndvi_rural, ...)
  std::vector<OvitrapRecord> records;
  std::vector<FeatureSpec> planted;  ///< specs the target was built from
  Vector response;                   ///< noisy latent target per grid week
};

/// Fully determined by spec.seed.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Writes `<driver>.csv`, `ovitraps.csv` and a ready-to-run `pipeline.toml`.
void write_synthetic(const SyntheticData& data, const SyntheticSpec& spec, const std::filesystem::path& dir);

}  // namespace ovicast
