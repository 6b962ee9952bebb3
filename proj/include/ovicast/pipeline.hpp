#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "ovicast/config.hpp"
#include "ovicast/dataset.hpp"
#include "ovicast/evaluation.hpp"
#include "ovicast/features.hpp"
#include "ovicast/synth.hpp"

namespace ovicast {

/// Weekly dataset as written by `ingest`: one column per series plus the
/// oviposition target, all on one grid.
struct Dataset {
  WeekGrid grid{IsoWeek{2000, 1}, 1};
  std::map<std::string, WeeklySeries> library;
  WeeklySeries target{"oviposition", WeekGrid{IsoWeek{2000, 1}, 1}, {}};
};

std::string dataset_to_csv(const Dataset& d);
Dataset load_dataset(const std::filesystem::path& path);

/// Parses and interpolates every configured input without writing anything.
Dataset build_dataset(const PipelineConfig& cfg);

/// Writes `content` to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string sha256_hex(const std::filesystem::path& path);

/// Each command returns its process exit code; fatal problems throw Error.
int cmd_ingest(const PipelineConfig& cfg, std::ostream& log);
int cmd_screen(const PipelineConfig& cfg, std::ostream& log);
/// Failed models are reported and skipped; returns 3 if any failed.
int cmd_train(const PipelineConfig& cfg, std::ostream& log);
int cmd_evaluate(const PipelineConfig& cfg, std::ostream& log);

struct PredictOptions {
  std::filesystem::path model;
  std::filesystem::path dataset;
  std::filesystem::path output;
  std::optional<IsoWeek> from;
  std::optional<IsoWeek> to;
};

int cmd_predict(const PredictOptions& opt, std::ostream& log);
int cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& dir, std::ostream& log);

/// Feature specs used by train: the configured list, or the screening
/// selection when none is configured.
std::vector<FeatureSpec> resolve_specs(const PipelineConfig& cfg, const Dataset& d);

}  // namespace ovicast
