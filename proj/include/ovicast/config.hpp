#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ovicast/dataset.hpp"
#include "ovicast/features.hpp"
#include "ovicast/models.hpp"

namespace ovicast {

/// Minimal TOML-style document: `[section]` headers (dotted names allowed),
/// `key = value` pairs with strings, numbers, booleans and one-line arrays,
/// and `#` comments. Every key is addressed as `section.key`.
class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text, const std::string& source = "<config>");
  static ConfigDocument load(const std::filesystem::path& path);

  [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }
  [[nodiscard]] std::vector<std::string> sections_with_prefix(const std::string& prefix) const;

  [[nodiscard]] bool is_string(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;

  /// Throws Config naming the first key never read by a getter.
  void reject_unused() const;

 private:
  struct Entry {
    std::string raw;
    std::size_t line = 0;
  };
  const Entry& entry(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& why) const;

  std::string source_;
  std::map<std::string, Entry> values_;
  std::set<std::string> sections_;
  mutable std::set<std::string> used_;
};

struct SeriesInput {
  std::string key;  ///< dataset column, e.g. ndvi_rural
  std::filesystem::path path;
  Zone zone = Zone::None;
};

struct PipelineConfig {
  std::vector<SeriesInput> series;
  std::filesystem::path ovitrap;
  std::optional<WeekGrid> grid;
  std::vector<FeatureSpec> specs;  ///< empty: take the screening selection
  double alpha = 0.05;
  std::size_t max_features = 5;
  std::vector<int> candidate_lags{0, 1, 2, 3};
  std::vector<ModelConfig> models;
  double train_fraction = 0.8;
  std::size_t cv_folds = 5;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
};

/// Paths in the document are resolved against `base_dir`. `seed_override`
/// replaces the top-level seed (and therefore the default MLP seed).
PipelineConfig pipeline_config_from(const ConfigDocument& doc, const std::filesystem::path& base_dir,
                                    std::optional<std::uint64_t> seed_override = std::nullopt);
PipelineConfig load_pipeline_config(const std::filesystem::path& path,
                                    std::optional<std::uint64_t> seed_override = std::nullopt);

IsoWeek parse_iso_week(std::string_view text);

}  // namespace ovicast
