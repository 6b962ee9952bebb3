#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovicast/dataset.hpp"
#include "ovicast/matrix.hpp"
#include "ovicast/stats.hpp"

namespace ovicast {

inline constexpr int kMaxLag = 3;

/// One predictor: an environmental variable from a zone, shifted back
/// `lag` weeks. Text form is `variable:zone:lagN`, e.g. `ndvi:rural:lag1`.
struct FeatureSpec {
  std::string variable;
  Zone zone = Zone::None;
  int lag = 0;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

std::string to_string(const FeatureSpec& s);
FeatureSpec parse_feature_spec(std::string_view text);
/// Name of the weekly series a spec reads from: `variable_zone`, or just
/// `variable` when the zone is none.
std::string series_key(std::string_view variable, Zone zone);
inline std::string series_key(const FeatureSpec& s) { return series_key(s.variable, s.zone); }
/// Inverse of series_key: a trailing `_urban` / `_rural` names the zone.
std::pair<std::string, Zone> split_series_key(std::string_view key);

/// NDWI from MODIS integer-stored reflectances (x 1e4). The storage factor
/// cancels in the ratio.
double compute_ndwi(std::int64_t nir, std::int64_t mir);

struct LaggedColumn {
  int lag = 0;
  Vector values;  ///< values[t] = s[t - lag]; the first `lag` entries are missing.
};

std::vector<LaggedColumn> make_lags(const WeeklySeries& s, std::span<const int> lags);

struct Candidate {
  FeatureSpec spec;
  Vector column;
};

struct ScreeningEntry {
  FeatureSpec spec;
  double r = 0.0;
  double p = 1.0;
  bool selected = false;
};

struct ScreeningResult {
  std::vector<ScreeningEntry> entries;  ///< input candidate order
  std::vector<FeatureSpec> selected;    ///< rank order (|r| descending)
};

/// Screens candidates by correlation significance against `target`.
/// Rows where either side is missing are ignored pairwise. `alpha >= 1`
/// disables the significance threshold.
ScreeningResult select_features(std::span<const Candidate> candidates, std::span<const double> target,
                                double alpha = 0.05, std::size_t max_features = 5);

/// Every library series crossed with every lag, in library-key order.
std::vector<Candidate> build_candidates(const std::map<std::string, WeeklySeries>& library,
                                        std::span<const int> lags);

/// Aligned design matrix. X and y are z-scored; the means/sds are kept so
/// new data can be put on the same scale and predictions back-transformed.
struct FeatureMatrix {
  std::vector<FeatureSpec> specs;
  std::vector<IsoWeek> rows;
  Matrix X;
  Vector y;
  Vector feature_means;
  Vector feature_sds;
  double target_mean = 0.0;
  double target_sd = 1.0;

  [[nodiscard]] std::vector<std::string> feature_names() const;
};

/// Lagged, unscaled design values for `specs`; rows with any missing entry
/// are kept (holding NaN).
Matrix lagged_design(std::span<const FeatureSpec> specs, const std::map<std::string, WeeklySeries>& library,
                     const WeekGrid& grid);

FeatureMatrix assemble_matrix(std::span<const FeatureSpec> specs,
                              const std::map<std::string, WeeklySeries>& library, const WeeklySeries& target);

}  // namespace ovicast
