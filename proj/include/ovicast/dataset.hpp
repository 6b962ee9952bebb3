#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovicast/matrix.hpp"

namespace ovicast {

using Date = std::chrono::sys_days;

enum class Zone { Urban, Rural, None };

std::string_view to_string(Zone z) noexcept;
Zone parse_zone(std::string_view text);

/// ISO-8601 week label. Epidemiological weeks are aligned to ISO weeks.
struct IsoWeek {
  int year = 0;
  int week = 0;
  friend auto operator<=>(const IsoWeek&, const IsoWeek&) = default;
};

std::string to_string(IsoWeek w);
int iso_weeks_in_year(int year);
/// Thursday (ISO midweek) of the given week.
Date iso_week_thursday(IsoWeek w);
IsoWeek iso_week_of(Date d);
Date parse_iso_date(std::string_view text);
std::string format_date(Date d);

/// A run of consecutive ISO weeks.
class WeekGrid {
 public:
  WeekGrid(IsoWeek start, std::size_t length);

  [[nodiscard]] IsoWeek start() const noexcept { return start_; }
  [[nodiscard]] std::size_t size() const noexcept { return length_; }
  [[nodiscard]] IsoWeek week_at(std::size_t i) const;
  [[nodiscard]] Date midpoint(std::size_t i) const;
  [[nodiscard]] std::optional<std::size_t> index_of(IsoWeek w) const;

  friend bool operator==(const WeekGrid&, const WeekGrid&) = default;

 private:
  IsoWeek start_;
  std::size_t length_;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return v != v; }

struct Observation {
  Date date;
  double value;
};

/// Irregularly sampled satellite-index series, sorted by date.
struct RawSeries {
  std::string name;
  Zone zone = Zone::None;
  std::vector<Observation> observations;

  /// Sorts by date and enforces the series invariants (unique dates, at
  /// least two observations).
  static RawSeries make(std::string name, Zone zone, std::vector<Observation> obs);
};

/// One value per grid week; missing entries hold NaN (see is_missing).
struct WeeklySeries {
  std::string name;
  WeekGrid grid;
  Vector values;
};

enum class Placement { Inside, Outside };

struct OvitrapRecord {
  std::string house_id;
  Placement placement = Placement::Outside;
  IsoWeek week;
  std::uint64_t egg_count = 0;
};

RawSeries parse_raw_series(const std::filesystem::path& path, std::string name, Zone zone);
std::vector<OvitrapRecord> parse_ovitrap_csv(const std::filesystem::path& path);

/// Linear interpolation at each week's Thursday. Weeks outside the raw
/// span are missing; throws NoOverlap if every week is outside.
WeeklySeries interpolate_to_weekly(const RawSeries& s, const WeekGrid& grid);

/// Weekly sum of egg counts over outside traps only.
WeeklySeries aggregate_oviposition(std::span<const OvitrapRecord> records, const WeekGrid& grid);

struct ZScore {
  Vector values;
  double mean = 0.0;
  double sd = 0.0;
};

/// z-score with sample sd (n-1). Missing entries are skipped and stay missing.
ZScore zscore_values(std::span<const double> values);

struct ZScoredSeries {
  WeeklySeries series;
  double mean = 0.0;
  double sd = 0.0;
};

ZScoredSeries zscore(const WeeklySeries& s);

}  // namespace ovicast
