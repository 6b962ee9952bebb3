#include "ovicast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "ovicast/error.hpp"
#include "ovicast/numfmt.hpp"

namespace ovicast {

namespace chr = std::chrono;

std::string_view to_string(Zone z) noexcept {
  switch (z) {
    case Zone::Urban: return "urban";
    case Zone::Rural: return "rural";
    case Zone::None: return "none";
  }
  return "none";
}

Zone parse_zone(std::string_view text) {
  text = trim(text);
  if (text == "urban") return Zone::Urban;
  if (text == "rural") return Zone::Rural;
  if (text == "none" || text.empty()) return Zone::None;
  throw Error(ErrorKind::Config, "unknown zone '" + std::string(text) + "'");
}

std::string to_string(IsoWeek w) {
  std::string out = std::to_string(w.year) + "-W";
  if (w.week < 10) out += '0';
  return out + std::to_string(w.week);
}

Date iso_week_thursday(IsoWeek w) {
  const Date jan4 = chr::year{w.year} / chr::January / 4;
  const unsigned enc = chr::weekday{jan4}.iso_encoding();  // Mon=1 .. Sun=7
  const Date monday = jan4 - chr::days{enc - 1};
  return monday + chr::days{3 + 7 * (w.week - 1)};
}

IsoWeek iso_week_of(Date d) {
  const unsigned enc = chr::weekday{d}.iso_encoding();
  const Date thursday = d - chr::days{enc - 1} + chr::days{3};
  const int year = static_cast<int>(chr::year_month_day{thursday}.year());
  const Date first = iso_week_thursday({year, 1});
  return {year, static_cast<int>((thursday - first).count() / 7) + 1};
}

int iso_weeks_in_year(int year) {
  return iso_week_of(chr::year{year} / chr::December / 28).week;
}

Date parse_iso_date(std::string_view text) {
  text = trim(text);
  long long y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_int(text.substr(0, 4), y) ||
      !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d))
    throw Error(ErrorKind::MalformedRow, "bad ISO date '" + std::string(text) + "'");
  const chr::year_month_day ymd{chr::year{static_cast<int>(y)}, chr::month{static_cast<unsigned>(m)},
                                chr::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error(ErrorKind::MalformedRow, "invalid date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date d) {
  const chr::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

WeekGrid::WeekGrid(IsoWeek start, std::size_t length) : start_(start), length_(length) {
  if (length == 0) throw Error(ErrorKind::Config, "week grid length must be >= 1");
  if (start.week < 1 || start.week > iso_weeks_in_year(start.year))
    throw Error(ErrorKind::Config, "week " + to_string(start) + " does not exist");
}

IsoWeek WeekGrid::week_at(std::size_t i) const { return iso_week_of(midpoint(i)); }

Date WeekGrid::midpoint(std::size_t i) const {
  return iso_week_thursday(start_) + chr::days{7 * static_cast<long>(i)};
}

std::optional<std::size_t> WeekGrid::index_of(IsoWeek w) const {
  if (w.week < 1 || w.week > 53) return std::nullopt;
  const auto diff = (iso_week_thursday(w) - iso_week_thursday(start_)).count();
  if (diff < 0 || diff % 7 != 0) return std::nullopt;
  const auto i = static_cast<std::size_t>(diff / 7);
  if (i >= length_ || week_at(i) != w) return std::nullopt;
  return i;
}

RawSeries RawSeries::make(std::string name, Zone zone, std::vector<Observation> obs) {
  std::stable_sort(obs.begin(), obs.end(),
                   [](const Observation& a, const Observation& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < obs.size(); ++i)
    if (obs[i].date == obs[i - 1].date)
      throw Error(ErrorKind::DuplicateDate, name + ": " + format_date(obs[i].date));
  if (obs.size() < 2)
    throw Error(ErrorKind::TooFewObservations, name + ": need at least 2 observations, got " +
                                                   std::to_string(obs.size()));
  return {std::move(name), zone, std::move(obs)};
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line, const std::string& why) {
  throw Error(ErrorKind::MalformedRow, path.string() + ":" + std::to_string(line) + ": " + why);
}

}  // namespace

RawSeries parse_raw_series(const std::filesystem::path& path, std::string name, Zone zone) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::vector<Observation> obs;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!header_seen) {
      auto cols = split_csv(line);
      if (cols.size() != 2 || cols[0] != "date" || cols[1] != "value")
        malformed(path, lineno, "expected header 'date,value'");
      header_seen = true;
      continue;
    }
    auto cols = split_csv(line);
    if (cols.size() != 2) malformed(path, lineno, "expected 2 fields");
    Observation o{};
    try {
      o.date = parse_iso_date(cols[0]);
    } catch (const Error& e) {
      malformed(path, lineno, e.message());
    }
    if (!parse_double(cols[1], o.value) || !std::isfinite(o.value))
      malformed(path, lineno, "bad value '" + std::string(cols[1]) + "'");
    obs.push_back(o);
  }
  if (obs.empty()) throw Error(ErrorKind::EmptyFile, path.string());
  try {
    return RawSeries::make(std::move(name), zone, std::move(obs));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

std::vector<OvitrapRecord> parse_ovitrap_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::vector<OvitrapRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cols = split_csv(line);
    if (!header_seen) {
      const std::vector<std::string_view> want{"house_id", "placement", "iso_year", "iso_week", "egg_count"};
      if (cols != want) malformed(path, lineno, "expected header 'house_id,placement,iso_year,iso_week,egg_count'");
      header_seen = true;
      continue;
    }
    if (cols.size() != 5) malformed(path, lineno, "expected 5 fields");
    OvitrapRecord r;
    r.house_id = std::string(cols[0]);
    if (cols[1] == "inside")
      r.placement = Placement::Inside;
    else if (cols[1] == "outside")
      r.placement = Placement::Outside;
    else
      malformed(path, lineno, "placement must be inside|outside");
    long long y = 0, w = 0, n = 0;
    if (!parse_int(cols[2], y) || !parse_int(cols[3], w) || w < 1 || w > 53)
      malformed(path, lineno, "bad ISO year/week");
    if (!parse_int(cols[4], n) || n < 0) malformed(path, lineno, "egg_count must be a non-negative integer");
    r.week = {static_cast<int>(y), static_cast<int>(w)};
    r.egg_count = static_cast<std::uint64_t>(n);
    out.push_back(std::move(r));
  }
  if (!header_seen) throw Error(ErrorKind::EmptyFile, path.string());
  return out;
}

WeeklySeries interpolate_to_weekly(const RawSeries& s, const WeekGrid& grid) {
  WeeklySeries out{s.name, grid, Vector(grid.size(), kMissing)};
  const auto& obs = s.observations;
  bool any = false;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Date t = grid.midpoint(i);
    if (t < obs.front().date || t > obs.back().date) continue;
    while (seg + 1 < obs.size() && obs[seg + 1].date < t) ++seg;
    const auto& a = obs[seg];
    const auto& b = obs[std::min(seg + 1, obs.size() - 1)];
    if (t == a.date) {
      out.values[i] = a.value;
    } else if (t == b.date) {
      out.values[i] = b.value;
    } else {
      const double span = static_cast<double>((b.date - a.date).count());
      const double frac = static_cast<double>((t - a.date).count()) / span;
      out.values[i] = a.value + frac * (b.value - a.value);
    }
    any = true;
  }
  if (!any)
    throw Error(ErrorKind::NoOverlap, s.name + ": raw span " + format_date(obs.front().date) + ".." +
                                          format_date(obs.back().date) + " misses the week grid");
  return out;
}

WeeklySeries aggregate_oviposition(std::span<const OvitrapRecord> records, const WeekGrid& grid) {
  WeeklySeries out{"oviposition", grid, Vector(grid.size(), 0.0)};
  // Integer accumulation keeps the sum independent of record order.
  std::vector<std::uint64_t> sums(grid.size(), 0);
  for (const auto& r : records) {
    if (r.placement != Placement::Outside) continue;
    if (auto i = grid.index_of(r.week)) sums[*i] += r.egg_count;
  }
  for (std::size_t i = 0; i < sums.size(); ++i) out.values[i] = static_cast<double>(sums[i]);
  return out;
}

ZScore zscore_values(std::span<const double> values) {
  std::size_t n = 0;
  double sum = 0.0;
  for (double v : values)
    if (!is_missing(v)) {
      sum += v;
      ++n;
    }
  if (n < 2) throw Error(ErrorKind::TooFewObservations, "z-score needs at least 2 values");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values)
    if (!is_missing(v)) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorKind::ZeroVariance, "standard deviation is zero");
  ZScore out{Vector(values.size(), kMissing), mean, sd};
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!is_missing(values[i])) out.values[i] = (values[i] - mean) / sd;
  return out;
}

ZScoredSeries zscore(const WeeklySeries& s) {
  try {
    auto z = zscore_values(s.values);
    return {{s.name, s.grid, std::move(z.values)}, z.mean, z.sd};
  } catch (const Error& e) {
    throw Error(e.kind(), s.name + ": " + e.message());
  }
}

}  // namespace ovicast
