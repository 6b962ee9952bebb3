#include "ovicast/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ovicast/error.hpp"
#include "ovicast/numfmt.hpp"

namespace ovicast {

std::string to_string(const FeatureSpec& s) {
  return s.variable + ":" + std::string(to_string(s.zone)) + ":lag" + std::to_string(s.lag);
}

FeatureSpec parse_feature_spec(std::string_view text) {
  text = trim(text);
  const auto c1 = text.find(':');
  const auto c2 = c1 == text.npos ? text.npos : text.find(':', c1 + 1);
  if (c1 == text.npos || c2 == text.npos || c1 == 0)
    throw Error(ErrorKind::Config, "feature spec '" + std::string(text) + "' is not variable:zone:lagN");
  FeatureSpec s;
  s.variable = std::string(text.substr(0, c1));
  s.zone = parse_zone(text.substr(c1 + 1, c2 - c1 - 1));
  auto lag = text.substr(c2 + 1);
  long long n = 0;
  if (!lag.starts_with("lag") || !parse_int(lag.substr(3), n))
    throw Error(ErrorKind::Config, "feature spec '" + std::string(text) + "' has bad lag");
  if (n < 0 || n > kMaxLag)
    throw Error(ErrorKind::LagTooLarge, "lag " + std::to_string(n) + " outside [0, 3]");
  s.lag = static_cast<int>(n);
  return s;
}

std::string series_key(std::string_view variable, Zone zone) {
  if (zone == Zone::None) return std::string(variable);
  return std::string(variable) + "_" + std::string(to_string(zone));
}

std::pair<std::string, Zone> split_series_key(std::string_view key) {
  for (Zone z : {Zone::Urban, Zone::Rural}) {
    const std::string suffix = "_" + std::string(to_string(z));
    if (key.size() > suffix.size() && key.ends_with(suffix))
      return {std::string(key.substr(0, key.size() - suffix.size())), z};
  }
  return {std::string(key), Zone::None};
}

double compute_ndwi(std::int64_t nir, std::int64_t mir) {
  const auto den = nir + mir;
  if (den == 0) throw Error(ErrorKind::ZeroDenominator, "NDWI with nir + mir == 0");
  return static_cast<double>(nir - mir) / static_cast<double>(den);
}

std::vector<LaggedColumn> make_lags(const WeeklySeries& s, std::span<const int> lags) {
  std::vector<LaggedColumn> out;
  out.reserve(lags.size());
  const std::size_t n = s.values.size();
  for (int lag : lags) {
    if (lag < 0 || lag > kMaxLag || static_cast<std::size_t>(lag) >= n)
      throw Error(ErrorKind::LagTooLarge,
                  s.name + ": lag " + std::to_string(lag) + " with " + std::to_string(n) + " weeks");
    LaggedColumn col{lag, Vector(n, kMissing)};
    for (std::size_t t = static_cast<std::size_t>(lag); t < n; ++t) col.values[t] = s.values[t - lag];
    out.push_back(std::move(col));
  }
  return out;
}

ScreeningResult select_features(std::span<const Candidate> candidates, std::span<const double> target,
                                double alpha, std::size_t max_features) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::Config, "alpha must be in (0, 1]");
  if (candidates.empty()) throw Error(ErrorKind::NoSignificantFeatures, "no candidate features");

  ScreeningResult out;
  out.entries.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (c.column.size() != target.size())
      throw Error(ErrorKind::LengthMismatch, to_string(c.spec) + " is not aligned with the target");
    Vector xs, ys;
    for (std::size_t i = 0; i < target.size(); ++i)
      if (!is_missing(c.column[i]) && !is_missing(target[i])) {
        xs.push_back(c.column[i]);
        ys.push_back(target[i]);
      }
    ScreeningEntry e{c.spec, 0.0, 1.0, false};
    try {
      const auto corr = pearson_with_pvalue(xs, ys);
      e.r = corr.r;
      e.p = corr.p;
    } catch (const Error& err) {
      // A constant or too-short column cannot carry signal.
      if (err.kind() != ErrorKind::ConstantInput && err.kind() != ErrorKind::TooFewSamples) throw;
    }
    out.entries.push_back(std::move(e));
  }

  const bool threshold = alpha < 1.0;
  std::vector<std::size_t> qualifying;
  for (std::size_t i = 0; i < out.entries.size(); ++i)
    if (!threshold || out.entries[i].p < alpha) qualifying.push_back(i);
  if (qualifying.empty())
    throw Error(ErrorKind::NoSignificantFeatures, "no candidate has p < " + format_double(alpha));

  // Lag preference: a qualifying lagged variant displaces the lag-0 one.
  std::set<std::string> has_lagged;
  for (auto i : qualifying)
    if (out.entries[i].spec.lag > 0) has_lagged.insert(series_key(out.entries[i].spec));
  std::erase_if(qualifying, [&](std::size_t i) {
    const auto& s = out.entries[i].spec;
    return s.lag == 0 && has_lagged.contains(series_key(s));
  });

  std::sort(qualifying.begin(), qualifying.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = out.entries[a];
    const auto& eb = out.entries[b];
    if (std::abs(ea.r) != std::abs(eb.r)) return std::abs(ea.r) > std::abs(eb.r);
    if (ea.spec.lag != eb.spec.lag) return ea.spec.lag > eb.spec.lag;
    return to_string(ea.spec) < to_string(eb.spec);
  });
  if (qualifying.size() > max_features) qualifying.resize(max_features);
  for (auto i : qualifying) {
    out.entries[i].selected = true;
    out.selected.push_back(out.entries[i].spec);
  }
  return out;
}

std::vector<Candidate> build_candidates(const std::map<std::string, WeeklySeries>& library,
                                        std::span<const int> lags) {
  std::vector<Candidate> out;
  for (const auto& [key, series] : library) {
    auto [variable, zone] = split_series_key(key);
    for (auto& col : make_lags(series, lags))
      out.push_back({FeatureSpec{variable, zone, col.lag}, std::move(col.values)});
  }
  return out;
}

std::vector<std::string> FeatureMatrix::feature_names() const {
  std::vector<std::string> out;
  for (const auto& s : specs) out.push_back(to_string(s));
  return out;
}

Matrix lagged_design(std::span<const FeatureSpec> specs, const std::map<std::string, WeeklySeries>& library,
                     const WeekGrid& grid) {
  Matrix raw(grid.size(), specs.size(), kMissing);
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const auto key = series_key(specs[j]);
    auto it = library.find(key);
    if (it == library.end())
      throw Error(ErrorKind::UnknownVariable, "no series '" + key + "' for " + to_string(specs[j]));
    if (!(it->second.grid == grid)) throw Error(ErrorKind::GridMismatch, key + " is on a different week grid");
    const int lag = specs[j].lag;
    auto col = make_lags(it->second, std::span<const int>(&lag, 1)).front();
    for (std::size_t t = 0; t < grid.size(); ++t) raw(t, j) = col.values[t];
  }
  return raw;
}

FeatureMatrix assemble_matrix(std::span<const FeatureSpec> specs,
                              const std::map<std::string, WeeklySeries>& library, const WeeklySeries& target) {
  if (specs.empty()) throw Error(ErrorKind::Config, "no feature specs");
  const Matrix raw = lagged_design(specs, library, target.grid);

  std::vector<std::size_t> keep;
  for (std::size_t t = 0; t < raw.rows(); ++t) {
    bool complete = !is_missing(target.values[t]);
    for (double v : raw.row(t)) complete = complete && !is_missing(v);
    if (complete) keep.push_back(t);
  }

  FeatureMatrix fm;
  fm.specs.assign(specs.begin(), specs.end());
  for (auto t : keep) fm.rows.push_back(target.grid.week_at(t));
  const Matrix kept = raw.select_rows(keep);
  fm.X = Matrix(kept.rows(), kept.cols());
  for (std::size_t j = 0; j < kept.cols(); ++j) {
    ZScore z;
    try {
      z = zscore_values(kept.column(j));
    } catch (const Error& e) {
      throw Error(e.kind(), to_string(specs[j]) + ": " + e.message());
    }
    for (std::size_t i = 0; i < kept.rows(); ++i) fm.X(i, j) = z.values[i];
    fm.feature_means.push_back(z.mean);
    fm.feature_sds.push_back(z.sd);
  }
  auto zy = zscore_values(select(target.values, keep));
  fm.y = std::move(zy.values);
  fm.target_mean = zy.mean;
  fm.target_sd = zy.sd;
  return fm;
}

}  // namespace ovicast
