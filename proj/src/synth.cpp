#include "ovicast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ovicast/error.hpp"
#include "ovicast/numfmt.hpp"
#include "ovicast/random.hpp"

namespace ovicast {

std::string_view to_string(Response r) noexcept {
  return r == Response::Linear ? "linear" : "threshold";
}

Response parse_response(std::string_view text) {
  if (text == "linear") return Response::Linear;
  if (text == "threshold" || text == "threshold-nonlinear") return Response::ThresholdNonlinear;
  throw Error(ErrorKind::Config, "response must be linear|threshold, got '" + std::string(text) + "'");
}

namespace {

struct DriverShape {
  const char* variable;
  Zone zone;
  int lag;
  double level;
  double scale;
};

// Physical-looking units for the first five drivers, lags as in the
// reference variable selection.
constexpr DriverShape kShapes[] = {
    {"ndvi", Zone::Rural, 1, 0.55, 0.08}, {"ndwi", Zone::Rural, 1, 0.25, 0.06},
    {"lstd", Zone::Rural, 3, 31.0, 3.0},  {"lstn", Zone::Rural, 1, 17.0, 3.0},
    {"trmm", Zone::None, 3, 60.0, 15.0},
};

// Extra drivers beyond the named five are unitless "envN" series.
DriverShape shape_for(std::size_t i) {
  if (i < std::size(kShapes)) return kShapes[i];
  return {"env", Zone::Rural, static_cast<int>(i % 4), 0.0, 1.0};
}

double respond(Response r, std::span<const double> x) {
  auto at = [&](std::size_t i) { return i < x.size() ? x[i] : 0.0; };
  if (r == Response::Linear) {
    double y = 0.0;
    const double w[] = {1.0, 0.8, 0.6, 0.5, 0.4};
    for (std::size_t i = 0; i < x.size(); ++i) y += (i < std::size(w) ? w[i] : 0.3) * x[i];
    return y;
  }
  // Warm-and-wet switch on top of a vegetation trend: activity jumps when
  // both temperature and rain exceed their thresholds.
  const double gate = (at(2) > 0.0 && at(4) > 0.0) ? 1.0 : 0.0;
  return 0.8 * at(0) + 0.4 * at(1) + 2.5 * gate * (0.5 + at(3) * at(3));
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.weeks <= 10) throw Error(ErrorKind::Config, "synthetic weeks must be > 10");
  if (!(spec.noise_sd >= 0.0)) throw Error(ErrorKind::Config, "synthetic noise sd must be >= 0");
  if (spec.drivers == 0) throw Error(ErrorKind::Config, "synthetic data needs at least one driver");
  if (!(std::abs(spec.autocorrelation) < 1.0)) throw Error(ErrorKind::Config, "autocorrelation must be in (-1, 1)");
  if (spec.houses == 0) throw Error(ErrorKind::Config, "synthetic data needs at least one house");

  Rng rng(spec.seed);
  const std::size_t burn = kMaxLag;
  const std::size_t total = spec.weeks + burn;
  const double phi = spec.autocorrelation;
  const double innovation = std::sqrt(1.0 - phi * phi);

  // Unit-variance AR(1) latent drivers; index t + burn is grid week t.
  std::vector<Vector> latent(spec.drivers, Vector(total));
  for (auto& d : latent) {
    d[0] = rng.normal();
    for (std::size_t t = 1; t < total; ++t) d[t] = phi * d[t - 1] + innovation * rng.normal();
  }

  SyntheticData out{WeekGrid(spec.start, spec.weeks), {}, {}, {}, {}};
  for (std::size_t i = 0; i < spec.drivers; ++i) {
    const auto s = shape_for(i);
    std::string variable = s.variable;
    if (i >= std::size(kShapes)) variable += std::to_string(i + 1);
    out.planted.push_back({variable, s.zone, s.lag});
    std::vector<Observation> obs;
    for (std::size_t t = 0; t < spec.weeks; ++t)
      obs.push_back({out.grid.midpoint(t), s.level + s.scale * latent[i][t + burn]});
    out.drivers.push_back(RawSeries::make(series_key(variable, s.zone), s.zone, std::move(obs)));
  }

  for (std::size_t t = 0; t < spec.weeks; ++t) {
    Vector x(spec.drivers);
    for (std::size_t i = 0; i < spec.drivers; ++i)
      x[i] = latent[i][t + burn - static_cast<std::size_t>(out.planted[i].lag)];
    out.response.push_back(respond(spec.response, x) + spec.noise_sd * rng.normal());
  }

  // Affine map to non-negative egg totals, split over houses with fixed shares.
  const double lowest = *std::min_element(out.response.begin(), out.response.end());
  Vector share(spec.houses);
  double share_sum = 0.0;
  for (auto& s : share) share_sum += (s = 0.5 + rng.uniform());
  for (std::size_t t = 0; t < spec.weeks; ++t) {
    const auto eggs = static_cast<std::uint64_t>(std::llround(100.0 * (out.response[t] - lowest) + 20.0));
    std::uint64_t assigned = 0;
    const IsoWeek week = out.grid.week_at(t);
    for (std::size_t h = 0; h < spec.houses; ++h) {
      const auto part = static_cast<std::uint64_t>(std::floor(static_cast<double>(eggs) * share[h] / share_sum));
      assigned += part;
      out.records.push_back({"h" + std::to_string(h + 1), Placement::Outside, week, part});
      out.records.push_back({"h" + std::to_string(h + 1), Placement::Inside, week, rng.below(40)});
    }
    out.records[out.records.size() - 2 * spec.houses].egg_count += eggs - assigned;
  }
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

}  // namespace

void write_synthetic(const SyntheticData& data, const SyntheticSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& d : data.drivers) {
    std::ostringstream os;
    os << "date,value\n";
    for (const auto& o : d.observations) os << format_date(o.date) << ',' << format_double(o.value) << '\n';
    write_text(dir / (d.name + ".csv"), os.str());
  }
  std::ostringstream ov;
  ov << "house_id,placement,iso_year,iso_week,egg_count\n";
  for (const auto& r : data.records)
    ov << r.house_id << ',' << (r.placement == Placement::Outside ? "outside" : "inside") << ',' << r.week.year
       << ',' << r.week.week << ',' << r.egg_count << '\n';
  write_text(dir / "ovitraps.csv", ov.str());

  std::ostringstream cfg;
  cfg << "# Synthetic demo pipeline (response=" << to_string(spec.response)
      << ", noise_sd=" << format_double(spec.noise_sd) << ", seed=" << spec.seed << ")\n"
      << "seed = " << spec.seed << "\nout = \"out\"\ntrain_fraction = 0.8\ncv_folds = 5\n\n"
      << "[grid]\nstart = \"" << to_string(data.grid.start()) << "\"\nweeks = " << data.grid.size() << "\n\n"
      << "[target]\novitrap = \"ovitraps.csv\"\n";
  for (const auto& d : data.drivers) cfg << "\n[series." << d.name << "]\npath = \"" << d.name << ".csv\"\n";
  cfg << "\n[features]\n# Remove `specs` to train on the screening selection instead.\nspecs = [";
  for (std::size_t i = 0; i < data.planted.size(); ++i) cfg << (i ? ", " : "") << '"' << to_string(data.planted[i]) << '"';
  cfg << "]\nalpha = 0.05\nmax_features = " << data.planted.size() << "\nlags = [0, 1, 2, 3]\n\n"
      << "[models]\nrun = [\"linear\", \"ridge\", \"svr\", \"mlp\", \"knn\", \"dtr\"]\n\n"
      << "[model.svr]\ngamma = \"scale\"\n";
  write_text(dir / "pipeline.toml", cfg.str());
}

}  // namespace ovicast
