#include "ovicast/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ovicast/error.hpp"
#include "ovicast/model_io.hpp"
#include "ovicast/numfmt.hpp"
#include "ovicast/svg.hpp"

namespace ovicast {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot move output into place: " + path.string());
  }
}

std::string sha256_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

// ---------------------------------------------------------------------------
// Dataset file.

std::string dataset_to_csv(const Dataset& d) {
  std::ostringstream os;
  os << "iso_year,iso_week";
  for (const auto& [key, s] : d.library) os << ',' << key;
  os << ",oviposition\n";
  auto cell = [&](double v) { return is_missing(v) ? std::string() : format_double(v); };
  for (std::size_t t = 0; t < d.grid.size(); ++t) {
    const IsoWeek w = d.grid.week_at(t);
    os << w.year << ',' << w.week;
    for (const auto& [key, s] : d.library) os << ',' << cell(s.values[t]);
    os << ',' << cell(d.target.values[t]) << '\n';
  }
  return os.str();
}

namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Dataset load_dataset(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read dataset " + path.string() + " (run ingest first)");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyFile, path.string() + ": empty dataset");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "iso_year" || header[1] != "iso_week" || header.back() != "oviposition")
    throw Error(ErrorKind::MalformedRow, path.string() + ":1: header must be iso_year,iso_week,...,oviposition");
  const std::size_t n_series = header.size() - 3;

  std::vector<IsoWeek> weeks;
  std::vector<Vector> columns(n_series + 1);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != header.size())
      throw Error(ErrorKind::MalformedRow, where + ": expected " + std::to_string(header.size()) + " fields");
    long long year = 0, week = 0;
    if (!parse_int(fields[0], year) || !parse_int(fields[1], week))
      throw Error(ErrorKind::MalformedRow, where + ": bad iso_year/iso_week");
    weeks.push_back({static_cast<int>(year), static_cast<int>(week)});
    for (std::size_t j = 0; j <= n_series; ++j) {
      double v = kMissing;
      if (!fields[j + 2].empty() && !parse_double(fields[j + 2], v))
        throw Error(ErrorKind::MalformedRow, where + ": bad number in column " + header[j + 2]);
      columns[j].push_back(v);
    }
  }
  if (weeks.empty()) throw Error(ErrorKind::EmptyFile, path.string() + ": no rows");

  Dataset d;
  d.grid = WeekGrid(weeks.front(), weeks.size());
  for (std::size_t t = 0; t < weeks.size(); ++t)
    if (d.grid.week_at(t) != weeks[t])
      throw Error(ErrorKind::GridMismatch,
                  path.string() + ":" + std::to_string(t + 2) + ": weeks are not consecutive");
  for (std::size_t j = 0; j < n_series; ++j)
    d.library.emplace(header[j + 2], WeeklySeries{header[j + 2], d.grid, std::move(columns[j])});
  d.target = WeeklySeries{"oviposition", d.grid, std::move(columns[n_series])};
  return d;
}

Dataset build_dataset(const PipelineConfig& cfg) {
  if (cfg.ovitrap.empty()) throw Error(ErrorKind::Config, "key 'target.ovitrap' is required");
  if (cfg.series.empty()) throw Error(ErrorKind::Config, "no [series.<name>] inputs configured");
  const auto records = parse_ovitrap_csv(cfg.ovitrap);
  WeekGrid grid = [&] {
    if (cfg.grid) return *cfg.grid;
    if (records.empty()) throw Error(ErrorKind::EmptyFile, cfg.ovitrap.string() + ": no ovitrap records");
    auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                        [](const auto& a, const auto& b) { return a.week < b.week; });
    std::size_t n = 1;
    for (IsoWeek w = lo->week; w != hi->week; w = iso_week_of(iso_week_thursday(w) + std::chrono::days(7))) ++n;
    return WeekGrid(lo->week, n);
  }();
  Dataset d;
  d.grid = grid;
  for (const auto& s : cfg.series) {
    const auto raw = parse_raw_series(s.path, s.key, s.zone);
    try {
      d.library.emplace(s.key, interpolate_to_weekly(raw, grid));
    } catch (const Error& e) {
      throw Error(e.kind(), s.path.string() + ": " + e.message());
    }
  }
  d.target = aggregate_oviposition(records, grid);
  return d;
}

std::vector<FeatureSpec> resolve_specs(const PipelineConfig& cfg, const Dataset& d) {
  if (!cfg.specs.empty()) return cfg.specs;
  const auto candidates = build_candidates(d.library, cfg.candidate_lags);
  return select_features(candidates, d.target.values, cfg.alpha, cfg.max_features).selected;
}

namespace {

fs::path dataset_path(const PipelineConfig& cfg) { return cfg.out_dir / "dataset.csv"; }

fs::path model_path(const PipelineConfig& cfg, std::string_view name) {
  return cfg.out_dir / ("model_" + std::string(name) + ".json");
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands.

int cmd_ingest(const PipelineConfig& cfg, std::ostream& log) {
  const Dataset d = build_dataset(cfg);

  nlohmann::ordered_json prov;
  prov["grid"] = {{"start", to_string(d.grid.start())}, {"weeks", d.grid.size()}};
  prov["interpolation"] = "linear@thursday";
  prov["target"] = {{"file", cfg.ovitrap.filename().string()},
                    {"sha256", sha256_hex(cfg.ovitrap)},
                    {"aggregation", "sum of outside egg counts"}};
  auto inputs = nlohmann::ordered_json::array();
  for (const auto& s : cfg.series)
    inputs.push_back({{"key", s.key}, {"file", s.path.filename().string()}, {"sha256", sha256_hex(s.path)}});
  prov["series"] = inputs;

  write_file_atomic(dataset_path(cfg), dataset_to_csv(d));
  write_file_atomic(cfg.out_dir / "dataset.provenance.json", prov.dump(2) + "\n");
  log << "ingested " << d.library.size() << " series over " << d.grid.size() << " weeks ("
      << to_string(d.grid.start()) << " .. " << to_string(d.grid.week_at(d.grid.size() - 1)) << ") -> "
      << dataset_path(cfg).string() << '\n';
  return 0;
}

int cmd_screen(const PipelineConfig& cfg, std::ostream& log) {
  const Dataset d = load_dataset(dataset_path(cfg));
  const auto candidates = build_candidates(d.library, cfg.candidate_lags);
  if (candidates.empty()) throw Error(ErrorKind::NoSignificantFeatures, "no screening candidates");
  const auto result = select_features(candidates, d.target.values, cfg.alpha, cfg.max_features);

  std::ostringstream os;
  os << "spec,variable,zone,lag,r,p,selected,rank\n";
  for (const auto& e : result.entries) {
    std::string rank;
    if (auto it = std::find(result.selected.begin(), result.selected.end(), e.spec); it != result.selected.end())
      rank = std::to_string(it - result.selected.begin() + 1);
    os << to_string(e.spec) << ',' << e.spec.variable << ',' << to_string(e.spec.zone) << ',' << e.spec.lag << ','
       << format_double(e.r) << ',' << format_double(e.p) << ',' << (e.selected ? "true" : "false") << ',' << rank
       << '\n';
  }
  write_file_atomic(cfg.out_dir / "screening.csv", os.str());
  log << "screened " << candidates.size() << " candidates, selected " << result.selected.size() << ":\n";
  for (const auto& s : result.selected) log << "  " << to_string(s) << '\n';
  return 0;
}

int cmd_train(const PipelineConfig& cfg, std::ostream& log) {
  for (const auto& m : cfg.models) validate(m);
  const Dataset d = load_dataset(dataset_path(cfg));
  const auto specs = resolve_specs(cfg, d);
  const FeatureMatrix fm = assemble_matrix(specs, d.library, d.target);
  const SplitPlan split = chronological_split(fm.X.rows(), cfg.train_fraction);
  const Matrix Xtrain = fm.X.select_rows(split.train_idx);
  const Vector ytrain = select(fm.y, split.train_idx);
  const auto names = fm.feature_names();
  const Normalization norm{fm.feature_means, fm.feature_sds, fm.target_mean, fm.target_sd};

  std::vector<std::future<TrainedModel>> jobs;
  for (const auto& m : cfg.models)
    jobs.push_back(std::async(std::launch::async, [&, m] {
      TrainedModel tm = fit(m, Xtrain, ytrain, names);
      tm.normalization = norm;
      return tm;
    }));

  int failures = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto name = model_name(cfg.models[i]);
    const fs::path path = model_path(cfg, name);
    try {
      const TrainedModel tm = jobs[i].get();
      save_model(tm, path);
      log << "trained " << name << " on " << split.train_idx.size() << " rows -> " << path.string() << '\n';
    } catch (const Error& e) {
      ++failures;
      std::error_code ec;
      fs::remove(path, ec);  // never leave a stale model behind a failed fit
      log << "error: " << name << ": " << e.what() << '\n';
    }
  }
  return failures == 0 ? 0 : 3;
}

int cmd_evaluate(const PipelineConfig& cfg, std::ostream& log) {
  const Dataset d = load_dataset(dataset_path(cfg));
  std::vector<TrainedModel> models;
  for (const auto& m : cfg.models) models.push_back(load_model(model_path(cfg, model_name(m))));
  if (models.empty()) throw Error(ErrorKind::Config, "no models configured");

  std::vector<FeatureSpec> specs = cfg.specs;
  if (specs.empty())
    for (const auto& n : models.front().feature_names) specs.push_back(parse_feature_spec(n));
  const FeatureMatrix fm = assemble_matrix(specs, d.library, d.target);
  for (const auto& m : models)
    if (m.feature_names != fm.feature_names())
      throw Error(ErrorKind::FeatureMismatch,
                  "model " + std::string(model_name(m.config)) + " was trained on different features");

  const EvaluationReport report = build_report(fm, models, cfg.train_fraction, cfg.cv_folds);
  const std::string text = report_to_text(report);
  write_file_atomic(cfg.out_dir / "report.json", report_to_json(report).dump(2) + "\n");
  write_file_atomic(cfg.out_dir / "report.txt", text);
  write_file_atomic(cfg.out_dir / "summary.csv", summary_to_csv(report));

  std::vector<NamedSeries> scatter;
  std::vector<NamedHistogram> hists;
  std::vector<NamedSummary> boxes;
  for (const auto& m : report.models) {
    write_file_atomic(cfg.out_dir / ("fit_" + m.name + ".svg"),
                      svg_fit_plot("Observed z-score and " + m.name, report.observed, m.predictions,
                                   report.train_size));
    scatter.push_back({m.name, m.predictions});
    hists.push_back({m.name, m.residuals.histogram});
    boxes.push_back({m.name, m.residuals.five_number});
  }
  write_file_atomic(cfg.out_dir / "scatter.svg", svg_scatter(report.observed, scatter));
  write_file_atomic(cfg.out_dir / "residual_hist.svg", svg_residual_histograms(hists));
  write_file_atomic(cfg.out_dir / "residual_box.svg", svg_residual_boxplots(boxes));
  log << text;
  return 0;
}

int cmd_predict(const PredictOptions& opt, std::ostream& log) {
  const TrainedModel model = load_model(opt.model);
  const Dataset d = load_dataset(opt.dataset);

  std::vector<FeatureSpec> specs;
  std::vector<std::string> missing;
  for (const auto& name : model.feature_names) {
    FeatureSpec s;
    try {
      s = parse_feature_spec(name);
    } catch (const Error&) {
      missing.push_back(name);
      continue;
    }
    if (!d.library.contains(series_key(s))) missing.push_back(name);
    specs.push_back(s);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    std::string extra;
    for (const auto& [key, s] : d.library) {
      const bool used = std::any_of(specs.begin(), specs.end(), [&](const auto& sp) { return series_key(sp) == key; });
      if (!used) extra += (extra.empty() ? "" : ", ") + key;
    }
    throw Error(ErrorKind::FeatureMismatch, "dataset lacks model features [" + list + "]; unused dataset columns [" +
                                                extra + "]");
  }

  const Matrix raw = lagged_design(specs, d.library, d.grid);
  std::vector<std::size_t> rows;
  for (std::size_t t = 0; t < d.grid.size(); ++t) {
    const IsoWeek w = d.grid.week_at(t);
    if ((opt.from && w < *opt.from) || (opt.to && *opt.to < w)) continue;
    rows.push_back(t);
  }

  // Put each complete row on the training scale; incomplete rows get no prediction.
  std::vector<std::size_t> complete;
  Matrix X(0, specs.size());
  std::vector<Vector> scaled;
  for (auto t : rows) {
    Vector r(specs.size());
    bool ok = true;
    for (std::size_t j = 0; j < specs.size(); ++j) {
      const double v = raw(t, j);
      ok = ok && !is_missing(v);
      r[j] = model.normalization ? (v - model.normalization->feature_means[j]) / model.normalization->feature_sds[j]
                                 : v;
    }
    if (ok) {
      complete.push_back(t);
      scaled.push_back(std::move(r));
    }
  }
  if (!scaled.empty()) X = Matrix::from_rows(scaled);
  const Vector z = predict(model, X);

  std::ostringstream os;
  os << "iso_year,iso_week,z_score" << (model.normalization ? ",egg_count" : "") << '\n';
  std::size_t k = 0;
  for (auto t : rows) {
    const IsoWeek w = d.grid.week_at(t);
    os << w.year << ',' << w.week << ',';
    const bool have = k < complete.size() && complete[k] == t;
    if (have) {
      os << format_double(z[k]);
      if (model.normalization)
        os << ',' << format_double(z[k] * model.normalization->target_sd + model.normalization->target_mean);
      ++k;
    } else if (model.normalization) {
      os << ',';
    }
    os << '\n';
  }
  write_file_atomic(opt.output, os.str());
  log << "predicted " << complete.size() << " of " << rows.size() << " weeks with " << model_name(model.config)
      << " -> " << opt.output.string() << '\n';
  return 0;
}

int cmd_synth(const SyntheticSpec& spec, const fs::path& dir, std::ostream& log) {
  const auto data = generate_synthetic(spec);
  write_synthetic(data, spec, dir);
  log << "wrote " << data.drivers.size() << " driver series and " << data.records.size() << " ovitrap records ("
      << to_string(spec.response) << " response) to " << dir.string() << '\n';
  return 0;
}

}  // namespace ovicast
