#include "ovicast/config.hpp"

#include <fstream>
#include <sstream>

#include "ovicast/error.hpp"
#include "ovicast/numfmt.hpp"

namespace ovicast {

namespace {

std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

bool is_quoted(std::string_view v) { return v.size() >= 2 && v.front() == '"' && v.back() == '"'; }

std::vector<std::string> split_array(std::string_view raw, bool& ok) {
  ok = raw.size() >= 2 && raw.front() == '[' && raw.back() == ']';
  std::vector<std::string> out;
  if (!ok) return out;
  auto body = trim(raw.substr(1, raw.size() - 2));
  if (body.empty()) return out;
  std::string cur;
  bool in_string = false;
  for (char ch : body) {
    if (ch == '"') in_string = !in_string;
    if (ch == ',' && !in_string) {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.emplace_back(trim(cur));
  for (const auto& e : out)
    if (e.empty()) ok = false;
  return out;
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text, const std::string& source) {
  ConfigDocument doc;
  doc.source_ = source;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw_line;
  std::size_t lineno = 0;
  while (std::getline(in, raw_line)) {
    ++lineno;
    const std::string stripped = strip_comment(raw_line);
    auto line = trim(stripped);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw Error(ErrorKind::Config, where + ": bad section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      doc.sections_.insert(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::Config, where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw Error(ErrorKind::Config, where + ": empty key or value");
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (doc.values_.contains(full)) throw Error(ErrorKind::Config, where + ": duplicate key '" + full + "'");
    doc.values_[full] = {std::string(value), lineno};
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::vector<std::string> ConfigDocument::sections_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& s : sections_)
    if (s.starts_with(prefix)) out.push_back(s.substr(prefix.size()));
  return out;
}

const ConfigDocument::Entry& ConfigDocument::entry(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::Config, source_ + ": missing key '" + key + "'");
  used_.insert(key);
  return it->second;
}

void ConfigDocument::fail(const std::string& key, const std::string& why) const {
  const auto it = values_.find(key);
  const std::string where = it == values_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
  throw Error(ErrorKind::Config, where + ": key '" + key + "' " + why);
}

bool ConfigDocument::is_string(const std::string& key) const { return is_quoted(entry(key).raw); }

std::string ConfigDocument::get_string(const std::string& key) const {
  const auto& e = entry(key);
  if (!is_quoted(e.raw)) fail(key, "must be a quoted string");
  return e.raw.substr(1, e.raw.size() - 2);
}

double ConfigDocument::get_double(const std::string& key) const {
  double v = 0.0;
  if (!parse_double(entry(key).raw, v)) fail(key, "must be a number");
  return v;
}

long long ConfigDocument::get_int(const std::string& key) const {
  long long v = 0;
  if (!parse_int(entry(key).raw, v)) fail(key, "must be an integer");
  return v;
}

bool ConfigDocument::get_bool(const std::string& key) const {
  const auto& raw = entry(key).raw;
  if (raw == "true") return true;
  if (raw == "false") return false;
  fail(key, "must be true or false");
}

std::vector<std::string> ConfigDocument::get_string_list(const std::string& key) const {
  bool ok = false;
  auto items = split_array(entry(key).raw, ok);
  if (!ok) fail(key, "must be an array");
  for (auto& s : items) {
    if (!is_quoted(s)) fail(key, "must be an array of quoted strings");
    s = s.substr(1, s.size() - 2);
  }
  return items;
}

std::vector<double> ConfigDocument::get_double_list(const std::string& key) const {
  bool ok = false;
  auto items = split_array(entry(key).raw, ok);
  if (!ok) fail(key, "must be an array");
  std::vector<double> out;
  for (const auto& s : items) {
    double v = 0.0;
    if (!parse_double(s, v)) fail(key, "must be an array of numbers");
    out.push_back(v);
  }
  return out;
}

std::vector<long long> ConfigDocument::get_int_list(const std::string& key) const {
  bool ok = false;
  auto items = split_array(entry(key).raw, ok);
  if (!ok) fail(key, "must be an array");
  std::vector<long long> out;
  for (const auto& s : items) {
    long long v = 0;
    if (!parse_int(s, v)) fail(key, "must be an array of integers");
    out.push_back(v);
  }
  return out;
}

void ConfigDocument::reject_unused() const {
  for (const auto& [key, e] : values_)
    if (!used_.contains(key))
      throw Error(ErrorKind::Config, source_ + ":" + std::to_string(e.line) + ": unknown key '" + key + "'");
}

IsoWeek parse_iso_week(std::string_view text) {
  text = trim(text);
  const auto w = text.find("-W");
  long long y = 0, n = 0;
  if (w == std::string_view::npos || !parse_int(text.substr(0, w), y) || !parse_int(text.substr(w + 2), n) ||
      n < 1 || n > 53)
    throw Error(ErrorKind::Config, "bad ISO week '" + std::string(text) + "' (expected YYYY-Www)");
  return {static_cast<int>(y), static_cast<int>(n)};
}

namespace {

std::size_t get_count(const ConfigDocument& doc, const std::string& key, long long min_value) {
  const auto v = doc.get_int(key);
  if (v < min_value)
    throw Error(ErrorKind::Config, "key '" + key + "' must be >= " + std::to_string(min_value));
  return static_cast<std::size_t>(v);
}

ModelConfig model_from_section(const ConfigDocument& doc, const std::string& name, std::uint64_t seed) {
  ModelConfig cfg = default_config(name);
  const std::string p = "model." + name + ".";
  auto opt_double = [&](const char* k, double& dst) {
    if (doc.has(p + k)) dst = doc.get_double(p + k);
  };
  auto opt_count = [&](const char* k, std::size_t& dst, long long min_value) {
    if (doc.has(p + k)) dst = get_count(doc, p + k, min_value);
  };
  auto fixed_choice = [&](const char* k, const char* only) {
    if (doc.has(p + k) && doc.get_string(p + k) != only)
      throw Error(ErrorKind::Config, "key '" + p + k + "' only supports \"" + only + "\"");
  };
  std::visit(
      [&](auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RidgeConfig>) {
          if (doc.has(p + "lambda_grid")) c.lambda_grid = doc.get_double_list(p + "lambda_grid");
          opt_count("cv_folds", c.cv_folds, 2);
        } else if constexpr (std::is_same_v<T, SvrConfig>) {
          opt_double("c", c.c);
          if (doc.has(p + "gamma")) {
            // gamma = "scale" selects the variance heuristic.
            if (doc.is_string(p + "gamma")) {
              if (doc.get_string(p + "gamma") != "scale")
                throw Error(ErrorKind::Config, "key '" + p + "gamma' must be a number or \"scale\"");
              c.gamma_scale = true;
            } else {
              c.gamma = doc.get_double(p + "gamma");
            }
          }
          opt_double("epsilon", c.epsilon);
          opt_double("tol", c.tol);
          opt_count("max_passes", c.max_passes, 1);
          fixed_choice("kernel", "rbf");
        } else if constexpr (std::is_same_v<T, MlpConfig>) {
          c.seed = seed;
          if (doc.has(p + "hidden")) {
            c.hidden.clear();
            for (auto h : doc.get_int_list(p + "hidden")) {
              if (h < 1) throw Error(ErrorKind::Config, "key '" + p + "hidden' entries must be >= 1");
              c.hidden.push_back(static_cast<std::size_t>(h));
            }
          }
          opt_double("alpha", c.alpha);
          opt_double("learning_rate", c.learning_rate);
          opt_count("epochs", c.epochs, 0);
          if (doc.has(p + "seed")) c.seed = static_cast<std::uint64_t>(get_count(doc, p + "seed", 0));
          fixed_choice("activation", "relu");
        } else if constexpr (std::is_same_v<T, KnnConfig>) {
          opt_count("k", c.k, 1);
          opt_count("pca_components", c.pca_components, 0);
          fixed_choice("weighting", "uniform");
          fixed_choice("metric", "chebyshev");
          fixed_choice("search", "exhaustive");
        } else if constexpr (std::is_same_v<T, DtrConfig>) {
          opt_count("max_depth", c.max_depth, 1);
          opt_count("min_samples_split", c.min_samples_split, 2);
          opt_count("pca_components", c.pca_components, 0);
          fixed_choice("splitter", "best");
        }
      },
      cfg);
  validate(cfg);
  return cfg;
}

}  // namespace

PipelineConfig pipeline_config_from(const ConfigDocument& doc, const std::filesystem::path& base_dir,
                                    std::optional<std::uint64_t> seed_override) {
  PipelineConfig cfg;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : (base_dir / path).lexically_normal();
  };

  if (doc.has("seed")) cfg.seed = static_cast<std::uint64_t>(get_count(doc, "seed", 0));
  if (seed_override) cfg.seed = *seed_override;
  cfg.out_dir = resolve(doc.has("out") ? doc.get_string("out") : std::string("out"));
  if (doc.has("train_fraction")) {
    cfg.train_fraction = doc.get_double("train_fraction");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
      throw Error(ErrorKind::Config, "key 'train_fraction' must be in (0, 1)");
  }
  if (doc.has("cv_folds")) cfg.cv_folds = get_count(doc, "cv_folds", 2);

  if (doc.has("grid.start") || doc.has("grid.weeks"))
    cfg.grid = WeekGrid(parse_iso_week(doc.get_string("grid.start")), get_count(doc, "grid.weeks", 1));

  if (doc.has("target.ovitrap")) cfg.ovitrap = resolve(doc.get_string("target.ovitrap"));
  for (const auto& key : doc.sections_with_prefix("series.")) {
    SeriesInput s;
    s.key = key;
    s.path = resolve(doc.get_string("series." + key + ".path"));
    s.zone = split_series_key(key).second;
    cfg.series.push_back(std::move(s));
  }
  std::set<std::filesystem::path> seen{cfg.ovitrap};
  for (const auto& s : cfg.series)
    if (!seen.insert(s.path).second)
      throw Error(ErrorKind::Config, "input path " + s.path.string() + " is referenced twice");

  if (doc.has("features.specs"))
    for (const auto& s : doc.get_string_list("features.specs")) cfg.specs.push_back(parse_feature_spec(s));
  if (doc.has("features.alpha")) {
    cfg.alpha = doc.get_double("features.alpha");
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw Error(ErrorKind::Config, "key 'features.alpha' must be in (0, 1]");
  }
  if (doc.has("features.max_features")) cfg.max_features = get_count(doc, "features.max_features", 1);
  if (doc.has("features.lags")) {
    cfg.candidate_lags.clear();
    for (auto l : doc.get_int_list("features.lags")) {
      if (l < 0 || l > kMaxLag) throw Error(ErrorKind::Config, "key 'features.lags' entries must be in [0, 3]");
      cfg.candidate_lags.push_back(static_cast<int>(l));
    }
  }

  std::vector<std::string> names{"linear", "ridge", "svr", "mlp", "knn", "dtr"};
  if (doc.has("models.run")) names = doc.get_string_list("models.run");
  std::set<std::string> unique;
  for (const auto& n : names) {
    if (!unique.insert(n).second) throw Error(ErrorKind::Config, "model '" + n + "' listed twice");
    cfg.models.push_back(model_from_section(doc, n, cfg.seed));
  }
  for (const auto& section : doc.sections_with_prefix("model."))
    if (!unique.contains(section))
      throw Error(ErrorKind::Config, "section [model." + section + "] configures a model not in models.run");

  doc.reject_unused();
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  const auto doc = ConfigDocument::load(path);
  return pipeline_config_from(doc, path.parent_path(), seed_override);
}

}  // namespace ovicast
