#include "ovicast/model_io.hpp"

#include <fstream>

#include "ovicast/error.hpp"
#include "ovicast/numfmt.hpp"

namespace ovicast {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::BadModelFile, what); }

json num(double v) { return format_double(v); }

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) bad("expected a numeric string");
  const auto& s = j.get_ref<const std::string&>();
  double v = 0.0;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!parse_double(s, v)) bad("bad number '" + s + "'");
  return v;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

json vec(const Vector& v) {
  json a = json::array();
  for (double e : v) a.push_back(num(e));
  return a;
}

Vector get_vec(const json& j) {
  if (!j.is_array()) bad("expected an array");
  Vector v;
  for (const auto& e : j) v.push_back(get_num(e));
  return v;
}

json mat(const Matrix& m) { return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", vec(m.data())}}; }

Matrix get_mat(const json& j) {
  const auto rows = field(j, "rows").get<std::size_t>();
  const auto cols = field(j, "cols").get<std::size_t>();
  const auto data = get_vec(field(j, "data"));
  if (data.size() != rows * cols) bad("matrix data size mismatch");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  return m;
}

json pca_json(const std::optional<PcaModel>& p) {
  if (!p) return nullptr;
  return {{"means", vec(p->means)},
          {"components", mat(p->components)},
          {"explained_variance", vec(p->explained_variance)},
          {"total_variance", num(p->total_variance)}};
}

std::optional<PcaModel> get_pca(const json& j) {
  if (j.is_null()) return std::nullopt;
  PcaModel p;
  p.means = get_vec(field(j, "means"));
  p.components = get_mat(field(j, "components"));
  p.explained_variance = get_vec(field(j, "explained_variance"));
  p.total_variance = get_num(field(j, "total_variance"));
  if (p.components.cols() != p.means.size()) bad("PCA shape mismatch");
  return p;
}

json params_json(const ModelParams& params) {
  return std::visit(
      overloaded{
          [](const LinearParams& p) -> json {
            return {{"coef", vec(p.coef)}, {"intercept", num(p.intercept)}, {"lambda", num(p.lambda)},
                    {"cv_mse", vec(p.cv_mse)}};
          },
          [](const SvrParams& p) -> json {
            return {{"support", mat(p.support)},       {"dual_coef", vec(p.dual_coef)},
                    {"bias", num(p.bias)},             {"gamma", num(p.gamma)},
                    {"alpha", vec(p.alpha)},           {"alpha_star", vec(p.alpha_star)},
                    {"iterations", p.iterations},      {"kkt_violation", num(p.kkt_violation)},
                    {"dual_objective", num(p.dual_objective)}};
          },
          [](const MlpParams& p) -> json {
            json layers = json::array();
            for (std::size_t l = 0; l < p.weights.size(); ++l)
              layers.push_back({{"weights", mat(p.weights[l])}, {"biases", vec(p.biases[l])}});
            return {{"layers", layers},
                    {"initial_loss", num(p.initial_loss)},
                    {"final_loss", num(p.final_loss)},
                    {"loss_log", vec(p.loss_log)}};
          },
          [](const KnnParams& p) -> json {
            return {{"pca", pca_json(p.pca)}, {"points", mat(p.points)}, {"targets", vec(p.targets)}};
          },
          [](const DtrParams& p) -> json {
            json nodes = json::array();
            for (const auto& n : p.nodes)
              nodes.push_back({{"feature", n.feature},
                               {"threshold", num(n.threshold)},
                               {"left", n.left},
                               {"right", n.right},
                               {"value", num(n.value)},
                               {"samples", n.samples}});
            return {{"pca", pca_json(p.pca)}, {"nodes", nodes}};
          },
      },
      params);
}

ModelParams params_from_json(const ModelConfig& cfg, const json& j) {
  return std::visit(
      overloaded{
          [&](const LinearConfig&) -> ModelParams {
            LinearParams p;
            p.coef = get_vec(field(j, "coef"));
            p.intercept = get_num(field(j, "intercept"));
            p.lambda = get_num(field(j, "lambda"));
            p.cv_mse = get_vec(field(j, "cv_mse"));
            return p;
          },
          [&](const RidgeConfig&) -> ModelParams {
            LinearParams p;
            p.coef = get_vec(field(j, "coef"));
            p.intercept = get_num(field(j, "intercept"));
            p.lambda = get_num(field(j, "lambda"));
            p.cv_mse = get_vec(field(j, "cv_mse"));
            return p;
          },
          [&](const SvrConfig&) -> ModelParams {
            SvrParams p;
            p.support = get_mat(field(j, "support"));
            p.dual_coef = get_vec(field(j, "dual_coef"));
            p.bias = get_num(field(j, "bias"));
            p.gamma = get_num(field(j, "gamma"));
            p.alpha = get_vec(field(j, "alpha"));
            p.alpha_star = get_vec(field(j, "alpha_star"));
            p.iterations = field(j, "iterations").get<std::size_t>();
            p.kkt_violation = get_num(field(j, "kkt_violation"));
            p.dual_objective = get_num(field(j, "dual_objective"));
            if (p.dual_coef.size() != p.support.rows()) bad("SVR support/dual size mismatch");
            return p;
          },
          [&](const MlpConfig&) -> ModelParams {
            MlpParams p;
            for (const auto& layer : field(j, "layers")) {
              p.weights.push_back(get_mat(field(layer, "weights")));
              p.biases.push_back(get_vec(field(layer, "biases")));
              if (p.biases.back().size() != p.weights.back().rows()) bad("MLP bias size mismatch");
            }
            p.initial_loss = get_num(field(j, "initial_loss"));
            p.final_loss = get_num(field(j, "final_loss"));
            p.loss_log = get_vec(field(j, "loss_log"));
            return p;
          },
          [&](const KnnConfig&) -> ModelParams {
            KnnParams p;
            p.pca = get_pca(field(j, "pca"));
            p.points = get_mat(field(j, "points"));
            p.targets = get_vec(field(j, "targets"));
            if (p.targets.size() != p.points.rows()) bad("KNN table size mismatch");
            return p;
          },
          [&](const DtrConfig&) -> ModelParams {
            DtrParams p;
            p.pca = get_pca(field(j, "pca"));
            for (const auto& n : field(j, "nodes")) {
              TreeNode t;
              t.feature = field(n, "feature").get<int>();
              t.threshold = get_num(field(n, "threshold"));
              t.left = field(n, "left").get<int>();
              t.right = field(n, "right").get<int>();
              t.value = get_num(field(n, "value"));
              t.samples = field(n, "samples").get<std::size_t>();
              p.nodes.push_back(t);
            }
            const int count = static_cast<int>(p.nodes.size());
            if (count == 0) bad("empty tree");
            for (const auto& t : p.nodes)
              if (t.feature >= 0 && (t.left <= 0 || t.left >= count || t.right <= 0 || t.right >= count))
                bad("tree child index out of range");
            return p;
          },
      },
      cfg);
}

}  // namespace

json config_to_json(const ModelConfig& cfg) {
  return std::visit(overloaded{
                        [](const LinearConfig&) -> json { return json::object(); },
                        [](const RidgeConfig& c) -> json {
                          return {{"lambda_grid", vec(c.lambda_grid)}, {"cv_folds", c.cv_folds}};
                        },
                        [](const SvrConfig& c) -> json {
                          return {{"c", num(c.c)},
                                  {"gamma", num(c.gamma)},
                                  {"gamma_scale", c.gamma_scale},
                                  {"epsilon", num(c.epsilon)},
                                  {"tol", num(c.tol)},
                                  {"max_passes", c.max_passes},
                                  {"kernel", "rbf"}};
                        },
                        [](const MlpConfig& c) -> json {
                          return {{"hidden", c.hidden},
                                  {"alpha", num(c.alpha)},
                                  {"learning_rate", num(c.learning_rate)},
                                  {"epochs", c.epochs},
                                  {"seed", c.seed},
                                  {"activation", "relu"},
                                  {"batch", "full"}};
                        },
                        [](const KnnConfig& c) -> json {
                          return {{"k", c.k},
                                  {"pca_components", c.pca_components},
                                  {"weighting", "uniform"},
                                  {"metric", "chebyshev"},
                                  {"search", "exhaustive"}};
                        },
                        [](const DtrConfig& c) -> json {
                          return {{"max_depth", c.max_depth},
                                  {"min_samples_split", c.min_samples_split},
                                  {"pca_components", c.pca_components},
                                  {"splitter", "best"}};
                        },
                    },
                    cfg);
}

ModelConfig config_from_json(std::string_view name, const json& j) {
  ModelConfig cfg;
  try {
    cfg = default_config(name);
  } catch (const Error& e) {
    bad(e.message());
  }
  std::visit(overloaded{
                 [](LinearConfig&) {},
                 [&](RidgeConfig& c) {
                   c.lambda_grid = get_vec(field(j, "lambda_grid"));
                   c.cv_folds = field(j, "cv_folds").get<std::size_t>();
                 },
                 [&](SvrConfig& c) {
                   c.c = get_num(field(j, "c"));
                   c.gamma = get_num(field(j, "gamma"));
                   c.gamma_scale = field(j, "gamma_scale").get<bool>();
                   c.epsilon = get_num(field(j, "epsilon"));
                   c.tol = get_num(field(j, "tol"));
                   c.max_passes = field(j, "max_passes").get<std::size_t>();
                 },
                 [&](MlpConfig& c) {
                   c.hidden = field(j, "hidden").get<std::vector<std::size_t>>();
                   c.alpha = get_num(field(j, "alpha"));
                   c.learning_rate = get_num(field(j, "learning_rate"));
                   c.epochs = field(j, "epochs").get<std::size_t>();
                   c.seed = field(j, "seed").get<std::uint64_t>();
                 },
                 [&](KnnConfig& c) {
                   c.k = field(j, "k").get<std::size_t>();
                   c.pca_components = field(j, "pca_components").get<std::size_t>();
                 },
                 [&](DtrConfig& c) {
                   c.max_depth = field(j, "max_depth").get<std::size_t>();
                   c.min_samples_split = field(j, "min_samples_split").get<std::size_t>();
                   c.pca_components = field(j, "pca_components").get<std::size_t>();
                 },
             },
             cfg);
  return cfg;
}

json to_json(const TrainedModel& m) {
  json j;
  j["format"] = "ovicast-model";
  j["version"] = kModelFormatVersion;
  j["model"] = std::string(model_name(m.config));
  j["config"] = config_to_json(m.config);
  j["feature_names"] = m.feature_names;
  if (m.normalization) {
    const auto& n = *m.normalization;
    j["normalization"] = {{"feature_means", vec(n.feature_means)},
                          {"feature_sds", vec(n.feature_sds)},
                          {"target_mean", num(n.target_mean)},
                          {"target_sd", num(n.target_sd)}};
  }
  j["params"] = params_json(m.params);
  return j;
}

TrainedModel model_from_json(const json& j) {
  try {
    if (field(j, "format") != "ovicast-model") bad("not an ovicast model file");
    const int version = field(j, "version").get<int>();
    if (version != kModelFormatVersion) bad("unsupported model format version " + std::to_string(version));
    TrainedModel m;
    const auto name = field(j, "model").get<std::string>();
    m.config = config_from_json(name, field(j, "config"));
    m.feature_names = field(j, "feature_names").get<std::vector<std::string>>();
    if (j.contains("normalization")) {
      const auto& nj = j.at("normalization");
      Normalization n;
      n.feature_means = get_vec(field(nj, "feature_means"));
      n.feature_sds = get_vec(field(nj, "feature_sds"));
      n.target_mean = get_num(field(nj, "target_mean"));
      n.target_sd = get_num(field(nj, "target_sd"));
      if (n.feature_means.size() != m.feature_names.size() || n.feature_sds.size() != m.feature_names.size())
        bad("normalization width does not match feature names");
      m.normalization = std::move(n);
    }
    m.params = params_from_json(m.config, field(j, "params"));
    return m;
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

void save_model(const TrainedModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << to_json(m).dump(2) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingModelFile, path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

}  // namespace ovicast
