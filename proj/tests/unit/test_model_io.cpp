#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "oracles.hpp"
#include "ovicast/error.hpp"
#include "ovicast/model_io.hpp"

using namespace ovicast;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an ovicast::Error";
  return ErrorKind::Config;
}

}  // namespace

TEST(ModelIo, RoundTripIsBitIdenticalForEveryModel) {
  std::mt19937_64 rng(1);
  const Matrix X = oracle::random_matrix(rng, 40, 5);
  Vector y = oracle::random_vector(rng, 40, 0.3);
  for (std::size_t i = 0; i < 40; ++i) y[i] += X(i, 0) * X(i, 1) + 0.1 / 3.0;
  const Matrix Q = oracle::random_matrix(rng, 15, 5);
  const auto dir = oracle::temp_dir("modelio");
  for (const char* name : {"linear", "ridge", "svr", "mlp", "knn", "dtr"}) {
    ModelConfig cfg = default_config(name);
    if (auto* m = std::get_if<MlpConfig>(&cfg)) m->epochs = 300, m->seed = 9;
    TrainedModel model = fit(cfg, X, y, {"a:urban:lag0", "b:urban:lag1", "c:rural:lag2", "d:rural:lag3", "e:none:lag1"});
    model.normalization = Normalization{{1, 2, 3, 4, 5}, {0.1, 0.2, 0.3, 0.4, 0.5}, 123.456, 7.0 / 3.0};
    const auto path = dir / (std::string(name) + ".json");
    save_model(model, path);
    const TrainedModel back = load_model(path);
    EXPECT_EQ(back.feature_names, model.feature_names) << name;
    ASSERT_TRUE(back.normalization.has_value());
    EXPECT_EQ(back.normalization->target_sd, 7.0 / 3.0);
    EXPECT_EQ(model_name(back.config), name);
    EXPECT_EQ(predict(back, Q), predict(model, Q)) << name;
    // Saving the reloaded model reproduces the file byte for byte.
    save_model(back, dir / "again.json");
    EXPECT_EQ(oracle::read_file(dir / "again.json"), oracle::read_file(path)) << name;
  }
}

TEST(ModelIo, DocumentHeaderAndStringNumbers) {
  const auto m = fit_ols(Matrix{{1}, {2}, {3}, {4}}, Vector{0.1, 0.2, 0.30000000000000004, 0.4});
  const auto j = to_json(m);
  EXPECT_EQ(j.at("format"), "ovicast-model");
  EXPECT_EQ(j.at("version"), kModelFormatVersion);
  EXPECT_EQ(j.at("model"), "linear");
  EXPECT_TRUE(j.at("params").at("intercept").is_string());
}

TEST(ModelIo, MissingAndMalformedFiles) {
  const auto dir = oracle::temp_dir("modelio_bad");
  EXPECT_EQ(kind_of([&] { load_model(dir / "nope.json"); }), ErrorKind::MissingModelFile);
  std::ofstream(dir / "garbage.json") << "{not json";
  EXPECT_EQ(kind_of([&] { load_model(dir / "garbage.json"); }), ErrorKind::BadModelFile);
  std::ofstream(dir / "future.json") << R"({"format":"ovicast-model","version":99,"model":"linear"})";
  EXPECT_EQ(kind_of([&] { load_model(dir / "future.json"); }), ErrorKind::BadModelFile);
}

TEST(ModelIo, ConfigJsonRoundTrip) {
  SvrConfig s;
  s.gamma_scale = true;
  s.c = 0.1 + 0.2;
  const auto back = std::get<SvrConfig>(config_from_json("svr", config_to_json(s)));
  EXPECT_TRUE(back.gamma_scale);
  EXPECT_EQ(back.c, s.c);
  MlpConfig m;
  m.hidden = {4, 2};
  m.seed = 18446744073709551615ull;
  const auto mb = std::get<MlpConfig>(config_from_json("mlp", config_to_json(m)));
  EXPECT_EQ(mb.hidden, m.hidden);
  EXPECT_EQ(mb.seed, m.seed);
}
