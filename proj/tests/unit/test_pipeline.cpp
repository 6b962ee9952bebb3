#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <fstream>
#include <functional>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "ovicast/error.hpp"
#include "ovicast/model_io.hpp"
#include "ovicast/numfmt.hpp"
#include "ovicast/pipeline.hpp"

using namespace ovicast;
namespace fs = std::filesystem;

namespace {

fs::path synth_into(const std::string& tag, SyntheticSpec spec = {}) {
  const auto dir = oracle::temp_dir(tag);
  std::ostringstream log;
  cmd_synth(spec, dir, log);
  return dir;
}

PipelineConfig load(const fs::path& dir) { return load_pipeline_config(dir / "pipeline.toml"); }

void run_all(const PipelineConfig& cfg) {
  std::ostringstream log;
  ASSERT_EQ(cmd_ingest(cfg, log), 0);
  ASSERT_EQ(cmd_screen(cfg, log), 0);
  ASSERT_EQ(cmd_train(cfg, log), 0) << log.str();
  ASSERT_EQ(cmd_evaluate(cfg, log), 0);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OVICAST_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void edit_config(const fs::path& dir, const std::function<std::string(std::string)>& f) {
  const auto text = oracle::read_file(dir / "pipeline.toml");
  std::ofstream(dir / "pipeline.toml", std::ios::trunc) << f(text);
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos != std::string::npos) s.replace(pos, from.size(), to);
  return s;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::istringstream in(oracle::read_file(p));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t count_polylines(const boost::property_tree::ptree& t) {
  std::size_t n = 0;
  for (const auto& [name, child] : t) n += (name == "polyline") + count_polylines(child);
  return n;
}

}  // namespace

TEST(Synth, SameSeedSameFiles) {
  const auto a = synth_into("synth_a"), b = synth_into("synth_b");
  for (const char* f : {"ndvi_rural.csv", "trmm.csv", "ovitraps.csv", "pipeline.toml"})
    EXPECT_EQ(oracle::read_file(a / f), oracle::read_file(b / f)) << f;
  SyntheticSpec other;
  other.seed = 1;
  EXPECT_NE(oracle::read_file(synth_into("synth_c", other) / "ndvi_rural.csv"), oracle::read_file(a / "ndvi_rural.csv"));
}

TEST(Synth, RejectsBadSpec) {
  SyntheticSpec s;
  s.weeks = 10;
  EXPECT_THROW(generate_synthetic(s), Error);
  s.weeks = 50;
  s.noise_sd = -1.0;
  EXPECT_THROW(generate_synthetic(s), Error);
}

TEST(Pipeline, NoiselessLinearResponseIsRecoveredByLinearModel) {
  SyntheticSpec spec;
  spec.response = Response::Linear;
  spec.noise_sd = 0.0;
  const auto dir = synth_into("linear", spec);
  edit_config(dir, [](std::string t) { return replace(t, R"(run = ["linear", "ridge", "svr", "mlp", "knn", "dtr"])", R"(run = ["linear"])"); });
  edit_config(dir, [](std::string t) { return replace(t, "[model.svr]\ngamma = \"scale\"\n", ""); });
  const auto cfg = load(dir);
  run_all(cfg);
  const auto report = nlohmann::json::parse(oracle::read_file(cfg.out_dir / "report.json"));
  EXPECT_GT(report.at("models").at(0).at("Corr11").get<double>(), 0.999);
  EXPECT_LT(report.at("models").at(0).at("MSE").get<double>(), 0.002);
}

TEST(Pipeline, IngestToyInputAndRerunIsByteIdentical) {
  const auto dir = oracle::temp_dir("toy");
  std::ofstream(dir / "a.csv") << "date,value\n2012-08-01,1\n2012-09-01,2\n2012-10-01,3\n";
  std::ofstream(dir / "b.csv") << "date,value\n2012-07-20,5\n2012-10-20,5.5\n";
  std::ofstream(dir / "o.csv") << "house_id,placement,iso_year,iso_week,egg_count\n"
                                  "h1,outside,2012,32,3\nh1,inside,2012,33,4\nh2,outside,2012,36,8\n";
  std::ofstream(dir / "p.toml") << "[target]\novitrap = \"o.csv\"\n[series.ndvi_urban]\npath = \"a.csv\"\n"
                                   "[series.trmm]\npath = \"b.csv\"\n";
  const auto cfg = load_pipeline_config(dir / "p.toml");
  std::ostringstream log;
  ASSERT_EQ(cmd_ingest(cfg, log), 0);
  const auto rows = read_csv(cfg.out_dir / "dataset.csv");
  ASSERT_EQ(rows.size(), 6u);  // header + weeks 32..36
  EXPECT_EQ(rows[0], (std::vector<std::string>{"iso_year", "iso_week", "ndvi_urban", "trmm", "oviposition"}));
  EXPECT_EQ(rows[1][4], "3");
  EXPECT_EQ(rows[2][4], "0");
  EXPECT_EQ(rows[5][4], "8");
  const auto first = oracle::read_file(cfg.out_dir / "dataset.csv");
  const auto prov = oracle::read_file(cfg.out_dir / "dataset.provenance.json");
  ASSERT_EQ(cmd_ingest(cfg, log), 0);
  EXPECT_EQ(oracle::read_file(cfg.out_dir / "dataset.csv"), first);
  EXPECT_EQ(oracle::read_file(cfg.out_dir / "dataset.provenance.json"), prov);
  const auto pj = nlohmann::json::parse(prov);
  EXPECT_EQ(pj.at("interpolation"), "linear@thursday");
  EXPECT_EQ(pj.at("series").at(0).at("sha256").get<std::string>().size(), 64u);
}

TEST(Pipeline, IngestedColumnsMatchModuleCalls) {
  const auto dir = synth_into("compose");
  const auto cfg = load(dir);
  std::ostringstream log;
  cmd_ingest(cfg, log);
  const Dataset d = load_dataset(cfg.out_dir / "dataset.csv");
  ASSERT_EQ(d.library.size(), 5u);
  for (const auto& s : cfg.series) {
    const auto direct = interpolate_to_weekly(parse_raw_series(s.path, s.key, s.zone), *cfg.grid);
    const auto& got = d.library.at(s.key).values;
    ASSERT_EQ(got.size(), direct.values.size());
    for (std::size_t t = 0; t < got.size(); ++t) {
      if (is_missing(direct.values[t]))
        EXPECT_TRUE(is_missing(got[t]));
      else
        EXPECT_EQ(got[t], direct.values[t]);
    }
  }
  const auto target = aggregate_oviposition(parse_ovitrap_csv(cfg.ovitrap), *cfg.grid);
  EXPECT_EQ(d.target.values, target.values);
}

TEST(Pipeline, ScreeningRecoversPlantedFeatures) {
  SyntheticSpec spec;
  spec.response = Response::Linear;
  spec.autocorrelation = 0.0;
  const auto dir = synth_into("screen", spec);
  const auto cfg = load(dir);
  std::ostringstream log;
  cmd_ingest(cfg, log);
  ASSERT_EQ(cmd_screen(cfg, log), 0);
  const auto rows = read_csv(cfg.out_dir / "screening.csv");
  EXPECT_EQ(rows[0], (std::vector<std::string>{"spec", "variable", "zone", "lag", "r", "p", "selected", "rank"}));
  EXPECT_EQ(rows.size(), 21u);
  std::set<std::string> selected;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][6] == "true") selected.insert(rows[i][0]);
  EXPECT_EQ(selected, (std::set<std::string>{"ndvi:rural:lag1", "ndwi:rural:lag1", "lstd:rural:lag3",
                                             "lstn:rural:lag1", "trmm:none:lag3"}));
}

TEST(Pipeline, ScreeningWithThresholdDisabled) {
  SyntheticSpec spec;
  spec.noise_sd = 50.0;
  const auto dir = synth_into("screen_all", spec);
  edit_config(dir, [](std::string t) { return replace(replace(t, "alpha = 0.05", "alpha = 1.0"), "max_features = 5", "max_features = 7"); });
  const auto cfg = load(dir);
  std::ostringstream log;
  cmd_ingest(cfg, log);
  cmd_screen(cfg, log);
  std::size_t n = 0;
  for (const auto& row : read_csv(cfg.out_dir / "screening.csv")) n += row[6] == "true";
  EXPECT_EQ(n, 7u);
}

TEST(Pipeline, FullRunWritesEveryOutputAndWellFormedSvg) {
  const auto dir = synth_into("full");
  const auto cfg = load(dir);
  run_all(cfg);
  for (const char* name : {"linear", "ridge", "svr", "mlp", "knn", "dtr"}) {
    EXPECT_TRUE(fs::exists(cfg.out_dir / ("model_" + std::string(name) + ".json"))) << name;
    boost::property_tree::ptree t;
    boost::property_tree::read_xml((cfg.out_dir / ("fit_" + std::string(name) + ".svg")).string(), t);
    EXPECT_EQ(count_polylines(t), 2u) << name;  // observed + fitted
  }
  for (const char* svg : {"scatter.svg", "residual_hist.svg", "residual_box.svg"}) {
    boost::property_tree::ptree t;
    EXPECT_NO_THROW(boost::property_tree::read_xml((cfg.out_dir / svg).string(), t)) << svg;
    EXPECT_EQ(t.begin()->first, "svg");
  }
  const auto report = nlohmann::json::parse(oracle::read_file(cfg.out_dir / "report.json"));
  EXPECT_EQ(report.at("models").size(), 6u);
  const auto text = oracle::read_file(cfg.out_dir / "report.txt");
  EXPECT_EQ(text.substr(0, text.find('\n')).find("model"), 0u);
  const auto summary = read_csv(cfg.out_dir / "summary.csv");
  EXPECT_EQ(summary.size(), 8u);
  EXPECT_EQ(summary[1][0], "observed");
}

TEST(Pipeline, RepeatedRunsAreByteIdentical) {
  const auto a = synth_into("det_a"), b = synth_into("det_b");
  const auto ca = load(a), cb = load(b);
  run_all(ca);
  run_all(cb);
  for (const char* f : {"report.json", "report.txt", "summary.csv", "dataset.csv", "screening.csv",
                        "model_linear.json", "model_svr.json", "model_mlp.json", "model_knn.json", "model_dtr.json",
                        "fit_knn.svg", "scatter.svg"})
    EXPECT_EQ(oracle::read_file(ca.out_dir / f), oracle::read_file(cb.out_dir / f)) << f;
}

TEST(Pipeline, TrainContinuesPastFailingModel) {
  const auto dir = synth_into("partial");
  edit_config(dir, [](std::string t) { return t + "\n[model.knn]\nk = 1000\n"; });
  const auto cfg = load(dir);
  std::ostringstream log;
  cmd_ingest(cfg, log);
  EXPECT_EQ(cmd_train(cfg, log), 3);
  EXPECT_FALSE(fs::exists(cfg.out_dir / "model_knn.json"));
  EXPECT_TRUE(fs::exists(cfg.out_dir / "model_dtr.json"));
  EXPECT_NE(log.str().find("knn"), std::string::npos);
}

TEST(Pipeline, EvaluateWithoutModelsIsMissingModelFile) {
  const auto dir = synth_into("nomodels");
  const auto cfg = load(dir);
  std::ostringstream log;
  cmd_ingest(cfg, log);
  try {
    cmd_evaluate(cfg, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingModelFile);
  }
}

TEST(Predict, SavedModelsReproduceInMemoryPredictions) {
  const auto dir = synth_into("predict");
  const auto cfg = load(dir);
  run_all(cfg);
  const Dataset d = load_dataset(cfg.out_dir / "dataset.csv");
  const FeatureMatrix fm = assemble_matrix(cfg.specs, d.library, d.target);

  for (const char* name : {"linear", "knn"}) {
    const auto model = load_model(cfg.out_dir / ("model_" + std::string(name) + ".json"));
    PredictOptions opt{cfg.out_dir / ("model_" + std::string(name) + ".json"), cfg.out_dir / "dataset.csv",
                       cfg.out_dir / "pred.csv", std::nullopt, std::nullopt};
    std::ostringstream log;
    ASSERT_EQ(cmd_predict(opt, log), 0);
    const auto rows = read_csv(opt.output);
    ASSERT_EQ(rows.size(), d.grid.size() + 1);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"iso_year", "iso_week", "z_score", "egg_count"}));
    EXPECT_EQ(rows[1][2], "");  // no lag-3 history in the first week

    const Vector expected = predict(model, fm.X);
    const auto& kp = std::get_if<KnnParams>(&model.params);
    for (std::size_t i = 0; i < fm.rows.size(); ++i) {
      const auto t = *d.grid.index_of(fm.rows[i]);
      double z = 0.0;
      ASSERT_TRUE(parse_double(rows[t + 1][2], z));
      EXPECT_EQ(z, expected[i]) << name << " row " << i;
      double eggs = 0.0;
      ASSERT_TRUE(parse_double(rows[t + 1][3], eggs));
      EXPECT_EQ(eggs, z * model.normalization->target_sd + model.normalization->target_mean);
      if (kp) {
        EXPECT_EQ(z, oracle::knn_predict(kp->points, kp->targets, 4, transform_row(*kp->pca, fm.X.row(i))));
      }
    }
  }
}

TEST(Predict, BackTransformOfZeroIsTargetMean) {
  const auto dir = oracle::temp_dir("backtransform");
  TrainedModel m{LinearConfig{}, {"x:urban:lag0"}, LinearParams{{1.0}, 0.0, 0.0, {}},
                 Normalization{{10.0}, {2.0}, 345.5, 12.0}};
  save_model(m, dir / "m.json");
  std::ofstream(dir / "d.csv") << "iso_year,iso_week,x_urban,oviposition\n2014,1,10,\n2014,2,12,\n";
  PredictOptions opt{dir / "m.json", dir / "d.csv", dir / "p.csv", IsoWeek{2014, 1}, IsoWeek{2014, 1}};
  std::ostringstream log;
  cmd_predict(opt, log);
  const auto rows = read_csv(opt.output);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][2], "0");
  EXPECT_EQ(rows[1][3], "345.5");
}

TEST(Predict, FeatureMismatchListsNames) {
  const auto dir = oracle::temp_dir("mismatch");
  TrainedModel m{LinearConfig{}, {"ndvi:rural:lag1"}, LinearParams{{1.0}, 0.0, 0.0, {}}, std::nullopt};
  save_model(m, dir / "m.json");
  std::ofstream(dir / "d.csv") << "iso_year,iso_week,ndwi_rural,oviposition\n2014,1,1,\n2014,2,2,\n";
  std::ostringstream log;
  try {
    cmd_predict({dir / "m.json", dir / "d.csv", dir / "p.csv", std::nullopt, std::nullopt}, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FeatureMismatch);
    EXPECT_NE(std::string(e.what()).find("ndvi:rural:lag1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("ndwi_rural"), std::string::npos);
  }
}

TEST(Cli, ExitCodesAndNoPartialOutputs) {
  const auto dir = synth_into("cli");
  const std::string cfg = "--config " + (dir / "pipeline.toml").string();
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli(cfg + " evaluate"), 2);  // dataset not ingested yet
  EXPECT_EQ(run_cli(cfg + " ingest"), 0);
  EXPECT_EQ(run_cli(cfg + " evaluate"), 3);  // no model files

  std::ofstream(dir / "bad.toml") << oracle::read_file(dir / "pipeline.toml") << "\n[model.forest]\ndepth = 2\n";
  const auto bad_out = dir / "bad_out";
  EXPECT_EQ(run_cli("--config " + (dir / "bad.toml").string() + " --out " + bad_out.string() + " train"), 1);
  EXPECT_FALSE(fs::exists(bad_out));

  edit_config(dir, [](std::string t) { return replace(t, R"(run = ["linear", "ridge", "svr", "mlp", "knn", "dtr"])", R"(run = ["linear", "tree"])"); });
  EXPECT_EQ(run_cli(cfg + " train"), 1);
  EXPECT_FALSE(fs::exists(dir / "out" / "model_linear.json"));

  EXPECT_EQ(run_cli("--out " + (dir / "s2").string() + " --seed 5 synth --response linear --weeks 60"), 0);
  EXPECT_TRUE(fs::exists(dir / "s2" / "pipeline.toml"));
  EXPECT_EQ(run_cli("--out " + (dir / "s3").string() + " synth --response wiggly"), 1);
}

TEST(Cli, PredictCommand) {
  const auto dir = synth_into("cli_predict");
  const std::string cfg = "--config " + (dir / "pipeline.toml").string();
  ASSERT_EQ(run_cli(cfg + " ingest"), 0);
  ASSERT_EQ(run_cli(cfg + " train"), 0);
  ASSERT_EQ(run_cli(cfg + " predict --model " + (dir / "out" / "model_dtr.json").string() +
                    " --weeks 2015-W10:2015-W19"),
            0);
  const auto rows = read_csv(dir / "out" / "predictions.csv");
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[1][0], "2015");
  EXPECT_EQ(rows[1][1], "10");
  EXPECT_EQ(run_cli(cfg + " predict --model " + (dir / "nope.json").string()), 3);
}
