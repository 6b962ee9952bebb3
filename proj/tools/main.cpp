// ovicast command-line front end.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "ovicast/config.hpp"
#include "ovicast/error.hpp"
#include "ovicast/pipeline.hpp"

namespace {

using namespace ovicast;

int exit_code(const Error& e) {
  switch (category(e.kind())) {
    case ErrorCategory::Config: return 1;
    case ErrorCategory::Data: return 2;
    case ErrorCategory::Model: return 3;
  }
  return 2;
}

std::pair<std::optional<IsoWeek>, std::optional<IsoWeek>> parse_week_range(const std::string& text) {
  if (text.empty()) return {};
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const IsoWeek w = parse_iso_week(text);
    return {w, w};
  }
  std::optional<IsoWeek> from, to;
  if (colon > 0) from = parse_iso_week(text.substr(0, colon));
  if (colon + 1 < text.size()) to = parse_iso_week(text.substr(colon + 1));
  return {from, to};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weekly oviposition modelling from satellite-derived time series"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "pipeline configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");

  auto* ingest = app.add_subcommand("ingest", "interpolate inputs onto the weekly grid -> dataset.csv");
  auto* screen = app.add_subcommand("screen", "rank lagged candidates by correlation -> screening.csv");
  auto* train = app.add_subcommand("train", "fit configured models on the training split -> model_<name>.json");
  auto* evaluate = app.add_subcommand("evaluate", "compare models -> report.json, report.txt, summary.csv, *.svg");

  auto* predict = app.add_subcommand("predict", "apply a saved model to a weekly dataset");
  PredictOptions popt;
  std::string model_file, dataset_file, output_file, weeks;
  predict->add_option("--model", model_file, "saved model file")->required();
  predict->add_option("--dataset", dataset_file, "weekly dataset (default: <out>/dataset.csv)");
  predict->add_option("--weeks", weeks, "week range, e.g. 2015-W01:2015-W52 (either end may be omitted)");
  predict->add_option("--output", output_file, "predictions file (default: <out>/predictions.csv)");

  auto* synth = app.add_subcommand("synth", "write a synthetic demo input set and pipeline.toml");
  SyntheticSpec spec;
  std::string response = "threshold";
  synth->add_option("--weeks", spec.weeks, "number of weeks")->capture_default_str();
  synth->add_option("--drivers", spec.drivers, "number of driver series")->capture_default_str();
  synth->add_option("--autocorrelation", spec.autocorrelation, "AR(1) coefficient")->capture_default_str();
  synth->add_option("--response", response, "linear | threshold")->capture_default_str();
  synth->add_option("--noise-sd", spec.noise_sd, "Gaussian noise sd on the latent target")->capture_default_str();
  synth->add_option("--houses", spec.houses, "number of ovitrap houses")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      spec.response = parse_response(response);
      if (seed) spec.seed = *seed;
      return cmd_synth(spec, out_dir.empty() ? "synth" : out_dir, std::cout);
    }

    auto load = [&] {
      if (config_path.empty()) throw Error(ErrorKind::Config, "--config is required for this command");
      PipelineConfig cfg = load_pipeline_config(config_path, seed);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      return cfg;
    };

    if (predict->parsed()) {
      std::filesystem::path base = out_dir;
      if (!config_path.empty() && (dataset_file.empty() || output_file.empty())) base = load().out_dir;
      if (base.empty()) base = "out";
      popt.model = model_file;
      popt.dataset = dataset_file.empty() ? base / "dataset.csv" : std::filesystem::path(dataset_file);
      popt.output = output_file.empty() ? base / "predictions.csv" : std::filesystem::path(output_file);
      std::tie(popt.from, popt.to) = parse_week_range(weeks);
      return cmd_predict(popt, std::cout);
    }

    const PipelineConfig cfg = load();
    if (ingest->parsed()) return cmd_ingest(cfg, std::cout);
    if (screen->parsed()) return cmd_screen(cfg, std::cout);
    if (train->parsed()) return cmd_train(cfg, std::cout);
    if (evaluate->parsed()) return cmd_evaluate(cfg, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
