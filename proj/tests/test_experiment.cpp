#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "qrc/experiment.hpp"
#include "qrc/noise.hpp"
#include "test_util.hpp"

using namespace qrc;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qrc_test_experiment_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmallNarma = R"(
[experiment]
task = narma2
trials = 3
seed = 4
[reservoir]
qubits = 4
shots = 256
noise_preset = strong-dense
)";

const char* kSmallClassify = R"(
[experiment]
task = classify
trials = 2
seed = 9
[reservoir]
qubits = 2
shots = 128
noise_preset = weak-sparse
[classification]
samples_per_class = 4
timesteps = 24
washout = 8
folds = 2
)";

ExperimentConfig with_output(const char* text, const fs::path& dir, int workers = 1) {
  auto c = parse_config(text);
  c.output_dir = dir;
  c.workers = workers;
  return c;
}

}  // namespace

TEST(Config, MinimalNarmaFillsDefaults) {
  const fs::path dir = scratch("minimal");
  {
    std::ofstream(dir / "quiet.ini") << "[gates]\np1 = 0.001\n[topology]\nnum_qubits = 8\n";
  }
  {
    std::ofstream(dir / "run.ini") << "[experiment]\ntask = narma2\n[reservoir]\nnoise_profile = quiet.ini\n";
  }
  const auto c = load_config(dir / "run.ini");
  EXPECT_EQ(c.task, Task::Narma2);
  EXPECT_EQ(c.washout, 10);
  EXPECT_EQ(c.train, 70);
  EXPECT_EQ(c.test, 20);
  EXPECT_EQ(c.signal.length, 100);
  ASSERT_TRUE(c.reservoir.shots.has_value());
  EXPECT_EQ(*c.reservoir.shots, 8192);
  EXPECT_EQ(c.reservoir.scale, 2.0);
  EXPECT_EQ(c.trials, 10);
  EXPECT_EQ(c.reservoir.layout.num_qubits(), 8);
  EXPECT_EQ(c.reservoir.layout.num_pairs(), 4);
  EXPECT_EQ(c.reservoir.profile.p1, 0.001);
  EXPECT_EQ(c.noise_source, (dir / "quiet.ini").lexically_normal().generic_string());
}

TEST(Config, ClassificationDefaults) {
  const auto c = parse_config("[experiment]\ntask = classify\n");
  EXPECT_DOUBLE_EQ(c.reservoir.scale, std::numbers::pi);
  EXPECT_EQ(c.class_washout, 40);
  EXPECT_EQ(c.folds, 10);
  EXPECT_EQ(c.sensor.timesteps, 90);
  EXPECT_EQ(c.sensor.samples_per_class, 20);
}

TEST(Config, Errors) {
  EXPECT_EQ(field_of([] { parse_config("[experiment]\ntask = narma2\ntrials = -1\n"); }), "experiment.trials");
  EXPECT_EQ(kind_of([] { parse_config("[experiment]\ntask = narma2\ntrials = -1\n"); }), ErrorKind::Range);
  try {
    parse_config("[experiment]\ntask = narma7\n");
    FAIL() << "unknown task accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    for (const auto& name : task_names()) EXPECT_NE(std::string(e.what()).find(name), std::string::npos) << name;
  }
  EXPECT_EQ(field_of([] { parse_config("[experiment]\n"); }), "experiment.task");
  EXPECT_EQ(field_of([] { parse_config("[experiment]\ntask = narma2\ncolour = red\n"); }), "experiment.colour");
  EXPECT_EQ(field_of([] { parse_config("[experiment]\ntask = narma2\n[reservoir]\nshots = 0\n"); }),
            "reservoir.shots");
  EXPECT_EQ(field_of([] { parse_config("[experiment]\ntask = narma2\n[reservoir]\nnoise_profile = /nonexistent.ini\n"); }),
            "reservoir.noise_profile");
  EXPECT_EQ(field_of([] { parse_config("[experiment]\ntask = narma2\n[split]\ntrain = 95\n[signal]\nlength = 100\n"); }), "signal.length");
  EXPECT_EQ(field_of([] { parse_config("[experiment]\ntask = narma2\n[reservoir]\npairs = 0-1, 1-2\n"); }),
            "reservoir.pairs");
}

TEST(Config, FormatRoundTrip) {
  auto c = parse_config(kSmallClassify);
  c.signal.first_t = 1;
  const auto text = format_config(c);
  const auto back = parse_config(text);
  EXPECT_EQ(format_config(back), text);
  EXPECT_EQ(back.sensor.samples_per_class, 4);
  EXPECT_EQ(back.reservoir.profile.p1, c.reservoir.profile.p1);
  EXPECT_EQ(back.esn.radii.size(), 100U);
}

TEST(Config, ParseTaskNames) {
  for (const auto& name : task_names()) EXPECT_EQ(to_string(parse_task(name)), name);
}

TEST(Run, NarmaSummaryAndFiles) {
  const fs::path dir = scratch("narma");
  const auto result = run_experiment(with_output(kSmallNarma, dir));
  const auto summary = Json::parse(result.summary_json);
  EXPECT_EQ(summary["task"], "narma2");
  EXPECT_EQ(summary["qr_nmse"]["per_trial"].size(), 3U);
  EXPECT_NEAR(summary["lr_nmse"]["nmse"].get<double>(), 1.8e-5, 0.1e-5);
  EXPECT_EQ(summary["lr_nmse"]["nmse_display"], "1.8e-05");
  EXPECT_TRUE(std::regex_match(summary["qr_nmse"]["mean_display"].get<std::string>(),
                               std::regex(R"(\d\.\de[-+]\d\d)")));
  for (const char* f : {"features_trial00.csv", "features_trial02.csv", "predictions.csv", "stationarity.csv",
                        "stationarity.txt", "targets_stats.csv", "summary.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(slurp(dir / "summary.json"), result.summary_json);
}

TEST(Run, EveryReportCarriesProvenance) {
  const fs::path dir = scratch("provenance");
  const auto result = run_experiment(with_output(kSmallClassify, dir));
  const auto manifest = Json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["artifact"], std::string(kArtifactName));
  EXPECT_EQ(manifest["version"], std::string(kArtifactVersion));
  EXPECT_EQ(manifest["seed"], 9);
  EXPECT_FALSE(manifest["config"].get<std::string>().empty());
  ASSERT_EQ(manifest["files"].size(), result.files.size());
  for (const auto& f : result.files) {
    const std::string text = slurp(dir / f);
    if (f.extension() == ".json") {
      const auto j = Json::parse(text);
      if (f != "manifest.json") EXPECT_TRUE(j.contains("manifest")) << f;
    } else {
      EXPECT_EQ(text.rfind("# qrc ", 0), 0U) << f;
      EXPECT_NE(text.find("manifest=manifest.json"), std::string::npos) << f;
    }
  }
}

TEST(Run, ClassifySummaryShape) {
  const fs::path dir = scratch("classify");
  const auto summary = Json::parse(run_experiment(with_output(kSmallClassify, dir)).summary_json);
  EXPECT_EQ(summary["folds"], 2);
  EXPECT_EQ(summary["qr_accuracy"]["confusion"].size(), 3U);
  int total = 0;
  for (const auto& row : summary["qr_accuracy"]["confusion"])
    for (const auto& v : row) total += v.get<int>();
  EXPECT_EQ(total, 2 * 12);
  EXPECT_EQ(summary["scored_t"][0], 9);
  EXPECT_EQ(summary["scored_t"][1], 23);
}

TEST(Run, DeterministicAcrossRunsAndWorkers) {
  for (const char* text : {kSmallNarma, kSmallClassify}) {
    const fs::path dir = scratch("determinism");
    const auto a = run_experiment(with_output(text, dir, 1));
    std::vector<std::string> first;
    for (const auto& f : a.files) first.push_back(slurp(dir / f));
    const auto b = run_experiment(with_output(text, dir, 1));
    EXPECT_EQ(a.summary_json, b.summary_json);
    const auto c = run_experiment(with_output(text, dir, 3));
    ASSERT_EQ(c.files, a.files);
    for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(slurp(dir / c.files[i]), first[i]) << a.files[i];
  }
}

TEST(Run, SeedChangesSampledFeatures) {
  const fs::path dir = scratch("seed");
  auto c = with_output(kSmallNarma, dir);
  run_experiment(c);
  const auto a = slurp(dir / "features_trial00.csv");
  c.seed = 5;
  run_experiment(c);
  EXPECT_NE(slurp(dir / "features_trial00.csv"), a);
}

TEST(Run, EsnSweepSummary) {
  const fs::path dir = scratch("sweep");
  auto c = parse_config(
      "[experiment]\ntask = esn-sweep\n[esn]\nnodes = 2, 5\nradius_first = 0.1\nradius_last = 0.5\n"
      "radius_step = 0.1\ntrials = 4\n");
  c.output_dir = dir;
  const auto summary = Json::parse(run_experiment(c).summary_json);
  ASSERT_EQ(summary["nodes"].size(), 2U);
  for (const auto& n : summary["nodes"])
    EXPECT_LE(n["global_minimum"].get<double>(), n["global_average"].get<double>());
  EXPECT_TRUE(fs::exists(dir / "sweep_radius.csv"));
}

TEST(ExportCircuits, OneFilePerTimestepWithManifest) {
  const fs::path dir = scratch("qasm");
  const auto c = parse_config("[experiment]\ntask = narma2\n[reservoir]\nqubits = 6\n");
  const auto u = task_inputs(c);
  ASSERT_EQ(u.size(), 100U);
  const auto files = export_circuits(c, u, dir);
  ASSERT_EQ(files.size(), 101U);
  EXPECT_EQ(files.front(), "circuit_t0001.qasm");
  EXPECT_EQ(files.back(), "manifest.json");
  const auto manifest = Json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["shots"], 8192);
  ASSERT_EQ(manifest["circuits"].size(), 100U);
  const std::regex gate(R"(^(h|rx\(.*\)|rz\(.*\)|cx) q)");
  for (int k : {1, 7, 100}) {
    const auto& entry = manifest["circuits"][k - 1];
    EXPECT_EQ(entry["t"], k);
    EXPECT_EQ(entry["shots"], 8192);
    EXPECT_EQ(entry["gates"], 6 + 5 * 3 * k);
    std::istringstream in(slurp(dir / entry["file"].get<std::string>()));
    int gates = 0;
    for (std::string line; std::getline(in, line);) gates += std::regex_search(line, gate);
    EXPECT_EQ(gates, 6 + 5 * 3 * k) << k;
  }
  EXPECT_EQ(kind_of([&] { export_circuits(c, std::vector<double>{}, dir); }), ErrorKind::InvalidArgument);
}

TEST(Analyze, FeatureCsvRoundTrip) {
  const fs::path dir = scratch("analyze");
  const auto c = with_output(kSmallNarma, dir);
  run_experiment(c);
  const auto result = analyze_features(c, dir / "features_trial00.csv");
  const auto summary = Json::parse(result.summary_json);
  EXPECT_EQ(summary["columns"].size(), 4U);
  EXPECT_EQ(summary["stationarity_gaps"].size(), 4U);
  EXPECT_TRUE(summary.contains("manifest"));
}

TEST(NumericCsv, ParsesAndRejects) {
  const auto t = parse_numeric_csv("# note\nt,a\n1,0.5\n2,-1e-3\n");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "a"}));
  EXPECT_EQ(t.values(1, 1), -1e-3);
  EXPECT_EQ(kind_of([] { parse_numeric_csv("a,b\n1\n"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_numeric_csv("# only\n"); }), ErrorKind::Parse);
}

TEST(Formatting, TwoDigitsAndErrorJson) {
  EXPECT_EQ(format_two_digits(1.764e-5), "1.8e-05");
  EXPECT_EQ(format_two_digits(9.7e-4), "9.7e-04");
  const auto j = Json::parse(error_json(Error(ErrorKind::Range, "bad p1", "p1")));
  EXPECT_EQ(j["error"]["kind"], std::string(to_string(ErrorKind::Range)));
  EXPECT_EQ(j["error"]["field"], "p1");
  EXPECT_EQ(Json::parse(error_json(std::runtime_error("x")))["error"]["kind"], "internal");
}
