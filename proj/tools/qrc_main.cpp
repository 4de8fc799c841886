// Command-line entry point: run / sweep-esn / export-qasm / analyze.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qrc/error.hpp"
#include "qrc/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string output;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("-c,--config", flags.config, "Experiment config (INI)");
  if (config_required) {
    opt->required()->check(CLI::ExistingFile);
  } else {
    opt->check(CLI::ExistingFile);
  }
  cmd->add_option("-s,--seed", flags.seed, "Override experiment.seed");
  cmd->add_option("-j,--workers", flags.workers, "Override experiment.workers")->check(CLI::PositiveNumber);
  cmd->add_option("-o,--output", flags.output, "Override experiment.output directory");
}

qrc::ExperimentConfig resolve(const CommonFlags& flags, qrc::Task fallback_task, fs::path& error_dir) {
  if (!flags.output.empty()) error_dir = flags.output;
  qrc::ExperimentConfig cfg =
      flags.config.empty()
          ? qrc::parse_config("[experiment]\ntask = " + std::string(qrc::to_string(fallback_task)) + "\n")
          : qrc::load_config(flags.config);
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.sensor.seed = *flags.seed;
  }
  if (flags.workers) cfg.workers = *flags.workers;
  if (!flags.output.empty()) cfg.output_dir = flags.output;
  error_dir = cfg.output_dir;
  cfg.validate();
  return cfg;
}

void report(const qrc::RunResult& result, const fs::path& dir) {
  for (const auto& f : result.files) std::cout << (dir / f).generic_string() << '\n';
}

constexpr const char* kDefaults = R"(Config defaults (see docs/config.md):
  [experiment] trials=10 seed=1 workers=1 output=out
  [reservoir]  qubits=8 pairs=adjacent scale=2 (pi for classify) shots=8192 noise_preset=noiseless
  [split]      washout=10 train=70 test=20
  [signal]     length=100 first_t=0 amplitude=0.1 alpha_bar=2.11 beta_bar=3.73 gamma_bar=4.11 period=100 narma=narma2
  [classification] classes=3 samples_per_class=20 timesteps=90 noise=0.01 washout=40 folds=10
  [esn]        nodes=2,5,10,20,50 radius 0.01..1 step 0.01 trials=100 input_alphabet=zero-one
Tasks: narma2 narma5 narma10 classify esn-sweep stationarity)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy quantum reservoir computing simulator and benchmark runner"};
  app.footer(kDefaults);
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, qasm_flags, analyze_flags;
  auto* run = app.add_subcommand("run", "Run the task named in the config");
  add_common(run, run_flags, true);

  auto* sweep = app.add_subcommand("sweep-esn", "Echo state network spectral-radius sweep");
  add_common(sweep, sweep_flags, false);
  std::string target;
  std::optional<int> esn_trials;
  sweep->add_option("--target", target, "narma2, narma5 or narma10 (default: config signal.narma)")
      ->check(CLI::IsMember({"narma2", "narma5", "narma10"}));
  sweep->add_option("--trials", esn_trials, "Override esn.trials")->check(CLI::PositiveNumber);

  auto* qasm = app.add_subcommand("export-qasm", "Write one OpenQASM 2.0 circuit per timestep");
  add_common(qasm, qasm_flags, false);

  auto* analyze = app.add_subcommand("analyze", "Stationarity report for a config or a features CSV");
  add_common(analyze, analyze_flags, false);
  std::string input_csv;
  analyze->add_option("-i,--input", input_csv, "Features CSV to analyse instead of simulating")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  fs::path error_dir;
  try {
    if (*run) {
      const auto cfg = resolve(run_flags, qrc::Task::Narma2, error_dir);
      report(qrc::run_experiment(cfg), cfg.output_dir);
    } else if (*sweep) {
      auto cfg = resolve(sweep_flags, qrc::Task::EsnSweep, error_dir);
      cfg.task = qrc::Task::EsnSweep;
      if (!target.empty()) cfg.narma_order = std::stoi(target.substr(5));
      if (esn_trials) cfg.esn.trials = *esn_trials;
      report(qrc::run_experiment(cfg), cfg.output_dir);
    } else if (*qasm) {
      const auto cfg = resolve(qasm_flags, qrc::Task::Narma2, error_dir);
      const auto files = qrc::export_circuits(cfg, qrc::task_inputs(cfg), cfg.output_dir);
      report({files, {}}, cfg.output_dir);
    } else if (*analyze) {
      auto cfg = resolve(analyze_flags, qrc::Task::Stationarity, error_dir);
      if (!input_csv.empty()) {
        report(qrc::analyze_features(cfg, input_csv), cfg.output_dir);
      } else {
        cfg.task = qrc::Task::Stationarity;
        report(qrc::run_experiment(cfg), cfg.output_dir);
      }
    }
  } catch (const std::exception& e) {
    const std::string text = qrc::error_json(e);
    std::cerr << text;
    if (!error_dir.empty()) {
      std::error_code ec;
      fs::create_directories(error_dir, ec);
      if (!ec) {
        std::ofstream(error_dir / "error.json") << text;
      }
    }
    return 1;
  }
  return 0;
}
