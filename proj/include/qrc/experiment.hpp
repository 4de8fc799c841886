#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrc/benchmarks.hpp"
#include "qrc/engine.hpp"

namespace qrc {

inline constexpr std::string_view kArtifactName = "qrc";
inline constexpr std::string_view kArtifactVersion = "0.1.0";

enum class Task { Narma2, Narma5, Narma10, Classify, EsnSweep, Stationarity };

std::string_view to_string(Task task);
// Throws Parse listing the valid names.
Task parse_task(std::string_view name);
std::vector<std::string> task_names();

// Defaults follow the reference protocol: washout 10 / train 70 / test 20,
// 8192 shots, a = 2 for the NARMA tasks and a = pi for classification,
// 10 trials. See docs/config.md for every key.
struct ExperimentConfig {
  Task task = Task::Narma2;
  ReservoirConfig reservoir;
  std::string noise_source = "preset:noiseless";  // "preset:<name>" or the resolved file path
  int trials = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  std::filesystem::path output_dir = "out";

  int washout = 10;
  int train = 70;
  int test = 20;
  InputSignalSpec signal;
  int narma_order = 2;  // target for esn-sweep and stationarity

  SensorSpec sensor;
  int class_washout = 40;
  int folds = 10;

  EsnSweepSpec esn;

  // Throws Range naming the field.
  void validate() const;
  NarmaSpec narma() const;
  SeriesSplit split() const;
};

// Sectioned key-value text. Relative noise_profile paths resolve against
// base_dir. Throws Parse naming the field for unknown keys or bad values.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical document with every field spelled out; parses back to the same config.
std::string format_config(const ExperimentConfig& config);

// Default scale for a task: pi for classification, 2 otherwise.
double default_scale(Task task);

struct RunResult {
  std::vector<std::filesystem::path> files;  // relative to config.output_dir
  std::string summary_json;
};

// Runs the configured task and writes its reports under config.output_dir.
// Output bytes depend only on the config (including seed), never on workers.
RunResult run_experiment(const ExperimentConfig& config);

// Reservoir input sequence for the configured task: the benchmark signal, or
// the first preprocessed sensor sample for classification.
std::vector<double> task_inputs(const ExperimentConfig& config);

// circuit_t0001.qasm ... plus manifest.json recording timestep, file, gate
// count and shot count. Returns paths relative to `dir`.
std::vector<std::filesystem::path> export_circuits(const ExperimentConfig& config,
                                                   std::span<const double> inputs,
                                                   const std::filesystem::path& dir);

// Stationarity of an existing numeric CSV (t column dropped, '#' lines
// skipped), using the config's split. Writes stationarity.{csv,txt} and
// summary.json into config.output_dir.
RunResult analyze_features(const ExperimentConfig& config, const std::filesystem::path& csv);

// Header names and values of a numeric CSV; '#' comment lines are skipped.
struct NumericTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
};
NumericTable parse_numeric_csv(std::string_view text);

// "1.8e-05": two significant digits, as quoted in summary tables.
std::string format_two_digits(double value);

// {"error": {"kind", "message", "field"}} for reporting failures.
std::string error_json(const std::exception& e);

}  // namespace qrc
