#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrc/engine.hpp"

namespace qrc {

// u(t) = amplitude * (sin(2 pi a t / T) sin(2 pi b t / T) sin(2 pi c t / T) + 1)
struct InputSignalSpec {
  double alpha_bar = 2.11;
  double beta_bar = 3.73;
  double gamma_bar = 4.11;
  double period = 100.0;
  double amplitude = 0.1;
  int length = 100;
  // Formula time of the first sample. The NARMA statistics quoted for this
  // signal are reproduced with the series starting at formula time 0.
  int first_t = 0;

  void validate() const;
};

double signal_value(const InputSignalSpec& spec, double t);
std::vector<double> gen_input(const InputSignalSpec& spec);

struct NarmaSpec {
  enum class Variant { Narma2, General };

  Variant variant = Variant::General;
  int order = 10;
  double alpha = 0.3;
  double beta = 0.05;
  double gamma = 1.5;
  double delta = 0.1;
  // initial_history[k] is y at 1-based time 1 - k (so [0] seeds y_1); missing
  // entries are zero.
  std::vector<double> initial_history;

  static NarmaSpec narma2();
  static NarmaSpec general(int order);
  // 2 selects the dedicated second-order recurrence.
  static NarmaSpec for_order(int order);

  std::string name() const;
  void validate() const;
};

// Targets aligned with `inputs`: y[0] is y_1 and y[t+1] follows from y[..t]
// and u[..t]. Throws Divergence once |y| exceeds 1e6.
std::vector<double> gen_narma(const NarmaSpec& spec, std::span<const double> inputs);

// u_t = u'_{t+1} - u'_t.
std::vector<double> preprocess_diff(std::span<const double> raw);

struct SensorSpec {
  int classes = 3;
  int samples_per_class = 20;
  int timesteps = 90;
  double noise = 0.0;  // std of additive Gaussian noise
  std::uint64_t seed = 0;

  void validate() const;
};

struct PulseShape {
  double onset;   // timestep where the pulse starts
  double rise;    // rise time constant
  double peak;    // amplitude scale
  double decay;   // decay time constant
};

// Synthetic pulse family. Classes 0 and 1 are deliberately close, class 2 is
// distinct; further classes continue a spread-out sequence. Class-mean
// waveforms differ pairwise by at least kSensorClassMargin in max-norm for
// the default 90 timesteps.
PulseShape sensor_pulse(int label);
double pulse_value(const PulseShape& shape, double t);
inline constexpr double kSensorClassMargin = 0.05;

struct LabeledSeriesDataset {
  std::vector<std::vector<double>> series;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const noexcept { return series.size(); }
  int timesteps() const { return series.empty() ? 0 : static_cast<int>(series.front().size()); }
  void validate() const;
};

LabeledSeriesDataset gen_synthetic_sensor(const SensorSpec& spec);
LabeledSeriesDataset preprocess_diff(const LabeledSeriesDataset& raw);

// --- echo state network ------------------------------------------------------

enum class InputAlphabet { ZeroOne, PlusMinusOne };

struct EsnConfig {
  int nodes = 2;
  double spectral_radius = 0.5;
  InputAlphabet input_alphabet = InputAlphabet::ZeroOne;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EsnModel {
  Eigen::MatrixXd w;     // N x N
  Eigen::VectorXd w_in;  // N
};

double spectral_radius(const Eigen::Ref<const Eigen::MatrixXd>& w);
// Scales w so that its spectral radius equals `target`.
Eigen::MatrixXd rescale_to_radius(const Eigen::Ref<const Eigen::MatrixXd>& w, double target);

// x_t = tanh(W^T x_{t-1} + W_in u_t).
Eigen::VectorXd esn_step(const Eigen::Ref<const Eigen::VectorXd>& x, double u,
                         const Eigen::Ref<const Eigen::MatrixXd>& w,
                         const Eigen::Ref<const Eigen::VectorXd>& w_in);

EsnModel build_esn(const EsnConfig& config);

// States x_1..x_M from x_0 = 0, one row per input.
Eigen::MatrixXd run_esn(const EsnModel& model, std::span<const double> inputs);

// Trains the pseudoinverse readout on split.train and returns the test NMSE.
double esn_nmse(const EsnModel& model, std::span<const double> inputs,
                std::span<const double> targets, const SeriesSplit& split);

// 0.01, 0.02, ..., 1.00 for (0.01, 1.0, 0.01). Grid points are computed as
// first + i * step, not accumulated.
std::vector<double> radius_grid(double first, double last, double step);

struct EsnSweepSpec {
  std::vector<int> node_counts{2, 5, 10, 20, 50};
  std::vector<double> radii = radius_grid(0.01, 1.0, 0.01);
  int trials = 100;
  InputAlphabet input_alphabet = InputAlphabet::ZeroOne;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
};

struct EsnNodeSweep {
  int nodes = 0;
  double global_average = 0.0;  // mean over every (radius, trial)
  double global_minimum = 0.0;  // min over radii of the trial-mean
  double best_radius = 0.0;
  Eigen::VectorXd radius_mean;
  Eigen::VectorXd radius_std;  // population std over trials
  Eigen::MatrixXd nmse;        // radii x trials
};

struct EsnSweepReport {
  std::vector<double> radii;
  int trials = 0;
  std::vector<EsnNodeSweep> nodes;
};

// Trial (N, radius index r, trial k) builds its ESN from
// derive_seed(seed, {N, r, k}), so results are independent of `workers`.
EsnSweepReport esn_sweep(const EsnSweepSpec& spec, std::span<const double> inputs,
                         std::span<const double> targets, const SeriesSplit& split);

std::string sweep_summary_csv(const EsnSweepReport& report);
std::string sweep_radius_csv(const EsnSweepReport& report);
std::string dataset_to_csv(const LabeledSeriesDataset& data, const SensorSpec& spec);
std::string narma_to_csv(std::span<const double> inputs, std::span<const double> targets,
                         const NarmaSpec& spec, const InputSignalSpec& signal);

}  // namespace qrc
