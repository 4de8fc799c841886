#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrc/circuit.hpp"
#include "qrc/noise.hpp"
#include "qrc/quantum.hpp"
#include "qrc/rng.hpp"

namespace qrc {

struct ReservoirConfig {
  SubsystemLayout layout = SubsystemLayout::adjacent(2);
  double scale = 2.0;
  DeviceNoiseProfile profile;
  std::optional<int> shots;  // nullopt: exact expectations
  std::uint64_t seed = 0;

  void validate() const;
};

// Row t-1 holds h(rho_t) = [<Z_0>, ..., <Z_{n-1}>] after input u_t. The bias
// column is implicit and appended by the readout.
struct FeatureSeries {
  Eigen::MatrixXd values;

  Eigen::Index timesteps() const noexcept { return values.rows(); }
  Eigen::Index width() const noexcept { return values.cols(); }
};

// One noisy timestep: the input layer interleaved with the device map.
DensityMatrix reservoir_step(DensityMatrix state, double input, const ReservoirConfig& config);

// Exact trajectory: <Z_i> and the computational-basis distribution after
// every step. The density-matrix evolution does not depend on the shot seed,
// so repeated sampled trials can share one Trajectory.
struct Trajectory {
  FeatureSeries exact;
  std::vector<std::vector<double>> diagonals;
  int num_qubits = 0;
};

Trajectory simulate_trajectory(std::span<const double> inputs, const ReservoirConfig& config,
                               const std::optional<DensityMatrix>& initial = std::nullopt);

// Finite-shot features from a trajectory; step t uses make_rng(seed, {t}).
FeatureSeries sample_features(const Trajectory& trajectory, int shots, const ReadoutFlip& flip,
                              std::uint64_t seed);

// Full trajectory from |+><+|^n (or `initial`). Sampled mode draws
// config.shots bitstrings per timestep from the exact rho_t, with the
// generator for step t seeded from (config.seed, t).
FeatureSeries run_reservoir(std::span<const double> inputs, const ReservoirConfig& config,
                            const std::optional<DensityMatrix>& initial = std::nullopt);

// Bitstrings packed little-endian (bit q = qubit q). Throws CorruptedState if
// the diagonal has mass off by more than 1e-6 or entries below -1e-9.
std::vector<std::uint64_t> sample_bitstrings(const DensityMatrix& state, int shots,
                                             const ReadoutFlip& flip, Rng& rng);
std::vector<std::uint64_t> sample_bitstrings(std::span<const double> probabilities,
                                             int num_qubits, int shots, const ReadoutFlip& flip,
                                             Rng& rng);

// Per-qubit mean of (+1 for bit 0, -1 for bit 1).
std::vector<double> z_means(std::span<const std::uint64_t> bitstrings, int num_qubits);

// 0-based half-open row range.
struct Window {
  Eigen::Index first = 0;
  Eigen::Index count = 0;

  Eigen::Index end() const noexcept { return first + count; }
  // 1-based first/last timestep, as used when quoting windows.
  Eigen::Index first_t() const noexcept { return first + 1; }
  Eigen::Index last_t() const noexcept { return first + count; }
};

struct SeriesSplit {
  Window train;
  Window test;
};

// Washout rows are skipped, then `train` rows, then `test` rows. Throws
// Range when the windows overrun `timesteps`.
SeriesSplit split_series(Eigen::Index timesteps, Eigen::Index washout, Eigen::Index train,
                         Eigen::Index test);

inline auto rows(const Eigen::MatrixXd& m, const Window& w) { return m.middleRows(w.first, w.count); }

// CSV with header "t,z0,z1,..." and t starting at 1.
std::string features_to_csv(const FeatureSeries& features);

}  // namespace qrc
