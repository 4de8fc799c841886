#include "qrc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qrc/error.hpp"

namespace qrc {

namespace {

constexpr double kClipTolerance = 1e-9;
constexpr double kMassTolerance = 1e-6;

std::vector<double> checked_distribution(std::span<const double> probabilities) {
  std::vector<double> p(probabilities.begin(), probabilities.end());
  double mass = 0.0;
  for (double& v : p) {
    if (!std::isfinite(v) || v < -kClipTolerance) {
      throw Error(ErrorKind::CorruptedState, "basis probability below -1e-9");
    }
    v = std::max(v, 0.0);
    mass += v;
  }
  if (std::abs(mass - 1.0) > kMassTolerance) {
    throw Error(ErrorKind::CorruptedState, "diagonal mass deviates from 1 by more than 1e-6");
  }
  for (double& v : p) v /= mass;
  return p;
}

}  // namespace

void ReservoirConfig::validate() const {
  if (!std::isfinite(scale)) throw Error(ErrorKind::InvalidArgument, "scale must be finite", "scale");
  if (shots && *shots < 1) throw Error(ErrorKind::Range, "shots must be at least 1", "shots");
  profile.validate();
  if (profile.topology.num_qubits != 0 && profile.topology.num_qubits != layout.num_qubits()) {
    throw Error(ErrorKind::Topology, "noise profile topology does not match the layout size",
                "num_qubits");
  }
}

DensityMatrix reservoir_step(DensityMatrix state, double input, const ReservoirConfig& config) {
  return apply_device_noise(std::move(state), config.profile,
                            build_layer(input, config.layout, config.scale));
}

Trajectory simulate_trajectory(std::span<const double> inputs, const ReservoirConfig& config,
                               const std::optional<DensityMatrix>& initial) {
  if (inputs.empty()) throw Error(ErrorKind::InvalidArgument, "reservoir needs at least one input");
  config.validate();
  const int n = config.layout.num_qubits();
  if (n > kMaxQubits) throw Error(ErrorKind::Capacity, "register too large");
  for (double u : inputs) {
    if (!std::isfinite(u)) throw Error(ErrorKind::InvalidArgument, "non-finite input");
  }

  DensityMatrix state = initial ? *initial : plus_state(n);
  if (state.num_qubits() != n) {
    throw Error(ErrorKind::Dimension, "initial state does not match the layout");
  }

  const auto steps = static_cast<Eigen::Index>(inputs.size());
  Trajectory out;
  out.num_qubits = n;
  out.exact.values.resize(steps, n);
  out.diagonals.reserve(inputs.size());
  for (Eigen::Index t = 0; t < steps; ++t) {
    state = reservoir_step(std::move(state), inputs[static_cast<std::size_t>(t)], config);
    out.diagonals.push_back(diagonal_probabilities(state));
    const auto z = pauli_z_expectations(state);
    for (int q = 0; q < n; ++q) out.exact.values(t, q) = z[static_cast<std::size_t>(q)];
  }
  return out;
}

// Measurement never feeds back into the trajectory, so each step samples
// from its own substream after the exact pass.
FeatureSeries sample_features(const Trajectory& trajectory, int shots, const ReadoutFlip& flip,
                              std::uint64_t seed) {
  const int n = trajectory.num_qubits;
  const auto steps = static_cast<Eigen::Index>(trajectory.diagonals.size());
  FeatureSeries out{Eigen::MatrixXd(steps, n)};
  for (Eigen::Index t = 0; t < steps; ++t) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(t)});
    const auto bits = sample_bitstrings(trajectory.diagonals[static_cast<std::size_t>(t)], n, shots, flip, rng);
    const auto z = z_means(bits, n);
    for (int q = 0; q < n; ++q) out.values(t, q) = z[static_cast<std::size_t>(q)];
  }
  return out;
}

FeatureSeries run_reservoir(std::span<const double> inputs, const ReservoirConfig& config,
                            const std::optional<DensityMatrix>& initial) {
  Trajectory traj = simulate_trajectory(inputs, config, initial);
  if (!config.shots) return std::move(traj.exact);
  return sample_features(traj, *config.shots, config.profile.readout, config.seed);
}

std::vector<std::uint64_t> sample_bitstrings(std::span<const double> probabilities,
                                             int num_qubits, int shots, const ReadoutFlip& flip,
                                             Rng& rng) {
  if (shots < 1) throw Error(ErrorKind::Range, "shots must be at least 1", "shots");
  if (probabilities.size() != (std::size_t{1} << num_qubits)) {
    throw Error(ErrorKind::Dimension, "probability vector does not match qubit count");
  }
  const auto p = checked_distribution(probabilities);
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  cdf.back() = 1.0;

  std::vector<std::uint64_t> out(static_cast<std::size_t>(shots));
  const bool noisy_readout = flip.p01 > 0.0 || flip.p10 > 0.0;
  for (auto& bits : out) {
    const double r = uniform01(rng);
    bits = static_cast<std::uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    bits = std::min<std::uint64_t>(bits, p.size() - 1);
    if (noisy_readout) {
      for (int q = 0; q < num_qubits; ++q) {
        const std::uint64_t mask = std::uint64_t{1} << q;
        const double flip_p = (bits & mask) ? flip.p10 : flip.p01;
        if (uniform01(rng) < flip_p) bits ^= mask;
      }
    }
  }
  return out;
}

std::vector<std::uint64_t> sample_bitstrings(const DensityMatrix& state, int shots,
                                             const ReadoutFlip& flip, Rng& rng) {
  const auto p = diagonal_probabilities(state);
  return sample_bitstrings(p, state.num_qubits(), shots, flip, rng);
}

std::vector<double> z_means(std::span<const std::uint64_t> bitstrings, int num_qubits) {
  std::vector<double> z(static_cast<std::size_t>(num_qubits), 0.0);
  if (bitstrings.empty()) return z;
  std::vector<std::size_t> ones(static_cast<std::size_t>(num_qubits), 0);
  for (auto bits : bitstrings) {
    for (int q = 0; q < num_qubits; ++q) ones[static_cast<std::size_t>(q)] += (bits >> q) & 1U;
  }
  const double s = static_cast<double>(bitstrings.size());
  for (int q = 0; q < num_qubits; ++q) {
    z[static_cast<std::size_t>(q)] = (s - 2.0 * static_cast<double>(ones[static_cast<std::size_t>(q)])) / s;
  }
  return z;
}

SeriesSplit split_series(Eigen::Index timesteps, Eigen::Index washout, Eigen::Index train,
                         Eigen::Index test) {
  if (washout < 0 || train < 0 || test < 0) {
    throw Error(ErrorKind::Range, "split sizes must be non-negative");
  }
  if (washout + train + test > timesteps) {
    throw Error(ErrorKind::Range, "washout + train + test = " +
                                      std::to_string(washout + train + test) + " exceeds " +
                                      std::to_string(timesteps) + " timesteps");
  }
  return {Window{washout, train}, Window{washout + train, test}};
}

std::string features_to_csv(const FeatureSeries& features) {
  std::ostringstream out;
  out.precision(17);
  out << 't';
  for (Eigen::Index q = 0; q < features.width(); ++q) out << ",z" << q;
  out << '\n';
  for (Eigen::Index t = 0; t < features.timesteps(); ++t) {
    out << (t + 1);
    for (Eigen::Index q = 0; q < features.width(); ++q) out << ',' << features.values(t, q);
    out << '\n';
  }
  return out.str();
}

}  // namespace qrc
