#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qrc/quantum.hpp"

namespace qrc {

using QubitPair = std::pair<int, int>;

// Partition of n = 2m qubits into the m two-qubit reservoir blocks.
class SubsystemLayout {
 public:
  // Throws InvalidLayout unless every qubit 0..n-1 appears in exactly one pair.
  SubsystemLayout(int num_qubits, std::vector<QubitPair> pairs);

  // Pairs (0,1), (2,3), ..., (n-2, n-1).
  static SubsystemLayout adjacent(int num_qubits);

  int num_qubits() const noexcept { return num_qubits_; }
  int num_pairs() const noexcept { return static_cast<int>(pairs_.size()); }
  const std::vector<QubitPair>& pairs() const noexcept { return pairs_; }

 private:
  int num_qubits_;
  std::vector<QubitPair> pairs_;
};

// One timestep of the input-driven unitary: for every pair (i, j) the gates
// RX_i(s), RX_j(s), CX_ij, RZ_j(s), CX_ij in application order, s = a * u.
struct CircuitLayer {
  std::vector<UnitaryGate> gates;
  double input_value = 0.0;
  double scale = 0.0;

  double angle() const noexcept { return scale * input_value; }
};

inline constexpr int kGatesPerBlock = 5;

// Throws InvalidArgument for a non-finite input.
CircuitLayer build_layer(double input, const SubsystemLayout& layout, double scale);

// Noiseless application of every gate in order. Throws Dimension when the
// layer addresses qubits beyond the state.
DensityMatrix apply_layer(DensityMatrix state, const CircuitLayer& layer);

// OpenQASM 2.0 program: H on every qubit, one layer per input, then a
// computational-basis measurement of every qubit into c[q].
std::string export_qasm(std::span<const double> inputs, const SubsystemLayout& layout,
                        double scale);

// 17 significant digits; reparses to the identical double.
std::string format_angle(double value);

}  // namespace qrc
