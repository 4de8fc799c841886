#include "qrc/circuit.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "qrc/error.hpp"

namespace qrc {

SubsystemLayout::SubsystemLayout(int num_qubits, std::vector<QubitPair> pairs)
    : num_qubits_(num_qubits), pairs_(std::move(pairs)) {
  if (num_qubits < 2 || num_qubits % 2 != 0) {
    throw Error(ErrorKind::InvalidLayout, "layout needs an even, positive qubit count");
  }
  if (static_cast<int>(pairs_.size()) * 2 != num_qubits) {
    throw Error(ErrorKind::InvalidLayout, "layout must hold n/2 pairs");
  }
  std::vector<bool> seen(static_cast<std::size_t>(num_qubits), false);
  for (const auto& [i, j] : pairs_) {
    for (int q : {i, j}) {
      if (q < 0 || q >= num_qubits) {
        throw Error(ErrorKind::InvalidLayout, "pair index " + std::to_string(q) + " out of range");
      }
      if (seen[static_cast<std::size_t>(q)]) {
        throw Error(ErrorKind::InvalidLayout, "qubit " + std::to_string(q) + " used twice");
      }
      seen[static_cast<std::size_t>(q)] = true;
    }
  }
}

SubsystemLayout SubsystemLayout::adjacent(int num_qubits) {
  std::vector<QubitPair> pairs;
  for (int q = 0; q + 1 < num_qubits; q += 2) pairs.emplace_back(q, q + 1);
  return SubsystemLayout(num_qubits, std::move(pairs));
}

CircuitLayer build_layer(double input, const SubsystemLayout& layout, double scale) {
  if (!std::isfinite(input) || !std::isfinite(scale)) {
    throw Error(ErrorKind::InvalidArgument, "layer input and scale must be finite");
  }
  CircuitLayer layer;
  layer.input_value = input;
  layer.scale = scale;
  const double s = scale * input;
  layer.gates.reserve(static_cast<std::size_t>(layout.num_pairs() * kGatesPerBlock));
  // The block is written CX RZ_j CX RX_i RX_j as an operator product, so the
  // rightmost factor runs first.
  for (const auto& [i, j] : layout.pairs()) {
    layer.gates.push_back(gates::rx(i, s));
    layer.gates.push_back(gates::rx(j, s));
    layer.gates.push_back(gates::cx(i, j));
    layer.gates.push_back(gates::rz(j, s));
    layer.gates.push_back(gates::cx(i, j));
  }
  return layer;
}

DensityMatrix apply_layer(DensityMatrix state, const CircuitLayer& layer) {
  for (const auto& gate : layer.gates) {
    for (int q : gate.targets()) {
      if (q >= state.num_qubits()) {
        throw Error(ErrorKind::Dimension, "layer addresses qubit " + std::to_string(q) +
                                              " on a " + std::to_string(state.num_qubits()) +
                                              "-qubit state");
      }
    }
    state = apply_unitary(std::move(state), gate);
  }
  return state;
}

std::string format_angle(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string export_qasm(std::span<const double> inputs, const SubsystemLayout& layout,
                        double scale) {
  if (inputs.empty()) {
    throw Error(ErrorKind::InvalidArgument, "export_qasm needs at least one input");
  }
  const int n = layout.num_qubits();
  std::ostringstream out;
  out << "OPENQASM 2.0;\n"
      << "include \"qelib1.inc\";\n"
      << "qreg q[" << n << "];\n"
      << "creg c[" << n << "];\n";
  for (int q = 0; q < n; ++q) out << "h q[" << q << "];\n";
  for (double u : inputs) {
    const CircuitLayer layer = build_layer(u, layout, scale);
    for (const auto& gate : layer.gates) {
      out << gate.name();
      if (gate.angle()) out << '(' << format_angle(*gate.angle()) << ')';
      out << ' ';
      for (std::size_t k = 0; k < gate.targets().size(); ++k) {
        if (k > 0) out << ',';
        out << "q[" << gate.targets()[k] << ']';
      }
      out << ";\n";
    }
  }
  for (int q = 0; q < n; ++q) out << "measure q[" << q << "] -> c[" << q << "];\n";
  return out.str();
}

}  // namespace qrc
