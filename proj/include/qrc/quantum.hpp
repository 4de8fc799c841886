#pragma once

// Dense density-matrix simulation primitives.
//
// Basis convention: qubit q is bit q of the computational-basis index
// (little-endian, as in Qiskit). A k-qubit operator acting on `targets`
// uses a local index whose most significant bit belongs to targets[0], so
// cx(c, t) has the textbook matrix in the |c t> basis.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qrc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 14;

class UnitaryGate;
class KrausChannel;

class DensityMatrix {
 public:
  // Validates dimension, finiteness, unit trace and Hermiticity (1e-10).
  // Positivity is only checked by validate().
  DensityMatrix(int num_qubits, ComplexMatrix matrix);

  static DensityMatrix plus_state(int num_qubits);
  static DensityMatrix maximally_mixed(int num_qubits);
  static DensityMatrix basis_state(int num_qubits, std::uint64_t index);
  static DensityMatrix from_state_vector(const Eigen::VectorXcd& psi);

  int num_qubits() const noexcept { return num_qubits_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Complex operator()(Eigen::Index row, Eigen::Index col) const { return matrix_(row, col); }

  Complex trace() const { return matrix_.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;

  // Full validation including positivity. Throws CorruptedState.
  void validate(double psd_tolerance = 1e-9) const;

 private:
  struct Unchecked {};
  DensityMatrix(Unchecked, int num_qubits, ComplexMatrix matrix)
      : num_qubits_(num_qubits), matrix_(std::move(matrix)) {}

  ComplexMatrix& mutable_matrix() noexcept { return matrix_; }

  friend DensityMatrix apply_unitary(DensityMatrix state, const UnitaryGate& gate);
  friend DensityMatrix apply_channel(DensityMatrix state, const KrausChannel& channel,
                                     bool hermitize);
  friend DensityMatrix hermitize(DensityMatrix state);

  int num_qubits_;
  ComplexMatrix matrix_;
};

class UnitaryGate {
 public:
  // Throws InvalidArgument if the targets repeat, have the wrong count for
  // the matrix size, or the matrix is not unitary to 1e-12.
  UnitaryGate(std::vector<int> targets, ComplexMatrix matrix, std::string name = "u",
              std::optional<double> angle = std::nullopt);

  const std::vector<int>& targets() const noexcept { return targets_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const std::string& name() const noexcept { return name_; }
  std::optional<double> angle() const noexcept { return angle_; }
  int arity() const noexcept { return static_cast<int>(targets_.size()); }

 private:
  std::vector<int> targets_;
  ComplexMatrix matrix_;
  std::string name_;
  std::optional<double> angle_;
};

class KrausChannel {
 public:
  // Throws InvalidChannel when sum_k K_k^dag K_k deviates from I by more
  // than `tolerance`, or the operator list is empty.
  KrausChannel(std::vector<int> targets, std::vector<ComplexMatrix> operators,
               double tolerance = 1e-12);

  const std::vector<int>& targets() const noexcept { return targets_; }
  const std::vector<ComplexMatrix>& operators() const noexcept { return operators_; }
  // Max-norm of sum_k K_k^dag K_k - I.
  double completeness_error() const;
  // Row-major vectorised action on a 2^k x 2^k block: vec(B') = S vec(B).
  const ComplexMatrix& superoperator() const noexcept { return superop_; }

  // Nonzero superoperator entries; depolarizing and damping maps are sparse.
  struct Entry {
    int row;
    int col;
    Complex value;
  };
  const std::vector<Entry>& sparse_superoperator() const noexcept { return sparse_; }

 private:
  std::vector<int> targets_;
  std::vector<ComplexMatrix> operators_;
  ComplexMatrix superop_;
  std::vector<Entry> sparse_;
};

namespace gates {
UnitaryGate identity(int qubit);
UnitaryGate hadamard(int qubit);
UnitaryGate pauli_x(int qubit);
UnitaryGate rx(int qubit, double angle);
UnitaryGate ry(int qubit, double angle);
UnitaryGate rz(int qubit, double angle);
UnitaryGate cx(int control, int target);
}  // namespace gates

// Single-qubit Pauli matrices in I, X, Y, Z order.
const ComplexMatrix& pauli(int index);

// Initial reservoir state |+><+|^n. Throws Capacity outside 1..kMaxQubits.
DensityMatrix plus_state(int num_qubits);

// U rho U^dag, contracting only the targeted axes. Throws Index for targets >= n.
DensityMatrix apply_unitary(DensityMatrix state, const UnitaryGate& gate);

// sum_k K_k rho K_k^dag, re-Hermitised unless `hermitize` is false (callers
// applying a batch of channels hermitize once at the end).
DensityMatrix apply_channel(DensityMatrix state, const KrausChannel& channel,
                            bool hermitize = true);

// (rho + rho^dag) / 2 with a real diagonal; removes rounding drift.
DensityMatrix hermitize(DensityMatrix state);

// [Tr(Z_0 rho), ..., Tr(Z_{n-1} rho)] from the diagonal only.
std::vector<double> pauli_z_expectations(const DensityMatrix& state);

// Computational-basis probabilities Re(diag(rho)).
std::vector<double> diagonal_probabilities(const DensityMatrix& state);

// Half the trace norm of a - b. Throws Dimension on size mismatch.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qrc
