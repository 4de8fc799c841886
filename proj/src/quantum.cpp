#include "qrc/quantum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qrc/error.hpp"

namespace qrc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Index: return "index";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::InvalidChannel: return "invalid-channel";
    case ErrorKind::InvalidLayout: return "invalid-layout";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Range: return "range";
    case ErrorKind::Topology: return "invalid-topology";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::CorruptedState: return "corrupted-state";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::UndefinedNormalization: return "undefined-normalization";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

constexpr double kStateTolerance = 1e-10;

void check_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw Error(ErrorKind::Capacity, "qubit count " + std::to_string(n) + " outside 1.." +
                                         std::to_string(kMaxQubits));
  }
}

double hermiticity_error_of(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void rehermitize(ComplexMatrix& m) {
  const Eigen::Index d = m.rows();
  for (Eigen::Index c = 0; c < d; ++c) {
    m(c, c) = Complex(m(c, c).real(), 0.0);
    for (Eigen::Index r = c + 1; r < d; ++r) {
      const Complex avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
      m(r, c) = avg;
      m(c, r) = std::conj(avg);
    }
  }
}

// Index arithmetic for operators acting on a subset of qubits. A block is the
// set of basis indices that agree on every non-target bit; `offsets[l]` is the
// displacement of local index l from the block base.
class TargetIndexer {
 public:
  TargetIndexer(std::span<const int> targets, int num_qubits) {
    const int k = static_cast<int>(targets.size());
    for (int t : targets) {
      if (t < 0 || t >= num_qubits) {
        throw Error(ErrorKind::Index, "target qubit " + std::to_string(t) +
                                          " out of range for " + std::to_string(num_qubits) +
                                          " qubits");
      }
    }
    local_dim_ = std::size_t{1} << k;
    offsets_.resize(local_dim_);
    for (std::size_t l = 0; l < local_dim_; ++l) {
      std::size_t off = 0;
      for (int j = 0; j < k; ++j) {
        if ((l >> (k - 1 - j)) & 1U) off |= std::size_t{1} << targets[j];
      }
      offsets_[l] = off;
    }
    sorted_.assign(targets.begin(), targets.end());
    std::sort(sorted_.begin(), sorted_.end());
    num_blocks_ = (std::size_t{1} << num_qubits) >> k;
  }

  std::size_t local_dim() const { return local_dim_; }
  std::size_t num_blocks() const { return num_blocks_; }
  std::size_t offset(std::size_t local) const { return offsets_[local]; }

  // Spreads the bits of `g` over the non-target positions.
  std::size_t block_base(std::size_t g) const {
    for (int t : sorted_) {
      const std::size_t low = g & ((std::size_t{1} << t) - 1);
      g = ((g >> t) << (t + 1)) | low;
    }
    return g;
  }

 private:
  std::size_t local_dim_ = 0;
  std::size_t num_blocks_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<int> sorted_;
};

}  // namespace

DensityMatrix::DensityMatrix(int num_qubits, ComplexMatrix matrix)
    : num_qubits_(num_qubits), matrix_(std::move(matrix)) {
  check_qubit_count(num_qubits);
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw Error(ErrorKind::Dimension, "density matrix must be " + std::to_string(d) + "x" +
                                          std::to_string(d));
  }
  if (!matrix_.allFinite()) {
    throw Error(ErrorKind::CorruptedState, "density matrix has non-finite entries");
  }
  if (std::abs(matrix_.trace() - Complex(1.0)) > kStateTolerance) {
    throw Error(ErrorKind::CorruptedState, "density matrix trace is not 1");
  }
  if (hermiticity_error_of(matrix_) > kStateTolerance) {
    throw Error(ErrorKind::CorruptedState, "density matrix is not Hermitian");
  }
}

DensityMatrix DensityMatrix::plus_state(int num_qubits) {
  check_qubit_count(num_qubits);
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  return DensityMatrix(Unchecked{}, num_qubits,
                       ComplexMatrix::Constant(d, d, Complex(1.0 / static_cast<double>(d))));
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  check_qubit_count(num_qubits);
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  ComplexMatrix m = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return DensityMatrix(Unchecked{}, num_qubits, std::move(m));
}

DensityMatrix DensityMatrix::basis_state(int num_qubits, std::uint64_t index) {
  check_qubit_count(num_qubits);
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  if (index >= static_cast<std::uint64_t>(d)) {
    throw Error(ErrorKind::Index, "basis index out of range");
  }
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityMatrix(Unchecked{}, num_qubits, std::move(m));
}

DensityMatrix DensityMatrix::from_state_vector(const Eigen::VectorXcd& psi) {
  const Eigen::Index d = psi.size();
  int n = 0;
  while ((Eigen::Index{1} << n) < d) ++n;
  if ((Eigen::Index{1} << n) != d) {
    throw Error(ErrorKind::Dimension, "state vector length is not a power of two");
  }
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero state vector");
  const Eigen::VectorXcd unit = psi / norm;
  return DensityMatrix(n, unit * unit.adjoint());
}

double DensityMatrix::hermiticity_error() const { return hermiticity_error_of(matrix_); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double psd_tolerance) const {
  if (!matrix_.allFinite()) throw Error(ErrorKind::CorruptedState, "non-finite entries");
  if (std::abs(trace() - Complex(1.0)) > kStateTolerance) {
    throw Error(ErrorKind::CorruptedState, "trace deviates from 1");
  }
  if (hermiticity_error() > kStateTolerance) {
    throw Error(ErrorKind::CorruptedState, "not Hermitian");
  }
  if (min_eigenvalue() < -psd_tolerance) {
    throw Error(ErrorKind::CorruptedState, "not positive semidefinite");
  }
}

UnitaryGate::UnitaryGate(std::vector<int> targets, ComplexMatrix matrix, std::string name,
                         std::optional<double> angle)
    : targets_(std::move(targets)),
      matrix_(std::move(matrix)),
      name_(std::move(name)),
      angle_(angle) {
  if (targets_.empty() || targets_.size() > 2) {
    throw Error(ErrorKind::InvalidArgument, "gates act on one or two qubits");
  }
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    if (targets_[i] < 0) throw Error(ErrorKind::Index, "negative target qubit");
    for (std::size_t j = i + 1; j < targets_.size(); ++j) {
      if (targets_[i] == targets_[j]) {
        throw Error(ErrorKind::InvalidArgument, "gate targets must be distinct");
      }
    }
  }
  const Eigen::Index dim = Eigen::Index{1} << targets_.size();
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw Error(ErrorKind::Dimension, "gate matrix size does not match its targets");
  }
  if (!matrix_.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite gate matrix");
  const double err =
      (matrix_.adjoint() * matrix_ - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (err > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "gate '" + name_ + "' is not unitary");
  }
}

KrausChannel::KrausChannel(std::vector<int> targets, std::vector<ComplexMatrix> operators,
                           double tolerance)
    : targets_(std::move(targets)), operators_(std::move(operators)) {
  if (operators_.empty()) throw Error(ErrorKind::InvalidChannel, "channel has no operators");
  if (targets_.empty() || targets_.size() > 2) {
    throw Error(ErrorKind::InvalidChannel, "channels act on one or two qubits");
  }
  if (targets_.size() == 2 && targets_[0] == targets_[1]) {
    throw Error(ErrorKind::InvalidChannel, "channel targets must be distinct");
  }
  const Eigen::Index dim = Eigen::Index{1} << targets_.size();
  for (const auto& k : operators_) {
    if (k.rows() != dim || k.cols() != dim) {
      throw Error(ErrorKind::InvalidChannel, "Kraus operator size does not match targets");
    }
  }
  if (completeness_error() > tolerance) {
    throw Error(ErrorKind::InvalidChannel, "Kraus operators are not trace preserving");
  }
  // B' = sum_k K B K^dag, so B'(a,b) = sum_{a',b'} [sum_k K(a,a') conj(K(b,b'))] B(a',b').
  superop_ = ComplexMatrix::Zero(dim * dim, dim * dim);
  for (const auto& k : operators_) {
    for (Eigen::Index a = 0; a < dim; ++a)
      for (Eigen::Index b = 0; b < dim; ++b)
        for (Eigen::Index ap = 0; ap < dim; ++ap)
          for (Eigen::Index bp = 0; bp < dim; ++bp)
            superop_(a * dim + b, ap * dim + bp) += k(a, ap) * std::conj(k(b, bp));
  }
  const double floor = 1e-15 * superop_.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < superop_.rows(); ++i) {
    for (Eigen::Index j = 0; j < superop_.cols(); ++j) {
      if (std::abs(superop_(i, j)) > floor) {
        sparse_.push_back({static_cast<int>(i), static_cast<int>(j), superop_(i, j)});
      }
    }
  }
}

double KrausChannel::completeness_error() const {
  const Eigen::Index dim = operators_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& k : operators_) sum += k.adjoint() * k;
  return (sum - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

const ComplexMatrix& pauli(int index) {
  static const std::array<ComplexMatrix, 4> paulis = [] {
    std::array<ComplexMatrix, 4> p;
    const Complex i(0.0, 1.0);
    p[0] = ComplexMatrix::Identity(2, 2);
    p[1] = ComplexMatrix(2, 2);
    p[1] << 0.0, 1.0, 1.0, 0.0;
    p[2] = ComplexMatrix(2, 2);
    p[2] << 0.0, -i, i, 0.0;
    p[3] = ComplexMatrix(2, 2);
    p[3] << 1.0, 0.0, 0.0, -1.0;
    return p;
  }();
  return paulis.at(static_cast<std::size_t>(index));
}

namespace gates {

UnitaryGate identity(int qubit) { return {{qubit}, ComplexMatrix::Identity(2, 2), "id"}; }

UnitaryGate hadamard(int qubit) {
  ComplexMatrix h(2, 2);
  const double s = std::numbers::sqrt2 / 2.0;
  h << s, s, s, -s;
  return {{qubit}, h, "h"};
}

UnitaryGate pauli_x(int qubit) { return {{qubit}, pauli(1), "x"}; }

UnitaryGate rx(int qubit, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  ComplexMatrix m(2, 2);
  m << Complex(c, 0.0), Complex(0.0, -s), Complex(0.0, -s), Complex(c, 0.0);
  return {{qubit}, m, "rx", angle};
}

UnitaryGate ry(int qubit, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  ComplexMatrix m(2, 2);
  m << c, -s, s, c;
  return {{qubit}, m, "ry", angle};
}

UnitaryGate rz(int qubit, double angle) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, -angle / 2.0);
  m(1, 1) = std::polar(1.0, angle / 2.0);
  return {{qubit}, m, "rz", angle};
}

UnitaryGate cx(int control, int target) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return {{control, target}, m, "cx"};
}

}  // namespace gates

DensityMatrix plus_state(int num_qubits) { return DensityMatrix::plus_state(num_qubits); }

namespace {

std::vector<std::size_t> block_bases(const TargetIndexer& idx) {
  std::vector<std::size_t> bases(idx.num_blocks());
  for (std::size_t g = 0; g < bases.size(); ++g) bases[g] = idx.block_base(g);
  return bases;
}

template <std::size_t K>
void unitary_kernel(Complex* data, std::size_t d, const TargetIndexer& idx, const ComplexMatrix& um) {
  std::array<std::array<Complex, K>, K> u{};
  std::array<std::array<Complex, K>, K> uc{};
  std::array<std::size_t, K> off{};
  for (std::size_t a = 0; a < K; ++a) {
    off[a] = idx.offset(a);
    for (std::size_t l = 0; l < K; ++l) {
      u[a][l] = um(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(l));
      uc[a][l] = std::conj(u[a][l]);
    }
  }
  const auto bases = block_bases(idx);
  std::array<Complex, K> in{};

  // rho <- U rho: mix rows within each block, column by column.
  for (std::size_t c = 0; c < d; ++c) {
    Complex* col = data + c * d;
    for (std::size_t base : bases) {
      for (std::size_t l = 0; l < K; ++l) in[l] = col[base + off[l]];
      for (std::size_t a = 0; a < K; ++a) {
        Complex acc = u[a][0] * in[0];
        for (std::size_t l = 1; l < K; ++l) acc += u[a][l] * in[l];
        col[base + off[a]] = acc;
      }
    }
  }

  // rho <- rho U^dag: (rho U^dag)(r, b) = sum_l rho(r, l) conj(U(b, l)).
  std::array<Complex*, K> cols{};
  for (std::size_t base : bases) {
    for (std::size_t l = 0; l < K; ++l) cols[l] = data + (base + off[l]) * d;
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t l = 0; l < K; ++l) in[l] = cols[l][r];
      for (std::size_t b = 0; b < K; ++b) {
        Complex acc = uc[b][0] * in[0];
        for (std::size_t l = 1; l < K; ++l) acc += uc[b][l] * in[l];
        cols[b][r] = acc;
      }
    }
  }
}

// Diagonal gates reduce to rho(r, c) *= u_r conj(u_c).
void diagonal_kernel(Complex* data, std::size_t d, const TargetIndexer& idx, const ComplexMatrix& um) {
  // offset(l) holds exactly the target bits set in local index l.
  const std::size_t mask = idx.offset(idx.local_dim() - 1);
  std::vector<Complex> phase(d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t l = 0; l < idx.local_dim(); ++l) {
      if (idx.offset(l) == (r & mask)) {
        phase[r] = um(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l));
        break;
      }
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    const Complex pc = std::conj(phase[c]);
    Complex* col = data + c * d;
    for (std::size_t r = 0; r < d; ++r) col[r] *= phase[r] * pc;
  }
}

template <std::size_t K>
void channel_kernel(Complex* data, std::size_t d, const TargetIndexer& idx,
                    const std::vector<KrausChannel::Entry>& entries) {
  constexpr std::size_t KK = K * K;
  std::array<std::size_t, K> off{};
  for (std::size_t a = 0; a < K; ++a) off[a] = idx.offset(a);
  const auto bases = block_bases(idx);
  std::array<Complex, KK> in{};
  std::array<Complex, KK> out{};
  std::array<std::size_t, KK> pos{};
  for (std::size_t cbase : bases) {
    for (std::size_t rbase : bases) {
      for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = 0; b < K; ++b) {
          pos[a * K + b] = (rbase + off[a]) + (cbase + off[b]) * d;
          in[a * K + b] = data[pos[a * K + b]];
        }
      }
      out.fill(Complex(0.0, 0.0));
      for (const auto& e : entries) {
        out[static_cast<std::size_t>(e.row)] += e.value * in[static_cast<std::size_t>(e.col)];
      }
      for (std::size_t i = 0; i < KK; ++i) data[pos[i]] = out[i];
    }
  }
}

bool is_diagonal(const ComplexMatrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r != c && m(r, c) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

DensityMatrix apply_unitary(DensityMatrix state, const UnitaryGate& gate) {
  const TargetIndexer idx(gate.targets(), state.num_qubits());
  const std::size_t d = static_cast<std::size_t>(state.dim());
  Complex* data = state.mutable_matrix().data();  // column-major: (r, c) -> r + c * d
  if (is_diagonal(gate.matrix())) {
    diagonal_kernel(data, d, idx, gate.matrix());
  } else if (idx.local_dim() == 2) {
    unitary_kernel<2>(data, d, idx, gate.matrix());
  } else {
    unitary_kernel<4>(data, d, idx, gate.matrix());
  }
  return state;
}

DensityMatrix apply_channel(DensityMatrix state, const KrausChannel& channel, bool hermitize) {
  const TargetIndexer idx(channel.targets(), state.num_qubits());
  const std::size_t d = static_cast<std::size_t>(state.dim());
  Complex* data = state.mutable_matrix().data();
  if (idx.local_dim() == 2) {
    channel_kernel<2>(data, d, idx, channel.sparse_superoperator());
  } else {
    channel_kernel<4>(data, d, idx, channel.sparse_superoperator());
  }
  if (hermitize) rehermitize(state.mutable_matrix());
  return state;
}

DensityMatrix hermitize(DensityMatrix state) {
  rehermitize(state.mutable_matrix());
  return state;
}

std::vector<double> diagonal_probabilities(const DensityMatrix& state) {
  std::vector<double> p(static_cast<std::size_t>(state.dim()));
  for (Eigen::Index i = 0; i < state.dim(); ++i) p[static_cast<std::size_t>(i)] = state(i, i).real();
  return p;
}

std::vector<double> pauli_z_expectations(const DensityMatrix& state) {
  const int n = state.num_qubits();
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    const double p = state(i, i).real();
    for (int q = 0; q < n; ++q) {
      z[static_cast<std::size_t>(q)] += ((static_cast<std::uint64_t>(i) >> q) & 1U) ? -p : p;
    }
  }
  return z;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::Dimension, "trace distance between states of different dimension");
  }
  const ComplexMatrix diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(diff, Eigen::EigenvaluesOnly);
  const double dist = 0.5 * solver.eigenvalues().cwiseAbs().sum();
  return std::clamp(dist, 0.0, 1.0);
}

}  // namespace qrc
