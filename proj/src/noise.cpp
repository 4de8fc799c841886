#include "qrc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qrc/error.hpp"
#include "text.hpp"

namespace qrc {

namespace {

void check_probability(double p, const char* field) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw Error(ErrorKind::Range, std::string(field) + " must lie in [0, 1]", field);
  }
}

KrausChannel depolarizing_1q(double p, int target) {
  std::vector<ComplexMatrix> ops;
  ops.push_back(std::sqrt(1.0 - p + p / 4.0) * pauli(0));
  const double w = std::sqrt(p / 4.0);
  for (int a = 1; a < 4; ++a) ops.push_back(w * pauli(a));
  return KrausChannel({target}, std::move(ops));
}

KrausChannel depolarizing_2q(double p, int first, int second) {
  std::vector<ComplexMatrix> ops;
  const double w = std::sqrt(p / 16.0);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      ComplexMatrix pab(4, 4);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) pab(r, c) = pauli(a)(r / 2, c / 2) * pauli(b)(r % 2, c % 2);
      ops.push_back((a == 0 && b == 0 ? std::sqrt(1.0 - p + p / 16.0) : w) * pab);
    }
  }
  return KrausChannel({first, second}, std::move(ops));
}

}  // namespace

void Topology::validate() const {
  if (num_qubits < 0) throw Error(ErrorKind::Topology, "negative qubit count", "num_qubits");
  std::set<QubitPair> seen;
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || (num_qubits > 0 && (a >= num_qubits || b >= num_qubits))) {
      throw Error(ErrorKind::Topology,
                  "edge " + std::to_string(a) + "-" + std::to_string(b) + " out of range", "edges");
    }
    if (a == b) {
      throw Error(ErrorKind::Topology, "self-edge " + std::to_string(a) + "-" + std::to_string(b),
                  "edges");
    }
    if (!seen.insert(std::minmax(a, b)).second) {
      throw Error(ErrorKind::Topology,
                  "duplicate edge " + std::to_string(a) + "-" + std::to_string(b), "edges");
    }
  }
}

void DeviceNoiseProfile::validate() const {
  check_probability(p1, "p1");
  check_probability(p2, "p2");
  check_probability(gamma_idle, "gamma");
  check_probability(lambda_idle, "lambda");
  check_probability(readout.p01, "r01");
  check_probability(readout.p10, "r10");
  if (!std::isfinite(zz_theta)) throw Error(ErrorKind::Range, "zz_theta must be finite", "zz_theta");
  topology.validate();
}

bool DeviceNoiseProfile::is_noiseless() const noexcept {
  return p1 == 0.0 && p2 == 0.0 && gamma_idle == 0.0 && lambda_idle == 0.0 &&
         (zz_theta == 0.0 || topology.edges.empty()) && readout.p01 == 0.0 && readout.p10 == 0.0;
}

KrausChannel depolarizing_channel(double p, std::vector<int> targets) {
  check_probability(p, "p");
  if (targets.size() == 1) return depolarizing_1q(p, targets[0]);
  if (targets.size() == 2) return depolarizing_2q(p, targets[0], targets[1]);
  throw Error(ErrorKind::InvalidArgument, "depolarizing channel supports 1 or 2 qubits");
}

KrausChannel amplitude_damping_channel(double gamma, int target) {
  check_probability(gamma, "gamma");
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel({target}, {k0, k1});
}

KrausChannel phase_damping_channel(double lambda, int target) {
  check_probability(lambda, "lambda");
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - lambda);
  k1(1, 1) = std::sqrt(lambda);
  return KrausChannel({target}, {k0, k1});
}

UnitaryGate zz_crosstalk_gate(double theta, QubitPair edge) {
  if (!std::isfinite(theta)) throw Error(ErrorKind::InvalidArgument, "zz angle must be finite");
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = std::polar(1.0, -theta / 2.0);
  m(1, 1) = m(2, 2) = std::polar(1.0, theta / 2.0);
  return UnitaryGate({edge.first, edge.second}, m, "zz", theta);
}

DensityMatrix apply_device_noise(DensityMatrix state, const DeviceNoiseProfile& profile,
                                 const CircuitLayer& layer) {
  const int n = state.num_qubits();
  if (profile.topology.num_qubits != 0 && profile.topology.num_qubits != n) {
    throw Error(ErrorKind::Topology, "profile topology has " +
                                         std::to_string(profile.topology.num_qubits) +
                                         " qubits, state has " + std::to_string(n));
  }
  for (auto [a, b] : profile.topology.edges) {
    if (a >= n || b >= n) {
      throw Error(ErrorKind::Topology, "topology edge " + std::to_string(a) + "-" +
                                           std::to_string(b) + " outside the register");
    }
  }

  for (const auto& gate : layer.gates) {
    for (int q : gate.targets()) {
      if (q >= n) throw Error(ErrorKind::Dimension, "layer addresses a qubit beyond the state");
    }
    state = apply_unitary(std::move(state), gate);
    if (gate.arity() == 1 && profile.p1 > 0.0) {
      state = apply_channel(std::move(state), depolarizing_channel(profile.p1, gate.targets()), false);
    } else if (gate.arity() == 2 && profile.p2 > 0.0) {
      state = apply_channel(std::move(state), depolarizing_channel(profile.p2, gate.targets()), false);
    }
  }
  if (profile.zz_theta != 0.0) {
    for (const auto& edge : profile.topology.edges) {
      state = apply_unitary(std::move(state), zz_crosstalk_gate(profile.zz_theta, edge));
    }
  }
  if (profile.gamma_idle > 0.0 || profile.lambda_idle > 0.0) {
    for (int q = 0; q < n; ++q) {
      if (profile.gamma_idle > 0.0) {
        state = apply_channel(std::move(state), amplitude_damping_channel(profile.gamma_idle, q), false);
      }
      if (profile.lambda_idle > 0.0) {
        state = apply_channel(std::move(state), phase_damping_channel(profile.lambda_idle, q), false);
      }
    }
  }
  return hermitize(std::move(state));
}

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& profile_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"gates", {"p1", "p2"}},
      {"idle", {"gamma", "lambda"}},
      {"crosstalk", {"zz_theta"}},
      {"readout", {"r01", "r10"}},
      {"topology", {"num_qubits", "edges"}},
  };
  return schema;
}

}  // namespace

DeviceNoiseProfile parse_noise_profile(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Parse,
                "noise profile line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_schema(tree, profile_schema(), "noise profile");

  DeviceNoiseProfile profile;
  profile.p1 = get_double(tree, "gates.p1", 0.0);
  profile.p2 = get_double(tree, "gates.p2", 0.0);
  profile.gamma_idle = get_double(tree, "idle.gamma", 0.0);
  profile.lambda_idle = get_double(tree, "idle.lambda", 0.0);
  profile.zz_theta = get_double(tree, "crosstalk.zz_theta", 0.0);
  profile.readout.p01 = get_double(tree, "readout.r01", 0.0);
  profile.readout.p10 = get_double(tree, "readout.r10", 0.0);
  profile.topology.num_qubits = static_cast<int>(get_integer(tree, "topology.num_qubits", 0));
  profile.topology.edges = parse_pair_list(get_string(tree, "topology.edges", ""), "topology.edges");
  profile.validate();
  return profile;
}

DeviceNoiseProfile load_noise_profile(const std::filesystem::path& path) {
  return parse_noise_profile(read_text_file(path));
}

std::string format_noise_profile(const DeviceNoiseProfile& profile) {
  std::ostringstream out;
  out << "[gates]\np1 = " << format_double(profile.p1) << "\np2 = " << format_double(profile.p2) << "\n\n"
      << "[idle]\ngamma = " << format_double(profile.gamma_idle)
      << "\nlambda = " << format_double(profile.lambda_idle) << "\n\n"
      << "[crosstalk]\nzz_theta = " << format_double(profile.zz_theta) << "\n\n"
      << "[readout]\nr01 = " << format_double(profile.readout.p01)
      << "\nr10 = " << format_double(profile.readout.p10) << "\n\n"
      << "[topology]\nnum_qubits = " << profile.topology.num_qubits
      << "\nedges = " << format_pair_list(profile.topology.edges) << "\n";
  return out.str();
}

DeviceNoiseProfile preset_profile(std::string_view name, int num_qubits) {
  if (num_qubits < 2) throw Error(ErrorKind::InvalidArgument, "presets need at least 2 qubits");
  DeviceNoiseProfile p;
  p.topology.num_qubits = num_qubits;
  if (name == "noiseless") {
    return p;
  }
  if (name == "strong-dense") {
    // Ladder: rungs inside each pair, rails between neighbouring pairs.
    for (int q = 0; q + 1 < num_qubits; q += 2) p.topology.edges.emplace_back(q, q + 1);
    for (int q = 0; q + 2 < num_qubits; ++q) p.topology.edges.emplace_back(q, q + 2);
    p.p1 = 2e-3;
    p.p2 = 3e-2;
    p.gamma_idle = 1e-2;
    p.lambda_idle = 2e-2;
    p.zz_theta = 0.05;
    p.readout = {0.03, 0.05};
  } else if (name == "weak-sparse") {
    // Open chain; only the odd links cross pair boundaries.
    for (int q = 0; q + 1 < num_qubits; ++q) p.topology.edges.emplace_back(q, q + 1);
    p.p1 = 5e-4;
    p.p2 = 1e-2;
    p.gamma_idle = 5e-3;
    p.lambda_idle = 1e-2;
    p.zz_theta = 0.02;
    p.readout = {0.01, 0.02};
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown preset '" + std::string(name) + "'");
  }
  p.validate();
  return p;
}

std::vector<std::string> preset_names() { return {"noiseless", "strong-dense", "weak-sparse"}; }

}  // namespace qrc
