#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qrc/circuit.hpp"
#include "qrc/quantum.hpp"

namespace qrc {

// Physical coupling graph. num_qubits == 0 leaves the register size open;
// edges are then range-checked when the profile is applied.
struct Topology {
  int num_qubits = 0;
  std::vector<QubitPair> edges;

  // Throws Topology on self-edges, duplicates or out-of-range indices.
  void validate() const;
};

struct ReadoutFlip {
  double p01 = 0.0;  // recorded 1 when the qubit was 0
  double p10 = 0.0;  // recorded 0 when the qubit was 1
};

// Parametric device map applied around every reservoir layer. These values
// are modelling knobs, not calibrations of any physical processor.
struct DeviceNoiseProfile {
  double p1 = 0.0;           // depolarizing after each 1-qubit gate
  double p2 = 0.0;           // 2-qubit depolarizing after each CX
  double gamma_idle = 0.0;   // amplitude damping per qubit per layer
  double lambda_idle = 0.0;  // phase damping per qubit per layer
  double zz_theta = 0.0;     // coherent ZZ angle per topology edge per layer
  ReadoutFlip readout;
  Topology topology;

  // Throws Range (naming the field) or Topology.
  void validate() const;
  bool is_noiseless() const noexcept;
};

// (1-p) rho + p I/d on k in {1, 2} qubits, as the Kraus set
// sqrt(1 - p + p/4^k) I together with sqrt(p/4^k) P for the 4^k - 1
// non-identity Pauli strings P.
KrausChannel depolarizing_channel(double p, std::vector<int> targets);
KrausChannel amplitude_damping_channel(double gamma, int target);
KrausChannel phase_damping_channel(double lambda, int target);

// exp(-i theta Z(x)Z / 2) = diag(e^{-i theta/2}, e^{i theta/2}, e^{i theta/2}, e^{-i theta/2}).
UnitaryGate zz_crosstalk_gate(double theta, QubitPair edge);

// One full reservoir timestep: every gate of `layer` followed by its gate
// noise, then ZZ crosstalk on each topology edge, then amplitude and phase
// damping on each qubit.
DensityMatrix apply_device_noise(DensityMatrix state, const DeviceNoiseProfile& profile,
                                 const CircuitLayer& layer);

// Sectioned key-value document; see docs/noise-profile.md for the schema.
DeviceNoiseProfile parse_noise_profile(std::string_view text);
DeviceNoiseProfile load_noise_profile(const std::filesystem::path& path);
std::string format_noise_profile(const DeviceNoiseProfile& profile);

// Built-in profiles: "noiseless", "strong-dense", "weak-sparse". The two
// device-like presets derive their coupling graphs from num_qubits.
DeviceNoiseProfile preset_profile(std::string_view name, int num_qubits);
std::vector<std::string> preset_names();

}  // namespace qrc
