// Python bindings for the simulator, benchmarks and experiment runner.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qrc/benchmarks.hpp"
#include "qrc/circuit.hpp"
#include "qrc/engine.hpp"
#include "qrc/error.hpp"
#include "qrc/experiment.hpp"
#include "qrc/noise.hpp"
#include "qrc/readout.hpp"

namespace py = pybind11;

namespace {

qrc::SubsystemLayout make_layout(int qubits, const std::optional<std::vector<qrc::QubitPair>>& pairs) {
  return pairs ? qrc::SubsystemLayout(qubits, *pairs) : qrc::SubsystemLayout::adjacent(qubits);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Noisy quantum reservoir computing simulator";

  py::exception<qrc::Error>(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const qrc::Error& e) {
      const py::object cls = py::module_::import("qrc._core").attr("Error");
      py::object exc = cls(e.what());
      exc.attr("kind") = std::string(qrc::to_string(e.kind()));
      exc.attr("field") = e.field();
      PyErr_SetObject(cls.ptr(), exc.ptr());
    }
  });

  py::class_<qrc::DeviceNoiseProfile>(m, "NoiseProfile")
      .def(py::init<>())
      .def_readwrite("p1", &qrc::DeviceNoiseProfile::p1)
      .def_readwrite("p2", &qrc::DeviceNoiseProfile::p2)
      .def_readwrite("gamma_idle", &qrc::DeviceNoiseProfile::gamma_idle)
      .def_readwrite("lambda_idle", &qrc::DeviceNoiseProfile::lambda_idle)
      .def_readwrite("zz_theta", &qrc::DeviceNoiseProfile::zz_theta)
      .def_property(
          "readout", [](const qrc::DeviceNoiseProfile& p) { return std::pair(p.readout.p01, p.readout.p10); },
          [](qrc::DeviceNoiseProfile& p, std::pair<double, double> r) { p.readout = {r.first, r.second}; })
      .def_property(
          "edges", [](const qrc::DeviceNoiseProfile& p) { return p.topology.edges; },
          [](qrc::DeviceNoiseProfile& p, std::vector<qrc::QubitPair> e) { p.topology.edges = std::move(e); })
      .def_property(
          "num_qubits", [](const qrc::DeviceNoiseProfile& p) { return p.topology.num_qubits; },
          [](qrc::DeviceNoiseProfile& p, int n) { p.topology.num_qubits = n; })
      .def("validate", &qrc::DeviceNoiseProfile::validate)
      .def("is_noiseless", &qrc::DeviceNoiseProfile::is_noiseless)
      .def("__str__", &qrc::format_noise_profile);

  m.def("preset_profile", &qrc::preset_profile, py::arg("name"), py::arg("num_qubits"));
  m.def("preset_names", &qrc::preset_names);
  m.def("parse_noise_profile", &qrc::parse_noise_profile, py::arg("text"));
  m.def("load_noise_profile", &qrc::load_noise_profile, py::arg("path"));

  m.def(
      "gen_input",
      [](int length, int first_t) {
        qrc::InputSignalSpec spec;
        spec.length = length;
        spec.first_t = first_t;
        return qrc::gen_input(spec);
      },
      py::arg("length") = 100, py::arg("first_t") = 0);
  m.def(
      "gen_narma",
      [](int order, const std::vector<double>& inputs) {
        return qrc::gen_narma(qrc::NarmaSpec::for_order(order), inputs);
      },
      py::arg("order"), py::arg("inputs"));

  m.def(
      "run_reservoir",
      [](const std::vector<double>& inputs, int qubits, double scale,
         const std::optional<qrc::DeviceNoiseProfile>& profile, std::optional<int> shots, std::uint64_t seed,
         const std::optional<std::vector<qrc::QubitPair>>& pairs) {
        qrc::ReservoirConfig cfg;
        cfg.layout = make_layout(qubits, pairs);
        cfg.scale = scale;
        if (profile) cfg.profile = *profile;
        cfg.shots = shots;
        cfg.seed = seed;
        Eigen::MatrixXd values;
        {
          py::gil_scoped_release release;
          values = qrc::run_reservoir(inputs, cfg).values;
        }
        return values;
      },
      py::arg("inputs"), py::arg("qubits") = 8, py::arg("scale") = 2.0, py::arg("profile") = py::none(),
      py::arg("shots") = py::none(), py::arg("seed") = 0, py::arg("pairs") = py::none(),
      "Z expectation features, one row per timestep. shots=None gives exact values.");

  m.def(
      "export_qasm",
      [](const std::vector<double>& inputs, int qubits, double scale,
         const std::optional<std::vector<qrc::QubitPair>>& pairs) {
        return qrc::export_qasm(inputs, make_layout(qubits, pairs), scale);
      },
      py::arg("inputs"), py::arg("qubits") = 8, py::arg("scale") = 2.0, py::arg("pairs") = py::none());

  m.def(
      "nmse",
      [](const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
        return qrc::nmse(predictions, targets);
      },
      py::arg("predictions"), py::arg("targets"));

  m.def(
      "run_experiment",
      [](const std::string& config_text, const std::filesystem::path& base_dir,
         const std::optional<std::filesystem::path>& output, std::optional<std::uint64_t> seed) {
        auto cfg = qrc::parse_config(config_text, base_dir);
        if (output) cfg.output_dir = *output;
        if (seed) {
          cfg.seed = *seed;
          cfg.sensor.seed = *seed;
        }
        cfg.validate();
        qrc::RunResult result;
        {
          py::gil_scoped_release release;
          result = qrc::run_experiment(cfg);
        }
        return py::make_tuple(result.files, result.summary_json);
      },
      py::arg("config_text"), py::arg("base_dir") = std::filesystem::path{}, py::arg("output") = py::none(),
      py::arg("seed") = py::none());
}
