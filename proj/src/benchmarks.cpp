#include "qrc/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qrc/error.hpp"
#include "qrc/parallel.hpp"
#include "qrc/readout.hpp"
#include "qrc/rng.hpp"

namespace qrc {

namespace {

constexpr double kDivergenceBound = 1e6;
constexpr int kEsnRetries = 16;

std::string context(int nodes, double radius, int trial) {
  std::ostringstream s;
  s << "N_ESN=" << nodes << " radius=" << radius << " trial=" << trial;
  return s.str();
}

}  // namespace

void InputSignalSpec::validate() const {
  if (!(period > 0.0)) throw Error(ErrorKind::Range, "period must be positive", "period");
  if (length < 1) throw Error(ErrorKind::Range, "length must be at least 1", "length");
  if (!std::isfinite(amplitude)) throw Error(ErrorKind::Range, "amplitude must be finite", "amplitude");
}

double signal_value(const InputSignalSpec& spec, double t) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double w = two_pi * t / spec.period;
  return spec.amplitude *
         (std::sin(spec.alpha_bar * w) * std::sin(spec.beta_bar * w) * std::sin(spec.gamma_bar * w) + 1.0);
}

std::vector<double> gen_input(const InputSignalSpec& spec) {
  spec.validate();
  std::vector<double> u(static_cast<std::size_t>(spec.length));
  for (int k = 0; k < spec.length; ++k) {
    u[static_cast<std::size_t>(k)] = signal_value(spec, spec.first_t + k);
  }
  return u;
}

NarmaSpec NarmaSpec::narma2() {
  NarmaSpec s;
  s.variant = Variant::Narma2;
  s.order = 2;
  s.alpha = 0.4;
  s.beta = 0.4;
  s.gamma = 0.6;
  s.delta = 0.1;
  return s;
}

NarmaSpec NarmaSpec::general(int order) {
  NarmaSpec s;
  s.order = order;
  return s;
}

NarmaSpec NarmaSpec::for_order(int order) { return order == 2 ? narma2() : general(order); }

std::string NarmaSpec::name() const {
  return variant == Variant::Narma2 ? "narma2" : "narma" + std::to_string(order);
}

void NarmaSpec::validate() const {
  if (variant == Variant::General && order < 1) {
    throw Error(ErrorKind::Range, "NARMA order must be at least 1", "order");
  }
  for (double v : {alpha, beta, gamma, delta}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Range, "NARMA coefficients must be finite");
  }
}

std::vector<double> gen_narma(const NarmaSpec& spec, std::span<const double> inputs) {
  spec.validate();
  const auto m = static_cast<std::ptrdiff_t>(inputs.size());
  std::vector<double> y(inputs.size(), 0.0);
  if (m == 0) return y;

  // y at 0-based index i; negative indices read the initial history.
  auto y_at = [&](std::ptrdiff_t i) {
    if (i >= 0) return y[static_cast<std::size_t>(i)];
    const auto k = static_cast<std::size_t>(-i);
    return k < spec.initial_history.size() ? spec.initial_history[k] : 0.0;
  };
  auto u_at = [&](std::ptrdiff_t i) { return i >= 0 ? inputs[static_cast<std::size_t>(i)] : 0.0; };

  y[0] = spec.initial_history.empty() ? 0.0 : spec.initial_history[0];
  for (std::ptrdiff_t t = 0; t + 1 < m; ++t) {
    const double yt = y_at(t);
    double next;
    if (spec.variant == NarmaSpec::Variant::Narma2) {
      next = spec.alpha * yt + spec.beta * yt * y_at(t - 1) + spec.gamma * std::pow(u_at(t), 3) +
             spec.delta;
    } else {
      double sum = 0.0;
      for (int j = 0; j < spec.order; ++j) sum += y_at(t - j);
      next = spec.alpha * yt + spec.beta * yt * sum + spec.gamma * u_at(t - spec.order + 1) * u_at(t) +
             spec.delta;
    }
    if (!std::isfinite(next) || std::abs(next) > kDivergenceBound) {
      std::ostringstream msg;
      msg << spec.name() << " diverged at t=" << t + 2 << " (y=" << next << ", u=" << u_at(t) << ")";
      throw Error(ErrorKind::Divergence, msg.str());
    }
    y[static_cast<std::size_t>(t + 1)] = next;
  }
  return y;
}

std::vector<double> preprocess_diff(std::span<const double> raw) {
  if (raw.size() < 2) throw Error(ErrorKind::InvalidArgument, "finite difference needs length >= 2");
  std::vector<double> out(raw.size() - 1);
  for (std::size_t t = 0; t + 1 < raw.size(); ++t) out[t] = raw[t + 1] - raw[t];
  return out;
}

void SensorSpec::validate() const {
  if (classes < 2) throw Error(ErrorKind::Range, "need at least two classes", "classes");
  if (samples_per_class < 1) throw Error(ErrorKind::Range, "samples_per_class must be positive", "samples_per_class");
  if (timesteps < 2) throw Error(ErrorKind::Range, "timesteps must be at least 2", "timesteps");
  if (!(noise >= 0.0)) throw Error(ErrorKind::Range, "noise must be non-negative", "noise");
}

PulseShape sensor_pulse(int label) {
  switch (label) {
    case 0: return {10.0, 4.0, 1.0, 25.0};
    case 1: return {10.0, 5.0, 0.9, 28.0};
    case 2: return {10.0, 1.5, 0.6, 8.0};
    default: return {10.0, 2.0 + label, 1.0 + 0.25 * (label - 2), 10.0 + 6.0 * label};
  }
}

double pulse_value(const PulseShape& shape, double t) {
  if (t < shape.onset) return 0.0;
  const double s = t - shape.onset;
  return shape.peak * (1.0 - std::exp(-s / shape.rise)) * std::exp(-s / shape.decay);
}

void LabeledSeriesDataset::validate() const {
  if (series.size() != labels.size()) throw Error(ErrorKind::Dimension, "one label per series");
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i].size() != series.front().size()) {
      throw Error(ErrorKind::Dimension, "series lengths differ");
    }
    if (labels[i] < 0 || labels[i] >= num_classes) throw Error(ErrorKind::Range, "label out of range");
  }
}

LabeledSeriesDataset gen_synthetic_sensor(const SensorSpec& spec) {
  spec.validate();
  LabeledSeriesDataset data;
  data.num_classes = spec.classes;
  for (int c = 0; c < spec.classes; ++c) {
    const PulseShape shape = sensor_pulse(c);
    for (int s = 0; s < spec.samples_per_class; ++s) {
      Rng rng = make_rng(spec.seed, {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(s)});
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> x(static_cast<std::size_t>(spec.timesteps));
      for (int t = 0; t < spec.timesteps; ++t) {
        x[static_cast<std::size_t>(t)] = pulse_value(shape, t);
        if (spec.noise > 0.0) x[static_cast<std::size_t>(t)] += spec.noise * normal(rng);
      }
      data.series.push_back(std::move(x));
      data.labels.push_back(c);
    }
  }
  return data;
}

LabeledSeriesDataset preprocess_diff(const LabeledSeriesDataset& raw) {
  LabeledSeriesDataset out;
  out.num_classes = raw.num_classes;
  out.labels = raw.labels;
  out.series.reserve(raw.series.size());
  for (const auto& s : raw.series) out.series.push_back(preprocess_diff(s));
  return out;
}

void EsnConfig::validate() const {
  if (nodes < 1) throw Error(ErrorKind::Range, "N_ESN must be at least 1", "nodes");
  if (!(spectral_radius > 0.0) || !std::isfinite(spectral_radius)) {
    throw Error(ErrorKind::Range, "spectral radius must be positive", "spectral_radius");
  }
}

double spectral_radius(const Eigen::Ref<const Eigen::MatrixXd>& w) {
  if (w.rows() != w.cols()) throw Error(ErrorKind::Dimension, "spectral radius needs a square matrix");
  if (w.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(w, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "eigenvalue computation did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd rescale_to_radius(const Eigen::Ref<const Eigen::MatrixXd>& w, double target) {
  const double r = spectral_radius(w);
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "matrix has zero spectral radius");
  return w * (target / r);
}

Eigen::VectorXd esn_step(const Eigen::Ref<const Eigen::VectorXd>& x, double u,
                         const Eigen::Ref<const Eigen::MatrixXd>& w,
                         const Eigen::Ref<const Eigen::VectorXd>& w_in) {
  if (w.rows() != x.size() || w.cols() != x.size() || w_in.size() != x.size()) {
    throw Error(ErrorKind::Dimension, "ESN state, W and W_in sizes disagree");
  }
  return (w.transpose() * x + w_in * u).array().tanh().matrix();
}

EsnModel build_esn(const EsnConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = config.nodes;
  EsnModel model;
  model.w_in.resize(n);
  for (int i = 0; i < n; ++i) {
    const bool one = uniform01(rng) < 0.5;
    model.w_in(i) = config.input_alphabet == InputAlphabet::ZeroOne ? (one ? 1.0 : 0.0)
                                                                     : (one ? 1.0 : -1.0);
  }
  for (int attempt = 0; attempt < kEsnRetries; ++attempt) {
    Eigen::MatrixXd w(n, n);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = normal(rng);
    }
    const double r = spectral_radius(w);
    if (r > 1e-12) {
      model.w = w * (config.spectral_radius / r);
      return model;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "could not draw a W with nonzero spectral radius");
}

Eigen::MatrixXd run_esn(const EsnModel& model, std::span<const double> inputs) {
  const Eigen::Index n = model.w.rows();
  Eigen::MatrixXd states(static_cast<Eigen::Index>(inputs.size()), n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    x = esn_step(x, inputs[t], model.w, model.w_in);
    states.row(static_cast<Eigen::Index>(t)) = x.transpose();
  }
  return states;
}

double esn_nmse(const EsnModel& model, std::span<const double> inputs,
                std::span<const double> targets, const SeriesSplit& split) {
  if (inputs.size() != targets.size()) throw Error(ErrorKind::Dimension, "inputs and targets must align");
  const Eigen::MatrixXd states = run_esn(model, inputs);
  const Eigen::Map<const Eigen::VectorXd> y(targets.data(), static_cast<Eigen::Index>(targets.size()));
  const auto w = fit_regression(rows(states, split.train), y.segment(split.train.first, split.train.count));
  const Eigen::VectorXd pred = predict(w, rows(states, split.test)).col(0);
  return nmse(pred, y.segment(split.test.first, split.test.count));
}

std::vector<double> radius_grid(double first, double last, double step) {
  if (!(step > 0.0) || !(first > 0.0) || last < first) {
    throw Error(ErrorKind::Range, "radius grid needs 0 < first <= last and step > 0");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double r = first + i * step;
    if (r > last + 1e-9 * step) break;
    grid.push_back(r);
  }
  return grid;
}

void EsnSweepSpec::validate() const {
  if (node_counts.empty() || radii.empty()) throw Error(ErrorKind::InvalidArgument, "sweep grids must be nonempty");
  if (trials < 1) throw Error(ErrorKind::Range, "trials must be positive", "trials");
  for (int n : node_counts) {
    if (n < 1) throw Error(ErrorKind::Range, "N_ESN must be at least 1", "nodes");
  }
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorKind::Range, "radii must be positive", "radii");
  }
}

EsnSweepReport esn_sweep(const EsnSweepSpec& spec, std::span<const double> inputs,
                         std::span<const double> targets, const SeriesSplit& split) {
  spec.validate();
  const auto n_r = static_cast<Eigen::Index>(spec.radii.size());
  EsnSweepReport report;
  report.radii = spec.radii;
  report.trials = spec.trials;
  for (int n : spec.node_counts) {
    EsnNodeSweep node;
    node.nodes = n;
    node.nmse.resize(n_r, spec.trials);
    report.nodes.push_back(std::move(node));
  }

  const std::size_t per_node = static_cast<std::size_t>(n_r) * static_cast<std::size_t>(spec.trials);
  parallel_for(per_node * report.nodes.size(), spec.workers, [&](std::size_t job) {
    auto& node = report.nodes[job / per_node];
    const auto r = static_cast<Eigen::Index>((job % per_node) / static_cast<std::size_t>(spec.trials));
    const int k = static_cast<int>(job % static_cast<std::size_t>(spec.trials));
    EsnConfig cfg;
    cfg.nodes = node.nodes;
    cfg.spectral_radius = spec.radii[static_cast<std::size_t>(r)];
    cfg.input_alphabet = spec.input_alphabet;
    cfg.seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(node.nodes),
                                       static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(k)});
    try {
      node.nmse(r, k) = esn_nmse(build_esn(cfg), inputs, targets, split);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " [" + context(cfg.nodes, cfg.spectral_radius, k) + "]",
                  std::string(e.field()));
    }
  });

  for (auto& node : report.nodes) {
    node.global_average = node.nmse.mean();
    node.radius_mean = node.nmse.rowwise().mean();
    node.radius_std = ((node.nmse.colwise() - node.radius_mean).array().square().rowwise().mean()).sqrt();
    Eigen::Index best = 0;
    node.global_minimum = node.radius_mean.minCoeff(&best);
    node.best_radius = spec.radii[static_cast<std::size_t>(best)];
  }
  return report;
}

std::string sweep_summary_csv(const EsnSweepReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "nodes,global_average,global_minimum,best_radius,trials,radii\n";
  for (const auto& n : report.nodes) {
    out << n.nodes << ',' << n.global_average << ',' << n.global_minimum << ',' << n.best_radius << ','
        << report.trials << ',' << report.radii.size() << '\n';
  }
  return out.str();
}

std::string sweep_radius_csv(const EsnSweepReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "nodes,radius,mean_nmse,std_nmse,min_nmse,max_nmse\n";
  for (const auto& n : report.nodes) {
    for (std::size_t r = 0; r < report.radii.size(); ++r) {
      const auto row = n.nmse.row(static_cast<Eigen::Index>(r));
      out << n.nodes << ',' << report.radii[r] << ',' << n.radius_mean(static_cast<Eigen::Index>(r)) << ','
          << n.radius_std(static_cast<Eigen::Index>(r)) << ',' << row.minCoeff() << ',' << row.maxCoeff()
          << '\n';
    }
  }
  return out.str();
}

std::string dataset_to_csv(const LabeledSeriesDataset& data, const SensorSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "# synthetic-sensor classes=" << spec.classes << " samples_per_class=" << spec.samples_per_class
      << " timesteps=" << spec.timesteps << " noise=" << spec.noise << " seed=" << spec.seed << '\n';
  out << "sample,label";
  for (int t = 0; t < data.timesteps(); ++t) out << ",x" << t + 1;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << i << ',' << data.labels[i];
    for (double v : data.series[i]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

std::string narma_to_csv(std::span<const double> inputs, std::span<const double> targets,
                         const NarmaSpec& spec, const InputSignalSpec& signal) {
  std::ostringstream out;
  out.precision(17);
  out << "# " << spec.name() << " alpha_bar=" << signal.alpha_bar << " beta_bar=" << signal.beta_bar
      << " gamma_bar=" << signal.gamma_bar << " period=" << signal.period
      << " amplitude=" << signal.amplitude << " first_t=" << signal.first_t << '\n';
  out << "t,u,y\n";
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    out << t + 1 << ',' << inputs[t] << ',' << targets[t] << '\n';
  }
  return out.str();
}

}  // namespace qrc
