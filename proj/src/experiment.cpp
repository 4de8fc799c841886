#include "qrc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <json.hpp>

#include "qrc/analysis.hpp"
#include "qrc/error.hpp"
#include "qrc/parallel.hpp"
#include "qrc/readout.hpp"
#include "text.hpp"

namespace qrc {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kDefaultShots = 8192;
constexpr int kDefaultQubits = 8;
// Substream id for fold assignment, kept apart from the per-sample shot streams.
constexpr std::uint64_t kFoldStream = 0xf01d;

const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"experiment", {"task", "trials", "seed", "workers", "output"}},
      {"reservoir", {"qubits", "pairs", "scale", "shots", "noise_profile", "noise_preset"}},
      {"split", {"washout", "train", "test"}},
      {"signal", {"length", "first_t", "amplitude", "alpha_bar", "beta_bar", "gamma_bar", "period", "narma"}},
      {"classification",
       {"classes", "samples_per_class", "timesteps", "noise", "dataset_seed", "washout", "folds"}},
      {"esn", {"nodes", "radius_first", "radius_last", "radius_step", "trials", "input_alphabet"}},
  };
  return schema;
}

int get_int(const pt::ptree& tree, const std::string& key, int fallback) {
  const long long v = get_integer(tree, key, fallback);
  if (v < -2147483647LL || v > 2147483647LL) {
    throw Error(ErrorKind::Range, "field " + key + " out of range", key);
  }
  return static_cast<int>(v);
}

std::uint64_t get_seed(const pt::ptree& tree, const std::string& key, std::uint64_t fallback) {
  const auto value = tree.get_optional<std::string>(key);
  if (!value) return fallback;
  const long long v = parse_integer(*value, key);
  if (v < 0) throw Error(ErrorKind::Range, "field " + key + " must be non-negative", key);
  return static_cast<std::uint64_t>(v);
}

int narma_order_from_name(const std::string& name) {
  if (name == "narma2") return 2;
  if (name == "narma5") return 5;
  if (name == "narma10") return 10;
  throw Error(ErrorKind::Parse, "field signal.narma: unknown target '" + name +
                                    "' (valid: narma2, narma5, narma10)",
              "signal.narma");
}

std::string alphabet_name(InputAlphabet a) { return a == InputAlphabet::ZeroOne ? "zero-one" : "plus-minus"; }

std::string pad(int value, int width) {
  std::string s = std::to_string(value);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

std::string trial_name(const std::string& stem, int trial) { return stem + "_trial" + pad(trial, 2) + ".csv"; }

std::string double_text(double v) { return format_double(v); }

// Every CSV and text report starts with a comment line pointing at its manifest.
class Writer {
 public:
  explicit Writer(const ExperimentConfig& config) : dir_(config.output_dir) {
    std::ostringstream s;
    s << "# " << kArtifactName << ' ' << kArtifactVersion << " task=" << to_string(config.task)
      << " seed=" << config.seed << " manifest=manifest.json\n";
    provenance_ = s.str();
  }

  void write(const std::string& name, std::string_view text) {
    const auto ext = fs::path(name).extension();
    write_text_file(dir_ / name, ext == ".json" ? std::string(text) : provenance_ + std::string(text));
    files_.emplace_back(name);
  }
  const std::vector<fs::path>& files() const noexcept { return files_; }

 private:
  fs::path dir_;
  std::string provenance_;
  std::vector<fs::path> files_;
};

// The worker count never changes results, so it stays out of the recorded config.
std::string result_config(const ExperimentConfig& config) {
  std::string text = format_config(config);
  const std::string line = "workers = " + std::to_string(config.workers) + "\n";
  if (const auto pos = text.find(line); pos != std::string::npos) text.erase(pos, line.size());
  return text;
}

Json manifest(const ExperimentConfig& config, const std::vector<fs::path>& files) {
  Json m;
  m["artifact"] = kArtifactName;
  m["version"] = kArtifactVersion;
  m["task"] = to_string(config.task);
  m["seed"] = config.seed;
  m["noise_source"] = config.noise_source;
  m["config"] = result_config(config);
  m["noise_profile"] = format_noise_profile(config.reservoir.profile);
  Json list = Json::array();
  for (const auto& f : files) list.push_back(f.generic_string());
  m["files"] = list;
  return m;
}

// Writes summary.json and manifest.json. The summary embeds the manifest.
RunResult finish(const ExperimentConfig& config, Writer& out, Json summary) {
  auto files = out.files();
  files.emplace_back("summary.json");
  files.emplace_back("manifest.json");
  summary["manifest"] = manifest(config, files);
  const std::string text = summary.dump(2) + "\n";
  out.write("summary.json", text);
  out.write("manifest.json", manifest(config, files).dump(2) + "\n");
  return {out.files(), text};
}

Json mean_std(const std::vector<double>& values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(values.size()));
  Json j;
  j["mean"] = mean;
  j["std"] = sd;
  j["mean_display"] = format_two_digits(mean);
  j["std_display"] = format_two_digits(sd);
  j["per_trial"] = values;
  return j;
}

Json confusion_json(const ConfusionMatrix& cm) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < cm.counts().rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < cm.counts().cols(); ++c) row.push_back(cm.counts()(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json gaps_json(const StationarityReport& report) {
  Json list = Json::array();
  for (const auto& g : gap_summary(report)) {
    Json j;
    j["channel"] = g.channel;
    j["mean_gap"] = g.mean_gap;
    j["log_var_gap"] = std::isfinite(g.log_var_gap) ? Json(g.log_var_gap) : Json("inf");
    list.push_back(j);
  }
  return list;
}

std::string target_stats_csv(std::span<const double> y, const ExperimentConfig& config) {
  std::ostringstream out;
  out.precision(17);
  out << "window,variance,train_first_t,train_last_t,mean_train,var_train,mean_test,var_test\n";
  for (const auto& c : target_statistics(y, config.washout, config.train, config.test)) {
    const auto& s = c.report.channels.front();
    out << to_string(c.window) << ',' << to_string(c.variance) << ',' << c.report.train.first_t() << ','
        << c.report.train.last_t() << ',' << s.mean_train << ',' << s.var_train << ',' << s.mean_test
        << ',' << s.var_test << '\n';
  }
  return out.str();
}

std::vector<FeatureSeries> run_trials(const ExperimentConfig& config, std::span<const double> u) {
  const Trajectory traj = simulate_trajectory(u, config.reservoir);
  std::vector<FeatureSeries> feats(static_cast<std::size_t>(config.trials));
  parallel_for(feats.size(), config.workers, [&](std::size_t k) {
    feats[k] = config.reservoir.shots
                   ? sample_features(traj, *config.reservoir.shots, config.reservoir.profile.readout,
                                     derive_seed(config.seed, {k}))
                   : traj.exact;
  });
  return feats;
}

RunResult run_narma(const ExperimentConfig& config) {
  const auto u = gen_input(config.signal);
  const auto y = gen_narma(config.narma(), u);
  const SeriesSplit split = config.split();
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  Writer out(config);

  const LinearBaseline lr = fit_linear_baseline(u, y, split, 0);
  const auto feats = run_trials(config, u);

  std::vector<double> qr_nmse;
  std::vector<Eigen::VectorXd> qr_pred;
  for (std::size_t k = 0; k < feats.size(); ++k) {
    const auto w = fit_regression(rows(feats[k].values, split.train), yv.segment(split.train.first, split.train.count));
    qr_pred.push_back(predict(w, feats[k].values).col(0));
    qr_nmse.push_back(nmse(qr_pred.back(), yv, split.test));
    out.write(trial_name("features", static_cast<int>(k)), features_to_csv(feats[k]));
    if (k == 0) out.write("readout_trial00.csv", weights_to_csv(w));
  }

  std::ostringstream pred;
  pred.precision(17);
  pred << "t,phase,u,y,lr";
  for (std::size_t k = 0; k < feats.size(); ++k) pred << ",qr_trial" << pad(static_cast<int>(k), 2);
  pred << '\n';
  for (Eigen::Index t = 0; t < yv.size(); ++t) {
    const char* phase = t < split.train.first ? "washout" : t < split.train.end() ? "train" : t < split.test.end() ? "test" : "unused";
    pred << t + 1 << ',' << phase << ',' << u[static_cast<std::size_t>(t)] << ',' << yv(t) << ','
         << lr.predictions(t);
    for (const auto& p : qr_pred) pred << ',' << p(t);
    pred << '\n';
  }
  out.write("predictions.csv", pred.str());

  const auto report = stationarity_report(feats[0].values, split.train, split.test);
  out.write("stationarity.csv", report_to_csv(report));
  out.write("stationarity.txt", report_to_text(report));
  out.write("targets_stats.csv", target_stats_csv(y, config));

  Json summary;
  summary["task"] = to_string(config.task);
  summary["feature_mode"] = config.reservoir.shots ? "sampled" : "exact";
  summary["shots"] = config.reservoir.shots ? Json(*config.reservoir.shots) : Json("exact");
  summary["qubits"] = config.reservoir.layout.num_qubits();
  summary["scale"] = config.reservoir.scale;
  summary["train_t"] = {split.train.first_t(), split.train.last_t()};
  summary["test_t"] = {split.test.first_t(), split.test.last_t()};
  summary["qr_nmse"] = mean_std(qr_nmse);
  Json lrj;
  lrj["nmse"] = lr.nmse;
  lrj["nmse_display"] = format_two_digits(lr.nmse);
  lrj["w"] = lr.w;
  lrj["b0"] = lr.b0;
  summary["lr_nmse"] = lrj;
  summary["stationarity_gaps"] = gaps_json(report);
  return finish(config, out, summary);
}

RunResult run_classify(const ExperimentConfig& config) {
  const auto raw = gen_synthetic_sensor(config.sensor);
  const auto data = preprocess_diff(raw);
  const int steps = data.timesteps();
  const Window scored{config.class_washout, steps - config.class_washout};
  const int k_classes = data.num_classes;
  Writer out(config);
  out.write("dataset.csv", dataset_to_csv(raw, config.sensor));

  std::vector<double> qr_fold_acc, lr_fold_acc, qr_trial_acc, lr_trial_acc;
  ConfusionMatrix qr_total(k_classes), lr_total(k_classes);
  int qr_ties = 0;
  std::ostringstream pred;
  pred.precision(17);
  pred << "trial,fold,sample,label,predicted,tie";
  for (int c = 0; c < k_classes; ++c) pred << ",score" << c;
  pred << '\n';

  std::vector<Trajectory> trajectories(data.size());
  parallel_for(data.size(), config.workers, [&](std::size_t i) {
    trajectories[i] = simulate_trajectory(data.series[i], config.reservoir);
  });
  std::vector<Eigen::MatrixXd> blocks(data.size());
  std::vector<FeatureSeries> feats(data.size());
  for (int k = 0; k < config.trials; ++k) {
    if (k == 0 || config.reservoir.shots) {
      parallel_for(data.size(), config.workers, [&](std::size_t i) {
        feats[i] = config.reservoir.shots
                       ? sample_features(trajectories[i], *config.reservoir.shots,
                                         config.reservoir.profile.readout,
                                         derive_seed(config.seed, {static_cast<std::uint64_t>(k), i}))
                       : trajectories[i].exact;
        blocks[i] = rows(feats[i].values, scored);
      });
      std::ostringstream fcsv;
      fcsv.precision(17);
      fcsv << "sample,label,t";
      for (Eigen::Index q = 0; q < feats[0].width(); ++q) fcsv << ",z" << q;
      fcsv << '\n';
      for (std::size_t i = 0; i < data.size(); ++i) {
        for (Eigen::Index t = 0; t < feats[i].timesteps(); ++t) {
          fcsv << i << ',' << data.labels[i] << ',' << t + 1;
          for (Eigen::Index q = 0; q < feats[i].width(); ++q) fcsv << ',' << feats[i].values(t, q);
          fcsv << '\n';
        }
      }
      out.write(trial_name("features", k), fcsv.str());
    }

    const std::uint64_t fold_seed = derive_seed(config.seed, {static_cast<std::uint64_t>(k), kFoldStream});
    std::vector<int> fold_of(data.size(), 0);
    std::vector<ClassPrediction> sample_pred(data.size());
    int fold = 0;
    const auto cv = k_fold_cv(data.labels, k_classes, config.folds, fold_seed,
                              [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
                                std::vector<Eigen::MatrixXd> tb;
                                std::vector<int> tl;
                                for (auto i : train) {
                                  tb.push_back(blocks[i]);
                                  tl.push_back(data.labels[i]);
                                }
                                const auto w = fit_classifier(tb, tl, k_classes);
                                std::vector<ClassPrediction> res;
                                for (auto i : test) {
                                  res.push_back(predict_class(w, blocks[i]));
                                  sample_pred[i] = res.back();
                                  fold_of[i] = fold;
                                }
                                ++fold;
                                return res;
                              });
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& p = sample_pred[i];
      pred << k << ',' << fold_of[i] << ',' << i << ',' << data.labels[i] << ',' << p.label << ','
           << (p.tie ? 1 : 0);
      for (Eigen::Index c = 0; c < p.mean_scores.size(); ++c) pred << ',' << p.mean_scores(c);
      pred << '\n';
    }
    qr_fold_acc.insert(qr_fold_acc.end(), cv.fold_accuracy.begin(), cv.fold_accuracy.end());
    qr_trial_acc.push_back(cv.mean_accuracy);
    qr_total += cv.total;
    qr_ties += cv.ties;

    const auto lr = fit_linear_classifier_baseline(data.series, data.labels, k_classes, scored, config.folds, fold_seed);
    lr_fold_acc.insert(lr_fold_acc.end(), lr.fold_accuracy.begin(), lr.fold_accuracy.end());
    lr_trial_acc.push_back(lr.mean_accuracy);
    lr_total += lr.total;
  }
  out.write("predictions.csv", pred.str());

  std::ostringstream cm;
  cm << "model,true_class";
  for (int c = 0; c < k_classes; ++c) cm << ",predicted" << c;
  cm << '\n';
  for (const auto& [name, m] : {std::pair{"qr", &qr_total}, std::pair{"lr", &lr_total}}) {
    for (int r = 0; r < k_classes; ++r) {
      cm << name << ',' << r;
      for (int c = 0; c < k_classes; ++c) cm << ',' << m->counts()(r, c);
      cm << '\n';
    }
  }
  out.write("confusion.csv", cm.str());

  auto acc_json = [](const std::vector<double>& folds, const std::vector<double>& trials,
                     const ConfusionMatrix& total) {
    Json j = mean_std(folds);
    j.erase("per_trial");
    j["per_trial_mean"] = trials;
    j["confusion"] = confusion_json(total);
    return j;
  };
  Json summary;
  summary["task"] = to_string(config.task);
  summary["feature_mode"] = config.reservoir.shots ? "sampled" : "exact";
  summary["shots"] = config.reservoir.shots ? Json(*config.reservoir.shots) : Json("exact");
  summary["qubits"] = config.reservoir.layout.num_qubits();
  summary["scale"] = config.reservoir.scale;
  summary["folds"] = config.folds;
  summary["scored_t"] = {scored.first_t(), scored.last_t()};
  summary["qr_accuracy"] = acc_json(qr_fold_acc, qr_trial_acc, qr_total);
  summary["qr_accuracy"]["ties"] = qr_ties;
  summary["lr_accuracy"] = acc_json(lr_fold_acc, lr_trial_acc, lr_total);
  return finish(config, out, summary);
}

RunResult run_sweep(const ExperimentConfig& config) {
  const auto u = gen_input(config.signal);
  const auto y = gen_narma(config.narma(), u);
  EsnSweepSpec spec = config.esn;
  spec.seed = config.seed;
  spec.workers = config.workers;
  const auto report = esn_sweep(spec, u, y, config.split());
  Writer out(config);
  out.write("sweep_summary.csv", sweep_summary_csv(report));
  out.write("sweep_radius.csv", sweep_radius_csv(report));

  Json summary;
  summary["task"] = to_string(config.task);
  summary["target"] = config.narma().name();
  summary["trials"] = report.trials;
  summary["radii"] = {report.radii.front(), report.radii.back(), report.radii.size()};
  summary["input_alphabet"] = alphabet_name(spec.input_alphabet);
  Json nodes = Json::array();
  for (const auto& n : report.nodes) {
    Json j;
    j["nodes"] = n.nodes;
    j["global_average"] = n.global_average;
    j["global_minimum"] = n.global_minimum;
    j["global_average_display"] = format_two_digits(n.global_average);
    j["global_minimum_display"] = format_two_digits(n.global_minimum);
    j["best_radius"] = n.best_radius;
    nodes.push_back(j);
  }
  summary["nodes"] = nodes;
  return finish(config, out, summary);
}

RunResult run_stationarity(const ExperimentConfig& config) {
  const auto u = gen_input(config.signal);
  const auto y = gen_narma(config.narma(), u);
  const SeriesSplit split = config.split();
  const auto feats = run_trials(config, u).front();
  Writer out(config);
  out.write("features.csv", features_to_csv(feats));
  const auto report = stationarity_report(feats.values, split.train, split.test);
  out.write("stationarity.csv", report_to_csv(report));
  out.write("stationarity.txt", report_to_text(report));
  out.write("targets_stats.csv", target_stats_csv(y, config));

  Json summary;
  summary["task"] = to_string(config.task);
  summary["target"] = config.narma().name();
  summary["variance"] = to_string(report.convention);
  summary["stationarity_gaps"] = gaps_json(report);
  return finish(config, out, summary);
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::Narma2: return "narma2";
    case Task::Narma5: return "narma5";
    case Task::Narma10: return "narma10";
    case Task::Classify: return "classify";
    case Task::EsnSweep: return "esn-sweep";
    case Task::Stationarity: return "stationarity";
  }
  return "unknown";
}

std::vector<std::string> task_names() {
  return {"narma2", "narma5", "narma10", "classify", "esn-sweep", "stationarity"};
}

Task parse_task(std::string_view name) {
  for (auto t : {Task::Narma2, Task::Narma5, Task::Narma10, Task::Classify, Task::EsnSweep, Task::Stationarity}) {
    if (to_string(t) == name) return t;
  }
  std::string valid;
  for (const auto& n : task_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw Error(ErrorKind::Parse, "unknown task '" + std::string(name) + "' (valid tasks: " + valid + ")",
              "experiment.task");
}

double default_scale(Task task) { return task == Task::Classify ? std::numbers::pi : 2.0; }

NarmaSpec ExperimentConfig::narma() const {
  switch (task) {
    case Task::Narma2: return NarmaSpec::for_order(2);
    case Task::Narma5: return NarmaSpec::for_order(5);
    case Task::Narma10: return NarmaSpec::for_order(10);
    default: return NarmaSpec::for_order(narma_order);
  }
}

SeriesSplit ExperimentConfig::split() const { return split_series(signal.length, washout, train, test); }

void ExperimentConfig::validate() const {
  if (trials < 1) throw Error(ErrorKind::Range, "trials must be positive", "experiment.trials");
  if (workers < 1) throw Error(ErrorKind::Range, "workers must be positive", "experiment.workers");
  if (washout < 0) throw Error(ErrorKind::Range, "washout must be non-negative", "split.washout");
  if (train < 1) throw Error(ErrorKind::Range, "train must be positive", "split.train");
  if (test < 1) throw Error(ErrorKind::Range, "test must be positive", "split.test");
  signal.validate();
  if (task != Task::Classify && washout + train + test > signal.length) {
    throw Error(ErrorKind::Range, "washout + train + test exceeds signal.length", "signal.length");
  }
  sensor.validate();
  if (class_washout < 0 || class_washout >= sensor.timesteps - 1) {
    throw Error(ErrorKind::Range, "classification washout leaves no scored timesteps", "classification.washout");
  }
  if (folds < 2 || folds > sensor.samples_per_class) {
    throw Error(ErrorKind::Range, "folds must lie in 2..samples_per_class", "classification.folds");
  }
  esn.validate();
  reservoir.validate();
}

ExperimentConfig parse_config(std::string_view text, const fs::path& base_dir) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Parse, "config line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_schema(tree, config_schema(), "experiment config");

  ExperimentConfig c;
  const auto task = tree.get_optional<std::string>("experiment.task");
  if (!task) throw Error(ErrorKind::Parse, "missing field experiment.task", "experiment.task");
  c.task = parse_task(trim(*task));
  c.trials = get_int(tree, "experiment.trials", c.trials);
  c.seed = get_seed(tree, "experiment.seed", c.seed);
  c.workers = get_int(tree, "experiment.workers", c.workers);
  c.output_dir = get_string(tree, "experiment.output", c.output_dir.string());

  const int qubits = get_int(tree, "reservoir.qubits", kDefaultQubits);
  const auto pairs = tree.get_optional<std::string>("reservoir.pairs");
  try {
    c.reservoir.layout = pairs ? SubsystemLayout(qubits, parse_pair_list(*pairs, "reservoir.pairs"))
                               : SubsystemLayout::adjacent(qubits);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    throw Error(e.kind(), std::string(e.what()), pairs ? "reservoir.pairs" : "reservoir.qubits");
  }
  c.reservoir.scale = get_double(tree, "reservoir.scale", default_scale(c.task));
  const std::string shots = get_string(tree, "reservoir.shots", std::to_string(kDefaultShots));
  if (shots == "exact") {
    c.reservoir.shots.reset();
  } else {
    const long long s = parse_integer(shots, "reservoir.shots");
    if (s < 1 || s > 1'000'000'000) throw Error(ErrorKind::Range, "shots must be positive or 'exact'", "reservoir.shots");
    c.reservoir.shots = static_cast<int>(s);
  }
  const auto profile_path = tree.get_optional<std::string>("reservoir.noise_profile");
  const auto preset = tree.get_optional<std::string>("reservoir.noise_preset");
  if (profile_path && preset) {
    throw Error(ErrorKind::Parse, "set only one of reservoir.noise_profile and reservoir.noise_preset",
                "reservoir.noise_profile");
  }
  if (profile_path) {
    fs::path p{std::string(trim(*profile_path))};
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (!fs::exists(p)) {
      throw Error(ErrorKind::Io, "noise profile not found: " + p.string(), "reservoir.noise_profile");
    }
    c.reservoir.profile = load_noise_profile(p);
    c.noise_source = p.lexically_normal().generic_string();
  } else {
    const std::string name = preset ? std::string(trim(*preset)) : "noiseless";
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw Error(ErrorKind::Parse, "unknown noise preset '" + name + "'", "reservoir.noise_preset");
    }
    c.reservoir.profile = preset_profile(name, qubits);
    c.noise_source = "preset:" + name;
  }

  c.washout = get_int(tree, "split.washout", c.washout);
  c.train = get_int(tree, "split.train", c.train);
  c.test = get_int(tree, "split.test", c.test);

  c.signal.length = get_int(tree, "signal.length", c.washout + c.train + c.test);
  c.signal.first_t = get_int(tree, "signal.first_t", c.signal.first_t);
  c.signal.amplitude = get_double(tree, "signal.amplitude", c.signal.amplitude);
  c.signal.alpha_bar = get_double(tree, "signal.alpha_bar", c.signal.alpha_bar);
  c.signal.beta_bar = get_double(tree, "signal.beta_bar", c.signal.beta_bar);
  c.signal.gamma_bar = get_double(tree, "signal.gamma_bar", c.signal.gamma_bar);
  c.signal.period = get_double(tree, "signal.period", c.signal.period);
  c.narma_order = narma_order_from_name(get_string(tree, "signal.narma", "narma2"));

  c.sensor.classes = get_int(tree, "classification.classes", c.sensor.classes);
  c.sensor.samples_per_class = get_int(tree, "classification.samples_per_class", c.sensor.samples_per_class);
  c.sensor.timesteps = get_int(tree, "classification.timesteps", c.sensor.timesteps);
  c.sensor.noise = get_double(tree, "classification.noise", 0.01);
  c.sensor.seed = get_seed(tree, "classification.dataset_seed", c.seed);
  c.class_washout = get_int(tree, "classification.washout", c.class_washout);
  c.folds = get_int(tree, "classification.folds", c.folds);

  const auto nodes = tree.get_optional<std::string>("esn.nodes");
  if (nodes) {
    c.esn.node_counts.clear();
    for (const auto& item : split_list(*nodes)) c.esn.node_counts.push_back(static_cast<int>(parse_integer(item, "esn.nodes")));
  }
  const double r0 = get_double(tree, "esn.radius_first", 0.01);
  const double r1 = get_double(tree, "esn.radius_last", 1.0);
  const double dr = get_double(tree, "esn.radius_step", 0.01);
  try {
    c.esn.radii = radius_grid(r0, r1, dr);
  } catch (const Error& e) {
    throw Error(ErrorKind::Range, e.what(), "esn.radius_step");
  }
  c.esn.trials = get_int(tree, "esn.trials", c.esn.trials);
  const std::string alphabet = get_string(tree, "esn.input_alphabet", "zero-one");
  if (alphabet == "zero-one") {
    c.esn.input_alphabet = InputAlphabet::ZeroOne;
  } else if (alphabet == "plus-minus") {
    c.esn.input_alphabet = InputAlphabet::PlusMinusOne;
  } else {
    throw Error(ErrorKind::Parse, "field esn.input_alphabet must be zero-one or plus-minus", "esn.input_alphabet");
  }

  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(read_text_file(path), path.parent_path());
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\ntask = " << to_string(c.task) << "\ntrials = " << c.trials << "\nseed = " << c.seed
      << "\nworkers = " << c.workers << "\noutput = " << c.output_dir.generic_string() << "\n\n";
  out << "[reservoir]\nqubits = " << c.reservoir.layout.num_qubits()
      << "\npairs = " << format_pair_list(c.reservoir.layout.pairs()) << "\nscale = " << double_text(c.reservoir.scale)
      << "\nshots = " << (c.reservoir.shots ? std::to_string(*c.reservoir.shots) : "exact") << '\n';
  if (c.noise_source.rfind("preset:", 0) == 0) {
    out << "noise_preset = " << c.noise_source.substr(7) << "\n\n";
  } else {
    out << "noise_profile = " << c.noise_source << "\n\n";
  }
  out << "[split]\nwashout = " << c.washout << "\ntrain = " << c.train << "\ntest = " << c.test << "\n\n";
  out << "[signal]\nlength = " << c.signal.length << "\nfirst_t = " << c.signal.first_t
      << "\namplitude = " << double_text(c.signal.amplitude) << "\nalpha_bar = " << double_text(c.signal.alpha_bar)
      << "\nbeta_bar = " << double_text(c.signal.beta_bar) << "\ngamma_bar = " << double_text(c.signal.gamma_bar)
      << "\nperiod = " << double_text(c.signal.period) << "\nnarma = narma" << c.narma_order << "\n\n";
  out << "[classification]\nclasses = " << c.sensor.classes << "\nsamples_per_class = " << c.sensor.samples_per_class
      << "\ntimesteps = " << c.sensor.timesteps << "\nnoise = " << double_text(c.sensor.noise)
      << "\ndataset_seed = " << c.sensor.seed << "\nwashout = " << c.class_washout << "\nfolds = " << c.folds
      << "\n\n";
  out << "[esn]\nnodes = ";
  for (std::size_t i = 0; i < c.esn.node_counts.size(); ++i) out << (i ? ", " : "") << c.esn.node_counts[i];
  const double step = c.esn.radii.size() > 1 ? (c.esn.radii.back() - c.esn.radii.front()) / static_cast<double>(c.esn.radii.size() - 1) : 0.01;
  out << "\nradius_first = " << double_text(c.esn.radii.front()) << "\nradius_last = " << double_text(c.esn.radii.back())
      << "\nradius_step = " << double_text(step) << "\ntrials = " << c.esn.trials
      << "\ninput_alphabet = " << alphabet_name(c.esn.input_alphabet) << '\n';
  return out.str();
}

std::vector<double> task_inputs(const ExperimentConfig& config) {
  if (config.task == Task::Classify) {
    return preprocess_diff(gen_synthetic_sensor(config.sensor)).series.front();
  }
  return gen_input(config.signal);
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  switch (config.task) {
    case Task::Narma2:
    case Task::Narma5:
    case Task::Narma10: return run_narma(config);
    case Task::Classify: return run_classify(config);
    case Task::EsnSweep: return run_sweep(config);
    case Task::Stationarity: return run_stationarity(config);
  }
  throw Error(ErrorKind::InvalidArgument, "unhandled task");
}

std::vector<fs::path> export_circuits(const ExperimentConfig& config, std::span<const double> inputs,
                                      const fs::path& dir) {
  if (inputs.empty()) throw Error(ErrorKind::InvalidArgument, "no inputs to export");
  const auto& layout = config.reservoir.layout;
  const int shots = config.reservoir.shots.value_or(kDefaultShots);
  const int width = std::max(4, static_cast<int>(std::to_string(inputs.size()).size()));
  std::vector<fs::path> files;
  Json list = Json::array();
  for (std::size_t t = 1; t <= inputs.size(); ++t) {
    const std::string name = "circuit_t" + pad(static_cast<int>(t), width) + ".qasm";
    write_text_file(dir / name, export_qasm(inputs.first(t), layout, config.reservoir.scale));
    files.emplace_back(name);
    Json j;
    j["t"] = t;
    j["file"] = name;
    j["gates"] = layout.num_qubits() + kGatesPerBlock * layout.num_pairs() * static_cast<int>(t);
    j["shots"] = shots;
    list.push_back(j);
  }
  Json m;
  m["artifact"] = kArtifactName;
  m["version"] = kArtifactVersion;
  m["task"] = to_string(config.task);
  m["seed"] = config.seed;
  m["qubits"] = layout.num_qubits();
  m["pairs"] = format_pair_list(layout.pairs());
  m["scale"] = config.reservoir.scale;
  m["shots"] = shots;
  m["timesteps"] = inputs.size();
  m["config"] = result_config(config);
  m["circuits"] = list;
  write_text_file(dir / "manifest.json", m.dump(2) + "\n");
  files.emplace_back("manifest.json");
  return files;
}

NumericTable parse_numeric_csv(std::string_view text) {
  NumericTable table;
  std::vector<std::vector<double>> rows_;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto cells = split_list(t);
    if (table.columns.empty()) {
      table.columns = std::move(cells);
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw Error(ErrorKind::Parse, "CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                                        " cells, expected " + std::to_string(table.columns.size()));
    }
    std::vector<double> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row.push_back(parse_double(cells[i], table.columns[i]));
    rows_.push_back(std::move(row));
  }
  if (table.columns.empty()) throw Error(ErrorKind::Parse, "CSV has no header");
  table.values.resize(static_cast<Eigen::Index>(rows_.size()), static_cast<Eigen::Index>(table.columns.size()));
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < rows_[r].size(); ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows_[r][c];
    }
  }
  return table;
}

RunResult analyze_features(const ExperimentConfig& config, const fs::path& csv) {
  NumericTable table = parse_numeric_csv(read_text_file(csv));
  Eigen::MatrixXd values = table.values;
  std::vector<std::string> names = table.columns;
  if (!names.empty() && names.front() == "t") {
    values = table.values.rightCols(table.values.cols() - 1).eval();
    names.erase(names.begin());
  }
  const SeriesSplit split = split_series(values.rows(), config.washout, config.train, config.test);
  const auto report = stationarity_report(values, split.train, split.test);
  Writer out(config);
  out.write("stationarity.csv", report_to_csv(report));
  out.write("stationarity.txt", report_to_text(report));
  Json summary;
  summary["task"] = "analyze";
  summary["input"] = csv.generic_string();
  summary["columns"] = names;
  summary["variance"] = to_string(report.convention);
  summary["stationarity_gaps"] = gaps_json(report);
  return finish(config, out, summary);
}

std::string format_two_digits(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", value);
  return buf;
}

std::string error_json(const std::exception& e) {
  Json j;
  Json err;
  if (const auto* q = dynamic_cast<const Error*>(&e)) {
    err["kind"] = to_string(q->kind());
    err["message"] = q->what();
    err["field"] = q->field();
  } else {
    err["kind"] = "internal";
    err["message"] = e.what();
    err["field"] = "";
  }
  j["error"] = err;
  return j.dump(2) + "\n";
}

}  // namespace qrc
