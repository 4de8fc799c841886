#include "qrc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qrc/error.hpp"
#include "qrc/rng.hpp"

namespace qrc {

Eigen::MatrixXd with_bias(const Eigen::Ref<const Eigen::MatrixXd>& features) {
  Eigen::MatrixXd out(features.rows(), features.cols() + 1);
  out.leftCols(features.cols()) = features;
  out.col(features.cols()).setOnes();
  return out;
}

ReadoutWeights fit_regression(const Eigen::Ref<const Eigen::MatrixXd>& features,
                              const Eigen::Ref<const Eigen::MatrixXd>& targets,
                              const FitOptions& options) {
  if (features.rows() != targets.rows()) {
    throw Error(ErrorKind::Dimension, "features have " + std::to_string(features.rows()) +
                                          " rows, targets " + std::to_string(targets.rows()));
  }
  if (features.rows() < 1) throw Error(ErrorKind::InvalidArgument, "no training samples");
  if (!features.allFinite() || !targets.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "non-finite training data");
  }
  if (options.ridge < 0.0 || options.rcond < 0.0) {
    throw Error(ErrorKind::Range, "ridge and rcond must be non-negative");
  }

  const Eigen::MatrixXd design = with_bias(features);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double cutoff = options.rcond * (sigma.size() > 0 ? sigma(0) : 0.0);
  Eigen::VectorXd filter = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) {
      filter(i) = sigma(i) / (sigma(i) * sigma(i) + options.ridge);
    }
  }
  ReadoutWeights w;
  w.matrix = svd.matrixV() * filter.asDiagonal() * (svd.matrixU().transpose() * targets);
  return w;
}

Eigen::MatrixXd predict(const ReadoutWeights& weights,
                        const Eigen::Ref<const Eigen::MatrixXd>& features) {
  if (features.cols() != weights.feature_width()) {
    throw Error(ErrorKind::Dimension, "feature width " + std::to_string(features.cols()) +
                                          " does not match readout width " +
                                          std::to_string(weights.feature_width()));
  }
  const Eigen::Index n = weights.feature_width();
  Eigen::MatrixXd out = features * weights.matrix.topRows(n);
  out.rowwise() += weights.matrix.row(n);
  return out;
}

double nmse(const Eigen::Ref<const Eigen::VectorXd>& predictions,
            const Eigen::Ref<const Eigen::VectorXd>& targets) {
  if (predictions.size() != targets.size()) {
    throw Error(ErrorKind::Dimension, "prediction and target lengths differ");
  }
  if (targets.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty NMSE window");
  const double power = targets.squaredNorm();
  if (power == 0.0) {
    throw Error(ErrorKind::UndefinedNormalization, "NMSE undefined for all-zero targets");
  }
  return (predictions - targets).squaredNorm() / power;
}

double nmse(const Eigen::Ref<const Eigen::VectorXd>& predictions,
            const Eigen::Ref<const Eigen::VectorXd>& targets, const Window& window) {
  if (window.end() > predictions.size() || window.end() > targets.size()) {
    throw Error(ErrorKind::Range, "NMSE window exceeds the series");
  }
  return nmse(predictions.segment(window.first, window.count),
              targets.segment(window.first, window.count));
}

Eigen::VectorXd one_hot(int label, int num_classes) {
  if (label < 0 || label >= num_classes) throw Error(ErrorKind::Range, "label out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(num_classes);
  v(label) = 1.0;
  return v;
}

ReadoutWeights fit_classifier(std::span<const Eigen::MatrixXd> blocks, std::span<const int> labels,
                              int num_classes, const FitOptions& options) {
  if (num_classes < 2) throw Error(ErrorKind::InvalidArgument, "need at least two classes");
  if (blocks.size() != labels.size() || blocks.empty()) {
    throw Error(ErrorKind::Dimension, "one label per sample block is required");
  }
  const Eigen::Index width = blocks.front().cols();
  Eigen::Index rows = 0;
  std::vector<int> per_class(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].cols() != width) {
      throw Error(ErrorKind::Dimension, "inconsistent feature widths across samples");
    }
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw Error(ErrorKind::Range, "label out of range");
    }
    ++per_class[static_cast<std::size_t>(labels[i])];
    rows += blocks[i].rows();
  }
  for (int k = 0; k < num_classes; ++k) {
    if (per_class[static_cast<std::size_t>(k)] == 0) {
      throw Error(ErrorKind::InvalidArgument, "class " + std::to_string(k) + " has no samples");
    }
  }

  // Stack every timestep of every sample; each row's target is its sample's one-hot vector.
  Eigen::MatrixXd x(rows, width);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rows, num_classes);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    x.middleRows(r, blocks[i].rows()) = blocks[i];
    y.block(r, labels[i], blocks[i].rows(), 1).setOnes();
    r += blocks[i].rows();
  }
  return fit_regression(x, y, options);
}

ClassPrediction winner_takes_all(const Eigen::Ref<const Eigen::VectorXd>& mean_scores) {
  if (mean_scores.size() == 0) throw Error(ErrorKind::InvalidArgument, "no class scores");
  ClassPrediction out;
  out.mean_scores = mean_scores;
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < mean_scores.size(); ++k) {
    if (mean_scores(k) > mean_scores(best)) best = k;
  }
  out.label = static_cast<int>(best);
  // Scores equal up to rounding of the averaging count as a tie.
  const double tol = 1e-12 * std::max(1.0, std::abs(mean_scores(best)));
  for (Eigen::Index k = 0; k < mean_scores.size(); ++k) {
    if (k != best && mean_scores(best) - mean_scores(k) <= tol) out.tie = true;
  }
  return out;
}

ClassPrediction predict_class(const ReadoutWeights& weights,
                              const Eigen::Ref<const Eigen::MatrixXd>& block) {
  if (block.rows() == 0) throw Error(ErrorKind::InvalidArgument, "empty sample block");
  const Eigen::MatrixXd scores = predict(weights, block);
  return winner_takes_all(scores.colwise().mean().transpose());
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (counts_.size() == 0) {
    counts_ = other.counts_;
  } else {
    counts_ += other.counts_;
  }
  return *this;
}

double ConfusionMatrix::accuracy() const {
  const int n = total();
  return n == 0 ? 0.0 : static_cast<double>(counts_.trace()) / n;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, int num_classes,
                                                       int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::Range, "cross-validation needs k >= 2");
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) throw Error(ErrorKind::Range, "label out of range");
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (int c = 0; c < num_classes; ++c) {
    auto& members = by_class[static_cast<std::size_t>(c)];
    if (static_cast<int>(members.size()) < k) {
      throw Error(ErrorKind::Range, "class " + std::to_string(c) + " has " +
                                        std::to_string(members.size()) + " samples, fewer than " +
                                        std::to_string(k) + " folds");
    }
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(c)});
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j = 0; j < members.size(); ++j) {
      folds[j % static_cast<std::size_t>(k)].push_back(members[j]);
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

CvResult k_fold_cv(std::span<const int> labels, int num_classes, int k, std::uint64_t seed,
                   const CvPipeline& pipeline) {
  CvResult result;
  result.folds = stratified_folds(labels, num_classes, k, seed);
  result.total = ConfusionMatrix(num_classes);
  for (std::size_t f = 0; f < result.folds.size(); ++f) {
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < result.folds.size(); ++g) {
      if (g != f) train.insert(train.end(), result.folds[g].begin(), result.folds[g].end());
    }
    std::sort(train.begin(), train.end());
    const auto& test = result.folds[f];
    const auto predictions = pipeline(train, test);
    if (predictions.size() != test.size()) {
      throw Error(ErrorKind::Dimension, "pipeline returned the wrong number of predictions");
    }
    ConfusionMatrix cm(num_classes);
    for (std::size_t i = 0; i < test.size(); ++i) {
      cm.add(labels[test[i]], predictions[i].label);
      result.ties += predictions[i].tie ? 1 : 0;
    }
    result.fold_accuracy.push_back(cm.accuracy());
    result.total += cm;
    result.fold_confusion.push_back(std::move(cm));
  }
  const double n = static_cast<double>(result.fold_accuracy.size());
  result.mean_accuracy =
      std::accumulate(result.fold_accuracy.begin(), result.fold_accuracy.end(), 0.0) / n;
  double var = 0.0;
  for (double a : result.fold_accuracy) var += (a - result.mean_accuracy) * (a - result.mean_accuracy);
  result.std_accuracy = std::sqrt(var / n);
  return result;
}

LinearBaseline fit_linear_baseline(std::span<const double> inputs, std::span<const double> targets,
                                   const SeriesSplit& split, int lead) {
  if (inputs.size() != targets.size()) {
    throw Error(ErrorKind::Dimension, "inputs and targets must be aligned");
  }
  if (lead < 0) throw Error(ErrorKind::Range, "lead must be non-negative");
  const auto len = static_cast<Eigen::Index>(targets.size());
  if (split.test.end() > len || split.train.end() > len) {
    throw Error(ErrorKind::Range, "split exceeds the series");
  }
  if (split.train.first < lead || split.test.first < lead) {
    throw Error(ErrorKind::Range, "window starts before the first usable input");
  }
  const Eigen::Map<const Eigen::VectorXd> u(inputs.data(), len);
  const Eigen::Map<const Eigen::VectorXd> y(targets.data(), len);

  LinearBaseline out;
  const auto weights = fit_regression(u.segment(split.train.first - lead, split.train.count),
                                      y.segment(split.train.first, split.train.count));
  out.w = weights.matrix(0, 0);
  out.b0 = weights.matrix(1, 0);
  out.predictions = Eigen::VectorXd::Constant(len, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index t = lead; t < len; ++t) out.predictions(t) = out.w * u(t - lead) + out.b0;
  out.nmse = nmse(out.predictions, y, split.test);
  return out;
}

CvResult fit_linear_classifier_baseline(std::span<const std::vector<double>> series,
                                        std::span<const int> labels, int num_classes,
                                        const Window& scored, int folds, std::uint64_t seed) {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(series.size());
  for (const auto& s : series) {
    if (scored.end() > static_cast<Eigen::Index>(s.size())) {
      throw Error(ErrorKind::Range, "scored window exceeds a sample series");
    }
    blocks.emplace_back(Eigen::Map<const Eigen::VectorXd>(s.data() + scored.first, scored.count));
  }
  return k_fold_cv(labels, num_classes, folds, seed,
                   [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
                     std::vector<Eigen::MatrixXd> train_blocks;
                     std::vector<int> train_labels;
                     for (auto i : train) {
                       train_blocks.push_back(blocks[i]);
                       train_labels.push_back(labels[i]);
                     }
                     const auto w = fit_classifier(train_blocks, train_labels, num_classes);
                     std::vector<ClassPrediction> out;
                     for (auto i : test) out.push_back(predict_class(w, blocks[i]));
                     return out;
                   });
}

std::string weights_to_csv(const ReadoutWeights& weights) {
  std::ostringstream out;
  out.precision(17);
  out << "feature";
  for (Eigen::Index k = 0; k < weights.outputs(); ++k) out << ",w" << k;
  out << '\n';
  for (Eigen::Index r = 0; r < weights.matrix.rows(); ++r) {
    if (r + 1 == weights.matrix.rows()) {
      out << "bias";
    } else {
      out << 'h' << r;
    }
    for (Eigen::Index k = 0; k < weights.outputs(); ++k) out << ',' << weights.matrix(r, k);
    out << '\n';
  }
  return out.str();
}

}  // namespace qrc
