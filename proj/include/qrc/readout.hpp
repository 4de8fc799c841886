#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrc/engine.hpp"

namespace qrc {

// (N+1) x K readout; the last row multiplies the constant bias feature.
struct ReadoutWeights {
  Eigen::MatrixXd matrix;

  Eigen::Index feature_width() const noexcept { return matrix.rows() - 1; }
  Eigen::Index outputs() const noexcept { return matrix.cols(); }
};

struct FitOptions {
  double rcond = 1e-10;  // singular values below rcond * sigma_max are dropped
  double ridge = 0.0;    // Tikhonov term; zero gives the plain pseudoinverse
};

// [features | 1].
Eigen::MatrixXd with_bias(const Eigen::Ref<const Eigen::MatrixXd>& features);

// Minimum-norm least squares of targets on [features | 1] via SVD.
ReadoutWeights fit_regression(const Eigen::Ref<const Eigen::MatrixXd>& features,
                              const Eigen::Ref<const Eigen::MatrixXd>& targets,
                              const FitOptions& options = {});

// Rows of [features | 1] * W.
Eigen::MatrixXd predict(const ReadoutWeights& weights,
                        const Eigen::Ref<const Eigen::MatrixXd>& features);

// sum (yhat - y)^2 / sum y^2. Throws UndefinedNormalization when sum y^2 == 0.
double nmse(const Eigen::Ref<const Eigen::VectorXd>& predictions,
            const Eigen::Ref<const Eigen::VectorXd>& targets);
double nmse(const Eigen::Ref<const Eigen::VectorXd>& predictions,
            const Eigen::Ref<const Eigen::VectorXd>& targets, const Window& window);

// --- classification --------------------------------------------------------

// Unit vector e_label of length num_classes.
Eigen::VectorXd one_hot(int label, int num_classes);

// Each block holds one sample's feature rows over the scored timesteps.
ReadoutWeights fit_classifier(std::span<const Eigen::MatrixXd> blocks, std::span<const int> labels,
                              int num_classes, const FitOptions& options = {});

struct ClassPrediction {
  int label = 0;
  bool tie = false;  // another class reached the same averaged score
  Eigen::VectorXd mean_scores;
};

// Winner-takes-all: argmax over the time-averaged class scores, lowest index
// on ties.
ClassPrediction predict_class(const ReadoutWeights& weights,
                              const Eigen::Ref<const Eigen::MatrixXd>& block);
ClassPrediction winner_takes_all(const Eigen::Ref<const Eigen::VectorXd>& mean_scores);

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = 0)
      : counts_(Eigen::MatrixXi::Zero(num_classes, num_classes)) {}

  void add(int truth, int predicted) { counts_(truth, predicted) += 1; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  const Eigen::MatrixXi& counts() const noexcept { return counts_; }
  int num_classes() const noexcept { return static_cast<int>(counts_.rows()); }
  int total() const { return counts_.sum(); }
  double accuracy() const;

 private:
  Eigen::MatrixXi counts_;  // rows: true class, columns: predicted class
};

// Per class, a seeded shuffle dealt round-robin into k folds.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, int num_classes,
                                                       int k, std::uint64_t seed);

using CvPipeline = std::function<std::vector<ClassPrediction>(
    std::span<const std::size_t> train, std::span<const std::size_t> test)>;

struct CvResult {
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over folds
  std::vector<double> fold_accuracy;
  std::vector<ConfusionMatrix> fold_confusion;
  ConfusionMatrix total;
  std::vector<std::vector<std::size_t>> folds;
  int ties = 0;
};

// Throws Range if some class has fewer than k samples.
CvResult k_fold_cv(std::span<const int> labels, int num_classes, int k, std::uint64_t seed,
                   const CvPipeline& pipeline);

// --- linear baselines --------------------------------------------------------

struct LinearBaseline {
  double w = 0.0;
  double b0 = 0.0;
  double nmse = 0.0;
  Eigen::VectorXd predictions;  // NaN where the input index precedes the series
};

// yhat_{t+lead} = w u_t + b0, fitted on split.train and scored on split.test.
LinearBaseline fit_linear_baseline(std::span<const double> inputs, std::span<const double> targets,
                                   const SeriesSplit& split, int lead = 1);

// Scores each timestep of a sample as W^T u_t + b, then winner-takes-all.
CvResult fit_linear_classifier_baseline(std::span<const std::vector<double>> series,
                                        std::span<const int> labels, int num_classes,
                                        const Window& scored, int folds, std::uint64_t seed);

std::string weights_to_csv(const ReadoutWeights& weights);

}  // namespace qrc
