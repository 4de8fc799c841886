#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "qrc/benchmarks.hpp"
#include "qrc/readout.hpp"
#include "test_util.hpp"

using namespace qrc;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, Rng& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

double training_mse(const Eigen::MatrixXd& design, const Eigen::MatrixXd& w, const Eigen::MatrixXd& y) {
  return (design * w - y).squaredNorm();
}

// Class-dependent constant blocks plus a little jitter.
std::vector<Eigen::MatrixXd> separable_blocks(const std::vector<int>& labels, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 0.01);
  std::vector<Eigen::MatrixXd> blocks;
  for (int label : labels) {
    Eigen::MatrixXd b(5, 3);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = nd(rng);
    b.col(label % 3).array() += 1.0;
    blocks.push_back(b);
  }
  return blocks;
}

std::vector<int> balanced_labels(int classes, int per_class) {
  std::vector<int> labels;
  for (int c = 0; c < classes; ++c)
    for (int s = 0; s < per_class; ++s) labels.push_back(c);
  return labels;
}

}  // namespace

TEST(FitRegression, TwoPointClosedForm) {
  Eigen::MatrixXd x(2, 1);
  x << 1, 2;
  Eigen::VectorXd y(2);
  y << 3, 5;
  const auto w = fit_regression(x, y);
  ASSERT_EQ(w.matrix.rows(), 2);
  EXPECT_NEAR(w.matrix(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(w.matrix(1, 0), 1.0, 1e-12);
}

TEST(FitRegression, ZeroTargetsGiveZeroWeights) {
  Rng rng(1);
  const auto x = gaussian(10, 3, rng);
  const auto w = fit_regression(x, Eigen::VectorXd::Zero(10));
  EXPECT_EQ(w.matrix.cwiseAbs().maxCoeff(), 0.0);
}

TEST(FitRegression, DuplicatedColumns) {
  Rng rng(2);
  const auto x = gaussian(20, 3, rng);
  const Eigen::VectorXd y = gaussian(20, 1, rng);
  Eigen::MatrixXd dup(20, 6);
  dup << x, x;
  const auto a = predict(fit_regression(x, y), x);
  const auto b = predict(fit_regression(dup, y), dup);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FitRegression, InterpolatesWhenUnderdetermined) {
  Rng rng(3);
  const auto x = gaussian(4, 5, rng);
  const Eigen::VectorXd y = gaussian(4, 1, rng);
  EXPECT_LT((predict(fit_regression(x, y), x) - y).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitRegression, Errors) {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  EXPECT_EQ(kind_of([&] { fit_regression(x, Eigen::VectorXd::Zero(2)); }), ErrorKind::Dimension);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
  y(1) = std::nan("");
  EXPECT_EQ(kind_of([&] { fit_regression(x, y); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { fit_regression(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)); }),
            ErrorKind::InvalidArgument);
}

TEST(FitRegression, PerturbationNeverHelps) {
  Rng rng(4);
  for (int problem = 0; problem < 100; ++problem) {
    const int rows = 10 + problem % 30;
    const int cols = 1 + problem % 6;
    const auto x = gaussian(rows, cols, rng);
    const Eigen::VectorXd y = gaussian(rows, 1, rng);
    const auto w = fit_regression(x, y);
    const Eigen::MatrixXd design = with_bias(x);
    const double best = training_mse(design, w.matrix, y);
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd delta = gaussian(cols + 1, 1, rng);
      delta *= 1e-3 / delta.norm();
      ASSERT_GE(training_mse(design, w.matrix + delta, y), best - 1e-12);
    }
  }
}

TEST(FitRegression, AgreesWithNormalEquations) {
  Rng rng(5);
  for (int problem = 0; problem < 20; ++problem) {
    const auto x = gaussian(50, 4, rng);
    const Eigen::VectorXd y = gaussian(50, 1, rng);
    const Eigen::MatrixXd a = with_bias(x);
    const auto w = fit_regression(x, y);
    double previous = INFINITY;
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const Eigen::MatrixXd gram = a.transpose() * a + eps * Eigen::MatrixXd::Identity(5, 5);
      const Eigen::VectorXd ne = gram.ldlt().solve(a.transpose() * y);
      const double gap = (ne - w.matrix.col(0)).cwiseAbs().maxCoeff();
      EXPECT_LE(gap, previous + 1e-15);
      previous = gap;
    }
    EXPECT_LT(previous, 1e-6);
  }
}

TEST(FitRegression, RidgeMatchesTikhonov) {
  Rng rng(6);
  const auto x = gaussian(30, 3, rng);
  const Eigen::VectorXd y = gaussian(30, 1, rng);
  const Eigen::MatrixXd a = with_bias(x);
  const double ridge = 0.5;
  const Eigen::VectorXd expect =
      (a.transpose() * a + ridge * Eigen::MatrixXd::Identity(4, 4)).ldlt().solve(a.transpose() * y);
  const auto w = fit_regression(x, y, {1e-10, ridge});
  EXPECT_LT((w.matrix.col(0) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Predict, ZeroAndBiasOnlyWeights) {
  Rng rng(7);
  const auto x = gaussian(6, 3, rng);
  ReadoutWeights w{Eigen::MatrixXd::Zero(4, 1)};
  EXPECT_EQ(predict(w, x).cwiseAbs().maxCoeff(), 0.0);
  w.matrix(3, 0) = 2.5;
  EXPECT_TRUE((predict(w, x).array() == 2.5).all());
  EXPECT_EQ(kind_of([&] { predict(w, gaussian(6, 2, rng)); }), ErrorKind::Dimension);
}

TEST(Nmse, Examples) {
  Eigen::VectorXd y(4);
  y << 0.1, -0.4, 0.3, 0.2;
  EXPECT_EQ(nmse(y, y), 0.0);
  EXPECT_DOUBLE_EQ(nmse(Eigen::VectorXd::Zero(4), y), 1.0);
  EXPECT_DOUBLE_EQ(nmse(2.0 * y, y), 1.0);
  EXPECT_EQ(kind_of([] { nmse(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(3)); }),
            ErrorKind::UndefinedNormalization);
}

TEST(Nmse, WindowedSum) {
  Eigen::VectorXd y(5), p(5);
  y << 9, 9, 1, 2, 9;
  p << 0, 0, 2, 2, 0;
  EXPECT_DOUBLE_EQ(nmse(p, y, Window{2, 2}), 1.0 / 5.0);
  EXPECT_EQ(kind_of([&] { nmse(p, y, Window{4, 2}); }), ErrorKind::Range);
}

TEST(Nmse, ScaleInvariant) {
  Rng rng(8);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd y = gaussian(12, 1, rng);
    const Eigen::VectorXd p = gaussian(12, 1, rng);
    for (double c : {-3.0, 1e-3, 7.5}) EXPECT_NEAR(nmse(c * p, c * y), nmse(p, y), 1e-12 * nmse(p, y));
  }
}

TEST(OneHot, TwoClasses) {
  EXPECT_EQ(one_hot(0, 2), Eigen::Vector2d(1, 0));
  EXPECT_EQ(one_hot(1, 2), Eigen::Vector2d(0, 1));
  EXPECT_EQ(kind_of([] { one_hot(2, 2); }), ErrorKind::Range);
}

TEST(FitClassifier, StackedTargetsAreOneHot) {
  // Each block's rows regress onto the sample's one-hot vector, which a
  // bias-only design reproduces as the class frequencies.
  std::vector<Eigen::MatrixXd> blocks = {Eigen::MatrixXd::Zero(3, 1), Eigen::MatrixXd::Zero(1, 1)};
  const std::vector<int> labels = {0, 1};
  const auto w = fit_classifier(blocks, labels, 2);
  EXPECT_NEAR(w.matrix(1, 0), 0.75, 1e-12);
  EXPECT_NEAR(w.matrix(1, 1), 0.25, 1e-12);
}

TEST(FitClassifier, SeparableConstantFeatures) {
  std::vector<Eigen::MatrixXd> blocks = {Eigen::MatrixXd::Constant(4, 1, -1.0),
                                         Eigen::MatrixXd::Constant(4, 1, 1.0)};
  const std::vector<int> labels = {0, 1};
  const auto w = fit_classifier(blocks, labels, 2);
  EXPECT_EQ(predict_class(w, blocks[0]).label, 0);
  EXPECT_EQ(predict_class(w, blocks[1]).label, 1);
  EXPECT_FALSE(predict_class(w, blocks[0]).tie);
}

TEST(FitClassifier, IdenticalFeaturesTie) {
  std::vector<Eigen::MatrixXd> blocks(4, Eigen::MatrixXd::Constant(3, 2, 0.3));
  const std::vector<int> labels = {0, 1, 0, 1};
  const auto w = fit_classifier(blocks, labels, 2);
  const auto p = predict_class(w, blocks[0]);
  EXPECT_TRUE(p.tie);
  EXPECT_EQ(p.label, 0);
  EXPECT_NEAR(p.mean_scores(0), 0.5, 1e-12);
}

TEST(FitClassifier, Errors) {
  std::vector<Eigen::MatrixXd> blocks = {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 3)};
  const std::vector<int> labels = {0, 1};
  EXPECT_EQ(kind_of([&] { fit_classifier(blocks, labels, 2); }), ErrorKind::Dimension);
  blocks[1] = Eigen::MatrixXd::Zero(2, 2);
  const std::vector<int> one_class = {0, 0};
  EXPECT_EQ(kind_of([&] { fit_classifier(blocks, one_class, 2); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { fit_classifier(blocks, labels, 1); }), ErrorKind::InvalidArgument);
}

TEST(WinnerTakesAll, Examples) {
  const auto p = winner_takes_all(Eigen::Vector3d(0.2, 0.7, 0.1));
  EXPECT_EQ(p.label, 1);
  EXPECT_FALSE(p.tie);
  const auto t = winner_takes_all(Eigen::Vector3d(0.4, 0.1, 0.4));
  EXPECT_EQ(t.label, 0);
  EXPECT_TRUE(t.tie);
}

TEST(PredictClass, SingleTimestepBlock) {
  ReadoutWeights w{Eigen::MatrixXd::Zero(2, 3)};
  w.matrix.row(0) << 1.0, -1.0, 0.5;
  Eigen::MatrixXd block(1, 1);
  block << -2.0;
  EXPECT_EQ(predict_class(w, block).label, 1);
}

TEST(PredictClass, MatchesScoreAveragingOracle) {
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    ReadoutWeights w{gaussian(4, 3, rng)};
    const auto block = gaussian(7, 3, rng);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (Eigen::Index t = 0; t < block.rows(); ++t) {
      for (int c = 0; c < 3; ++c) {
        double s = w.matrix(3, c);
        for (int j = 0; j < 3; ++j) s += block(t, j) * w.matrix(j, c);
        mean(c) += s / 7.0;
      }
    }
    Eigen::Index best;
    mean.maxCoeff(&best);
    EXPECT_EQ(predict_class(w, block).label, best);
  }
}

TEST(PredictClass, ArgmaxInvariance) {
  Rng rng(10);
  for (int k = 0; k < 50; ++k) {
    ReadoutWeights w{gaussian(3, 4, rng)};
    const auto block = gaussian(5, 2, rng);
    const int label = predict_class(w, block).label;
    ReadoutWeights scaled{w.matrix * 3.7};
    EXPECT_EQ(predict_class(scaled, block).label, label);
    ReadoutWeights shifted = w;
    shifted.matrix.row(2).array() += 1.3;  // same bias shift for every class
    EXPECT_EQ(predict_class(shifted, block).label, label);
  }
}

TEST(Confusion, RowSumsAndAccuracy) {
  ConfusionMatrix cm(3);
  cm.add(0, 0);
  cm.add(0, 1);
  cm.add(2, 2);
  EXPECT_EQ(cm.counts().row(0).sum(), 2);
  EXPECT_EQ(cm.total(), 3);
  EXPECT_DOUBLE_EQ(cm.accuracy(), 2.0 / 3.0);
  ConfusionMatrix sum;
  sum += cm;
  sum += cm;
  EXPECT_EQ(sum.counts()(0, 1), 2);
}

TEST(StratifiedFolds, SixtySamplesTenFolds) {
  const auto labels = balanced_labels(3, 20);
  const auto folds = stratified_folds(labels, 3, 10, 7);
  ASSERT_EQ(folds.size(), 10U);
  std::multiset<std::size_t> seen;
  for (const auto& f : folds) {
    EXPECT_EQ(f.size(), 6U);
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(std::count_if(f.begin(), f.end(), [&](std::size_t i) { return labels[i] == c; }), 2);
    }
    seen.insert(f.begin(), f.end());
  }
  ASSERT_EQ(seen.size(), labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) EXPECT_EQ(seen.count(i), 1U);
}

TEST(StratifiedFolds, PartitionProperty) {
  Rng rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const int classes = 2 + rep % 3;
    const int k = 2 + rep % 5;
    std::vector<int> labels;
    for (int c = 0; c < classes; ++c)
      for (int s = 0; s < k + static_cast<int>(rng() % 7); ++s) labels.push_back(c);
    std::shuffle(labels.begin(), labels.end(), rng);
    const auto folds = stratified_folds(labels, classes, k, rep);
    std::vector<int> hits(labels.size(), 0);
    for (const auto& f : folds)
      for (auto i : f) ++hits[i];
    EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    EXPECT_EQ(folds, stratified_folds(labels, classes, k, rep));
  }
}

TEST(StratifiedFolds, ClassTooSmall) {
  const auto labels = balanced_labels(2, 3);
  EXPECT_EQ(kind_of([&] { stratified_folds(labels, 2, 4, 0); }), ErrorKind::Range);
  EXPECT_EQ(kind_of([&] { stratified_folds(labels, 2, 1, 0); }), ErrorKind::Range);
}

TEST(KFoldCv, SeparableDataIsPerfect) {
  Rng rng(12);
  const auto labels = balanced_labels(3, 20);
  const auto blocks = separable_blocks(labels, rng);
  const auto result = k_fold_cv(labels, 3, 10, 1, [&](auto train, auto test) {
    std::vector<Eigen::MatrixXd> tb;
    std::vector<int> tl;
    for (auto i : train) {
      tb.push_back(blocks[i]);
      tl.push_back(labels[i]);
    }
    const auto w = fit_classifier(tb, tl, 3);
    std::vector<ClassPrediction> out;
    for (auto i : test) out.push_back(predict_class(w, blocks[i]));
    return out;
  });
  EXPECT_EQ(result.mean_accuracy, 1.0);
  EXPECT_EQ(result.std_accuracy, 0.0);
  EXPECT_EQ(result.total.total(), 60);
  EXPECT_EQ(result.fold_confusion.size(), 10U);
}

TEST(KFoldCv, AlwaysClassZero) {
  const auto labels = balanced_labels(3, 20);
  const auto result = k_fold_cv(labels, 3, 10, 1, [](auto, auto test) {
    return std::vector<ClassPrediction>(test.size(), ClassPrediction{});
  });
  EXPECT_NEAR(result.mean_accuracy, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(result.total.counts().col(0).sum(), 60);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(result.total.counts().row(c).sum(), 20);
}

TEST(LinearBaseline, ExactLinearTarget) {
  std::vector<double> u(30), y(30, 0.0);
  for (int t = 0; t < 30; ++t) u[t] = std::sin(0.3 * t);
  for (int t = 0; t + 1 < 30; ++t) y[t + 1] = 2.0 * u[t] + 3.0;
  const auto fit = fit_linear_baseline(u, y, split_series(30, 2, 20, 8), 1);
  EXPECT_NEAR(fit.w, 2.0, 1e-12);
  EXPECT_NEAR(fit.b0, 3.0, 1e-12);
  EXPECT_NEAR(fit.nmse, 0.0, 1e-20);
  EXPECT_TRUE(std::isnan(fit.predictions(0)));
}

TEST(LinearBaseline, ConstantInputUsesMinimumNorm) {
  std::vector<double> u(20, 0.5), y(20);
  for (int t = 0; t < 20; ++t) y[t] = 1.0 + 0.01 * t;
  const auto fit = fit_linear_baseline(u, y, split_series(20, 0, 15, 5), 0);
  EXPECT_TRUE(std::isfinite(fit.w));
  EXPECT_TRUE(std::isfinite(fit.nmse));
  // The minimum-norm solution is parallel to the design row (0.5, 1).
  EXPECT_NEAR(fit.w * 0.5 + fit.b0, 1.07, 1e-12);
  EXPECT_NEAR(fit.w, 0.5 * fit.b0, 1e-12);
}

TEST(LinearBaseline, NarmaReferenceValues) {
  const auto u = gen_input(InputSignalSpec{});
  const auto split = split_series(100, 10, 70, 20);
  const auto n2 = fit_linear_baseline(u, gen_narma(NarmaSpec::narma2(), u), split, 0);
  const auto n10 = fit_linear_baseline(u, gen_narma(NarmaSpec::general(10), u), split, 0);
  EXPECT_NEAR(n2.nmse, 1.8e-5, 0.1e-5);
  EXPECT_GT(n10.nmse, 9.7e-4 / 2);
  EXPECT_LT(n10.nmse, 9.7e-4 * 2);
}

// With a scalar input the least-squares score of a middle class is flat, so
// separability by class mean is a two-class statement.
TEST(LinearClassifierBaseline, SeparableMeans) {
  std::vector<std::vector<double>> series;
  const auto labels = balanced_labels(2, 10);
  Rng rng(13);
  std::normal_distribution<double> nd(0.0, 0.05);
  for (int label : labels) {
    std::vector<double> s(30);
    for (auto& v : s) v = label + nd(rng);
    series.push_back(s);
  }
  const auto r = fit_linear_classifier_baseline(series, labels, 2, Window{5, 20}, 5, 3);
  EXPECT_EQ(r.mean_accuracy, 1.0);
}

TEST(LinearClassifierBaseline, ShuffledLabelsAtChance) {
  auto labels = balanced_labels(3, 40);
  std::vector<std::vector<double>> series;
  Rng rng(14);
  std::normal_distribution<double> nd;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::vector<double> s(20);
    for (auto& v : s) v = nd(rng);
    series.push_back(s);
  }
  std::shuffle(labels.begin(), labels.end(), rng);
  const auto r = fit_linear_classifier_baseline(series, labels, 3, Window{0, 20}, 10, 4);
  const double n = static_cast<double>(labels.size());
  const double sigma = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n);
  EXPECT_NEAR(r.total.accuracy(), 1.0 / 3.0, 3 * sigma);
}

TEST(WeightsCsv, Layout) {
  ReadoutWeights w{Eigen::MatrixXd(3, 2)};
  w.matrix << 1, 2, 3, 4, 0.5, -0.25;
  EXPECT_EQ(weights_to_csv(w), "feature,w0,w1\nh0,1,2\nh1,3,4\nbias,0.5,-0.25\n");
}
