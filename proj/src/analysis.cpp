#include "qrc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qrc/error.hpp"

namespace qrc {

namespace {

void check_window(const Window& w, Eigen::Index length, const char* name) {
  if (w.count <= 0) throw Error(ErrorKind::InvalidArgument, std::string(name) + " window is empty");
  if (w.first < 0 || w.end() > length) {
    throw Error(ErrorKind::Range, std::string(name) + " window exceeds the series");
  }
}

double variance(const Eigen::Ref<const Eigen::VectorXd>& x, double mean, VarianceConvention c) {
  const double ss = (x.array() - mean).square().sum();
  if (c == VarianceConvention::Population) return ss / static_cast<double>(x.size());
  if (x.size() < 2) throw Error(ErrorKind::InvalidArgument, "sample variance needs two points");
  return ss / static_cast<double>(x.size() - 1);
}

double log_var_gap(double a, double b) {
  if (a == 0.0 && b == 0.0) return 0.0;
  if (a == 0.0 || b == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(std::log(a) - std::log(b));
}

}  // namespace

std::string_view to_string(VarianceConvention convention) {
  return convention == VarianceConvention::Population ? "population" : "sample";
}

std::string_view to_string(TrainWindowConvention convention) {
  return convention == TrainWindowConvention::ExcludeWashout ? "exclude-washout" : "include-washout";
}

StationarityReport stationarity_report(const Eigen::Ref<const Eigen::MatrixXd>& series,
                                       const Window& train, const Window& test,
                                       VarianceConvention convention) {
  check_window(train, series.rows(), "training");
  check_window(test, series.rows(), "testing");
  if (train.first < test.end() && test.first < train.end()) {
    throw Error(ErrorKind::Range, "training and testing windows overlap");
  }
  StationarityReport report;
  report.train = train;
  report.test = test;
  report.convention = convention;
  for (Eigen::Index c = 0; c < series.cols(); ++c) {
    const Eigen::VectorXd a = series.col(c).segment(train.first, train.count);
    const Eigen::VectorXd b = series.col(c).segment(test.first, test.count);
    ChannelStats s;
    s.mean_train = a.mean();
    s.mean_test = b.mean();
    s.var_train = variance(a, s.mean_train, convention);
    s.var_test = variance(b, s.mean_test, convention);
    s.abs_mean_train = std::abs(s.mean_train);
    s.abs_mean_test = std::abs(s.mean_test);
    s.abs_mean_gap = std::abs(s.mean_train - s.mean_test);
    if (s.var_train > 0.0) {
      s.var_ratio = s.var_test / s.var_train;
    } else {
      s.var_ratio = s.var_test == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    report.channels.push_back(s);
  }
  return report;
}

StationarityReport stationarity_report(std::span<const double> series, const Window& train,
                                       const Window& test, VarianceConvention convention) {
  const Eigen::Map<const Eigen::VectorXd> col(series.data(), static_cast<Eigen::Index>(series.size()));
  return stationarity_report(Eigen::MatrixXd(col), train, test, convention);
}

std::vector<ChannelGap> gap_summary(const StationarityReport& report) {
  std::vector<ChannelGap> gaps;
  for (std::size_t c = 0; c < report.channels.size(); ++c) {
    const auto& s = report.channels[c];
    gaps.push_back({static_cast<int>(c), s.abs_mean_gap, log_var_gap(s.var_train, s.var_test)});
  }
  std::stable_sort(gaps.begin(), gaps.end(), [](const ChannelGap& a, const ChannelGap& b) {
    if (a.mean_gap != b.mean_gap) return a.mean_gap > b.mean_gap;
    return a.log_var_gap > b.log_var_gap;
  });
  return gaps;
}

std::vector<ConventionStats> target_statistics(std::span<const double> targets, Eigen::Index washout,
                                               Eigen::Index train, Eigen::Index test) {
  const SeriesSplit split = split_series(static_cast<Eigen::Index>(targets.size()), washout, train, test);
  std::vector<ConventionStats> out;
  for (auto wc : {TrainWindowConvention::ExcludeWashout, TrainWindowConvention::IncludeWashout}) {
    const Window tw = wc == TrainWindowConvention::ExcludeWashout ? split.train
                                                                  : Window{0, washout + train};
    for (auto vc : {VarianceConvention::Population, VarianceConvention::Sample}) {
      out.push_back({wc, vc, stationarity_report(targets, tw, split.test, vc)});
    }
  }
  return out;
}

std::string report_to_csv(const StationarityReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "# train=" << report.train.first_t() << ".." << report.train.last_t()
      << " test=" << report.test.first_t() << ".." << report.test.last_t()
      << " variance=" << to_string(report.convention) << '\n';
  out << "channel,mean_train,mean_test,abs_mean_train,abs_mean_test,var_train,var_test,abs_mean_gap,"
         "var_ratio\n";
  for (std::size_t c = 0; c < report.channels.size(); ++c) {
    const auto& s = report.channels[c];
    out << c << ',' << s.mean_train << ',' << s.mean_test << ',' << s.abs_mean_train << ','
        << s.abs_mean_test << ',' << s.var_train << ',' << s.var_test << ',' << s.abs_mean_gap << ','
        << s.var_ratio << '\n';
  }
  return out.str();
}

std::string report_to_text(const StationarityReport& report) {
  std::ostringstream out;
  out << "training t=" << report.train.first_t() << ".." << report.train.last_t() << ", testing t="
      << report.test.first_t() << ".." << report.test.last_t() << ", "
      << to_string(report.convention) << " variance\n";
  char line[160];
  std::snprintf(line, sizeof line, "%7s  %12s  %12s  %12s  %12s  %12s  %10s\n", "channel", "mean(train)",
                "mean(test)", "var(train)", "var(test)", "|gap|", "var ratio");
  out << line;
  for (std::size_t c = 0; c < report.channels.size(); ++c) {
    const auto& s = report.channels[c];
    std::snprintf(line, sizeof line, "%7zu  %12.4e  %12.4e  %12.4e  %12.4e  %12.4e  %10.4g\n", c,
                  s.mean_train, s.mean_test, s.var_train, s.var_test, s.abs_mean_gap, s.var_ratio);
    out << line;
  }
  return out.str();
}

}  // namespace qrc
