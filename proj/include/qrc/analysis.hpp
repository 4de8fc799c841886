#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qrc/engine.hpp"

namespace qrc {

enum class VarianceConvention { Population, Sample };

std::string_view to_string(VarianceConvention convention);

struct ChannelStats {
  double mean_train = 0.0;
  double mean_test = 0.0;
  double var_train = 0.0;
  double var_test = 0.0;
  double abs_mean_train = 0.0;  // |mean|, the presentation used for per-qubit mean plots
  double abs_mean_test = 0.0;
  double abs_mean_gap = 0.0;    // |mean_train - mean_test|
  double var_ratio = 0.0;       // var_test / var_train; 1 when both vanish, inf when only var_train does
};

struct StationarityReport {
  std::vector<ChannelStats> channels;
  Window train;
  Window test;
  VarianceConvention convention = VarianceConvention::Population;
};

// Per-column statistics over the two windows. Throws InvalidArgument for an
// empty window, Range when a window exceeds the series or the windows overlap.
StationarityReport stationarity_report(const Eigen::Ref<const Eigen::MatrixXd>& series,
                                       const Window& train, const Window& test,
                                       VarianceConvention convention = VarianceConvention::Population);
StationarityReport stationarity_report(std::span<const double> series, const Window& train,
                                       const Window& test,
                                       VarianceConvention convention = VarianceConvention::Population);

struct ChannelGap {
  int channel = 0;
  double mean_gap = 0.0;
  double log_var_gap = 0.0;  // |log var_train - log var_test|
};

// Descending by mean gap, then by log-variance gap; ties keep channel order.
std::vector<ChannelGap> gap_summary(const StationarityReport& report);

// The two readings of "training phase" for target statistics: rows after the
// washout only, or the washout rows as well.
enum class TrainWindowConvention { ExcludeWashout, IncludeWashout };

std::string_view to_string(TrainWindowConvention convention);

struct ConventionStats {
  TrainWindowConvention window = TrainWindowConvention::ExcludeWashout;
  VarianceConvention variance = VarianceConvention::Population;
  StationarityReport report;
};

// All four window/variance combinations for one target sequence.
std::vector<ConventionStats> target_statistics(std::span<const double> targets, Eigen::Index washout,
                                               Eigen::Index train, Eigen::Index test);

std::string report_to_csv(const StationarityReport& report);
std::string report_to_text(const StationarityReport& report);

}  // namespace qrc
