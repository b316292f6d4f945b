#pragma once

// Summary CSV and a dependency-free SVG regret plot.

#include <string>
#include <string_view>
#include <vector>

namespace klmdp::cli {

inline constexpr std::string_view kSummaryHeader =
    "t,mean_regret_hindsight,std_regret_hindsight,mean_regret_pool,std_regret_pool";
inline constexpr std::string_view kTraceHeader = "t,state,state_cost,control_cost,cum_cost,phase";

struct SummaryTable {
  std::vector<double> t;
  std::vector<double> mean_hindsight;
  std::vector<double> std_hindsight;
  std::vector<double> mean_pool;
  std::vector<double> std_pool;
};

/// Parses a summary.csv; the header must match kSummaryHeader exactly.
SummaryTable parse_summary_csv(std::string_view text);

struct PlotSeries {
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::string label;
};

/// Mean polyline over a mean +- 1 sd band, with labeled axes and ticks.
std::string render_regret_svg(const PlotSeries& series);

}  // namespace klmdp::cli
