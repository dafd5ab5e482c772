#pragma once

#include <string>
#include <vector>

#include "threadsumm/metrics.hpp"

namespace threadsumm {

// Scatter of represented / not-represented sentences by source index
// (one circle per sentence).
std::string position_scatter_svg(const PositionReport& report);

// Horizontal bar chart, one bar per (label, value in [0,1]).
std::string coverage_bar_svg(const std::vector<std::pair<std::string, double>>& bars);

// One row per run, one column per metric; missing metrics stay blank.
std::string comparison_csv(const std::vector<std::string>& metric_names,
                           const std::vector<std::pair<std::string,
                                                       std::vector<std::string>>>& rows);

std::string csv_escape(const std::string& field);

}  // namespace threadsumm
