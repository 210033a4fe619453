#pragma once

#include <array>

#include "spinbath/csv_io.hpp"

namespace spinbath {

// Deviations between two runs on the twelve reported marginal quantities
// (diagnostic columns are ignored). Per marginal, the deviation at a sample
// is the max over its four quantities.
struct DeviationReport {
  std::array<double, 3> max_dev{};  // per marginal, max over time
  std::array<double, 3> avg_dev{};  // per marginal, time-averaged
  double max_overall = 0.0;
  double avg_overall = 0.0;  // mean over samples of the max across marginals
};

// Requires matching sample grids (same length, |t_a - t_b| <= 1e-9).
DeviationReport compare_series(const MarginalSeries& a, const MarginalSeries& b);

}  // namespace spinbath
