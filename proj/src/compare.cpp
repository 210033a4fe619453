#include "spinbath/compare.hpp"

#include <cmath>
#include <stdexcept>

namespace spinbath {

DeviationReport compare_series(const MarginalSeries& a, const MarginalSeries& b) {
  if (a.times.size() != b.times.size())
    throw std::invalid_argument("compare_series: sample counts differ");
  for (std::size_t i = 0; i < a.times.size(); ++i)
    if (std::abs(a.times[i] - b.times[i]) > 1e-9)
      throw std::invalid_argument("compare_series: sample grids differ at index " +
                                  std::to_string(i));
  if (a.times.empty()) throw std::invalid_argument("compare_series: empty series");

  DeviationReport rep;
  for (std::size_t s = 0; s < a.rows.size(); ++s) {
    double sample_max = 0.0;
    for (int m = 0; m < 3; ++m) {
      double d = 0.0;
      for (int q = 0; q < 4; ++q)
        d = std::max(d, std::abs(a.rows[s][4 * m + q] - b.rows[s][4 * m + q]));
      rep.max_dev[m] = std::max(rep.max_dev[m], d);
      rep.avg_dev[m] += d;
      sample_max = std::max(sample_max, d);
    }
    rep.avg_overall += sample_max;
    rep.max_overall = std::max(rep.max_overall, sample_max);
  }
  const double n = static_cast<double>(a.rows.size());
  for (int m = 0; m < 3; ++m) rep.avg_dev[m] /= n;
  rep.avg_overall /= n;
  return rep;
}

}  // namespace spinbath
