#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spinbath/exact_propagator.hpp"

namespace spinbath {

// The quantities reported per sample: for each qubit marginal rho00, rho11,
// Re rho01, Im rho01, then min eigenvalue and trace of the 8x8 density.
inline constexpr int kSeriesColumns = 14;

extern const std::array<const char*, kSeriesColumns> kSeriesColumnNames;

struct MarginalSeries {
  std::vector<double> times;
  std::vector<std::array<double, kSeriesColumns>> rows;
};

MarginalSeries to_marginal_series(const TimeSeries& series);

// CSV layout: commented manifest preamble (`# key = value`), then a header
// row `t,<columns>`, then one row per sample, %.17g, '.' decimal.
void write_series_csv(std::ostream& out, const MarginalSeries& series,
                      const std::vector<std::pair<std::string, std::string>>& manifest,
                      const std::vector<std::string>& notes = {});
void write_series_csv(const std::string& path, const MarginalSeries& series,
                      const std::vector<std::pair<std::string, std::string>>& manifest,
                      const std::vector<std::string>& notes = {});

MarginalSeries read_series_csv(std::istream& in);
MarginalSeries read_series_csv(const std::string& path);

}  // namespace spinbath
