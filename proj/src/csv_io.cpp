#include "spinbath/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "spinbath/spin_kit.hpp"

namespace spinbath {

const std::array<const char*, kSeriesColumns> kSeriesColumnNames = {
    "rho00_0", "rho11_0", "re_rho01_0", "im_rho01_0",
    "rho00_1", "rho11_1", "re_rho01_1", "im_rho01_1",
    "rho00_2", "rho11_2", "re_rho01_2", "im_rho01_2",
    "min_eig", "trace",
};

MarginalSeries to_marginal_series(const TimeSeries& series) {
  MarginalSeries out;
  out.times = series.times;
  out.rows.reserve(series.rho.size());
  for (const Eigen::MatrixXcd& rho : series.rho) {
    const auto marg = qubit_marginals(rho);
    std::array<double, kSeriesColumns> row{};
    for (int i = 0; i < 3; ++i) {
      row[4 * i + 0] = marg[i](0, 0).real();
      row[4 * i + 1] = marg[i](1, 1).real();
      row[4 * i + 2] = marg[i](0, 1).real();
      row[4 * i + 3] = marg[i](0, 1).imag();
    }
    row[12] = min_eigenvalue(rho);
    row[13] = rho.trace().real();
    out.rows.push_back(row);
  }
  return out;
}

namespace {

void put_double(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void write_series_csv(std::ostream& out, const MarginalSeries& series,
                      const std::vector<std::pair<std::string, std::string>>& manifest,
                      const std::vector<std::string>& notes) {
  for (const auto& [k, v] : manifest) out << "# " << k << " = " << v << "\n";
  for (const std::string& n : notes) out << "# note: " << n << "\n";
  out << "t";
  for (const char* name : kSeriesColumnNames) out << "," << name;
  out << "\n";
  for (std::size_t r = 0; r < series.rows.size(); ++r) {
    put_double(out, series.times[r]);
    for (double v : series.rows[r]) {
      out << ",";
      put_double(out, v);
    }
    out << "\n";
  }
}

void write_series_csv(const std::string& path, const MarginalSeries& series,
                      const std::vector<std::pair<std::string, std::string>>& manifest,
                      const std::vector<std::string>& notes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_series_csv(out, series, manifest, notes);
}

MarginalSeries read_series_csv(std::istream& in) {
  MarginalSeries out;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      std::string expected = "t";
      for (const char* name : kSeriesColumnNames) expected += std::string(",") + name;
      if (line != expected)
        throw std::runtime_error("csv line " + std::to_string(line_no) +
                                 ": unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::array<double, kSeriesColumns> row{};
    double t = 0.0;
    std::size_t pos = 0;
    for (int col = 0; col <= kSeriesColumns; ++col) {
      const std::size_t comma = line.find(',', pos);
      const std::string field = line.substr(pos, comma == std::string::npos
                                                     ? std::string::npos
                                                     : comma - pos);
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size() || field.empty())
        throw std::runtime_error("csv line " + std::to_string(line_no) +
                                 ": bad field '" + field + "'");
      if (col == 0) t = v;
      else row[col - 1] = v;
      if (comma == std::string::npos) {
        if (col != kSeriesColumns)
          throw std::runtime_error("csv line " + std::to_string(line_no) +
                                   ": expected " + std::to_string(kSeriesColumns + 1) +
                                   " fields");
        break;
      }
      pos = comma + 1;
    }
    out.times.push_back(t);
    out.rows.push_back(row);
  }
  if (!header_seen) throw std::runtime_error("csv: missing header row");
  return out;
}

MarginalSeries read_series_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  return read_series_csv(in);
}

}  // namespace spinbath
