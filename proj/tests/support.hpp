#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ndig/date.hpp"
#include "ndig/estimation.hpp"
#include "ndig/simulation.hpp"

namespace ndig::testing {

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

/// Prices S_0 = 100, S_i = S_{i-1} exp(r_i) on consecutive days from 2015-01-01.
inline PriceSeries prices_from_returns(const std::vector<double>& returns) {
  PriceSeries p;
  Date d = parse_date("2015-01-01");
  double s = 100.0;
  p.dates.push_back(d);
  p.closes.push_back(s);
  for (double r : returns) {
    d += std::chrono::days{1};
    s *= std::exp(r);
    p.dates.push_back(d);
    p.closes.push_back(s);
  }
  return p;
}

inline std::string price_csv(const PriceSeries& p) {
  std::ostringstream out;
  out.precision(17);
  out << "date,close\n";
  for (std::size_t i = 0; i < p.size(); ++i) out << format_date(p.dates[i]) << ',' << p.closes[i] << '\n';
  return out.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ndig_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace ndig::testing
