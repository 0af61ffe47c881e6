#pragma once

// CSV ingestion and emission, run configuration and provenance.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ndig/core_model.hpp"
#include "ndig/estimation.hpp"
#include "ndig/pricing.hpp"
#include "ndig/simulation.hpp"
#include "ndig/volatility_index.hpp"

namespace ndig {

std::string_view version() noexcept;

struct PriceLoad {
  PriceSeries series;
  std::vector<std::string> warnings;  // calendar gaps, one line each
};

/// Reads `date,close`. Throws DataError naming the offending line for malformed rows,
/// duplicate or unsorted dates and non-positive prices. Gaps are reported, not filled.
PriceLoad parse_prices(std::istream& in, std::string_view source = "<stream>");
PriceLoad load_prices(const std::string& path);

/// Reads `date,rate_annual`.
RateSeries parse_rates(std::istream& in, std::string_view source = "<stream>");
RateSeries load_rates(const std::string& path);

/// Every tunable of a run. Keys of the key=value file match the field names.
struct RunConfig {
  std::size_t window = 1008;
  std::size_t step = 1;
  double annualization = 252.0;
  double damping = 0.40;
  std::size_t fft_n = 1024;
  double fft_dv = 0.1;
  double strike_lo = 0.75;
  double strike_hi = 1.5;
  std::size_t strike_count = 40;
  double quad_v_max = 20.0;
  std::size_t quad_nodes = 101;
  std::uint64_t seed = 20240607;
  double rate = 0.02;
  bool warm_start = true;
  std::size_t restarts = 5;
  std::size_t max_evaluations = 5000;
  unsigned threads = 0;
  std::string normalize = "zscore";  // or "min"

  // Model parameters for simulate / price / surface.
  double mu3 = 0.004;
  double sigma3 = 0.0551;
  double rho = -0.0008;
  double lambda_T = 9.9293;
  double lambda_U = 0.145;

  // simulate
  std::size_t paths = 1000;
  std::size_t steps = 30;
  double dt = 1.0;
  double x0 = 0.0;

  // price / surface
  double spot = 100.0;
  double maturity = 30.0 / 365.0;
  std::vector<double> maturities{7.0 / 365.0, 30.0 / 365.0, 90.0 / 365.0, 365.0 / 365.0};

  /// Throws DataError for an unknown key or unparsable value.
  void set(std::string_view key, std::string_view value);
  /// Applies a flat key=value file; '#' starts a comment.
  void apply_file(const std::string& path);
  void apply_stream(std::istream& in, std::string_view source);

  /// Canonical key=value listing, one per line, sorted by key.
  std::string canonical() const;
  /// FNV-1a 64 of canonical() without the threads line, as 16 hex digits.
  std::string hash() const;

  NdigParams params() const;
  FFTGridConfig grid() const;
  FitConfig fit_config() const;
  RollingConfig rolling_config() const;
  BvixConfig bvix_config() const;
};

/// `# ndig <version> config_hash=<hash> seed=<seed>`
std::string provenance_header(const RunConfig& config);

/// Writes to a temporary file in the same directory, then renames it over `path`.
void write_atomic(const std::string& path, std::string_view content);

std::string paths_csv(const PathSet& paths);
std::string fits_csv(const RollingFitSeries& fits);
std::string chain_csv(const OptionChain& chain);
std::string volatility_csv(const VolatilitySeries& series);

/// Round-trip formatting used by every CSV writer.
std::string format_number(double x);

}  // namespace ndig
