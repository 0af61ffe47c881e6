#pragma once

// Volatility measures: rolling historical standard deviation, a VIX-style index
// computed from model option chains on a synthetic Friday expiry calendar, and the
// model (intrinsic-time) volatility of the unit increment.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ndig/date.hpp"
#include "ndig/estimation.hpp"
#include "ndig/pricing.hpp"

namespace ndig {

inline constexpr std::int64_t kMinutesPerDay = 1440;
inline constexpr std::int64_t kMinutes30Days = 30 * kMinutesPerDay;
inline constexpr std::int64_t kMinutesPerYear = 365 * kMinutesPerDay;

/// Valuation at 16:00 on `valuation`; both expiries are Fridays at 16:00.
struct ExpiryPair {
  Date valuation;
  Date near_expiry;
  Date next_expiry;
  std::int64_t m_t1 = 0;
  std::int64_t m_t2 = 0;
  std::int64_t m_30 = kMinutes30Days;

  int near_days() const;
  int next_days() const;
  double t1_years() const { return static_cast<double>(m_t1) / kMinutesPerYear; }
  double t2_years() const { return static_cast<double>(m_t2) / kMinutesPerYear; }
};

/// Near expiry: the Friday 23 to 29 days out. Next expiry: one week later.
ExpiryPair expiry_pair(Date valuation);

struct TermWeights {
  double w1;
  double w2;
};

/// W1 = (M1/M30)(M2 - M30)/(M2 - M1), W2 = (M2/M30)(M30 - M1)/(M2 - M1).
/// Throws DomainError when m_t1 >= m_t2 or M30 lies outside [m_t1, m_t2].
TermWeights term_weights(std::int64_t m_t1, std::int64_t m_t2, std::int64_t m_30 = kMinutes30Days);
TermWeights term_weights(const ExpiryPair& pair);

struct TermVarianceInputs {
  std::vector<double> strikes;  // strictly increasing
  std::vector<double> quotes;   // Q(K_i): put below K0, call above, average at K0
  double forward = 0.0;
  double k0 = 0.0;
  double rate = 0.0;  // per year
  double term = 0.0;  // years

  /// Throws DomainError if the invariants do not hold.
  void validate() const;
};

/// Forward from the strike where |C - P| is smallest, K0 as the largest strike not
/// above it, and the out-of-the-money quote at every strike.
TermVarianceInputs term_inputs_from_chain(std::span<const double> strikes, std::span<const double> calls,
                                          std::span<const double> puts, double rate, double term);

/// (2 e^{rT}/T) sum dK_i/K_i^2 Q(K_i) - (1/T)(F/K0 - 1)^2. Throws NumericalError
/// when the result is negative.
double term_variance(const TermVarianceInputs& inputs);

/// 100 sqrt(W1 s1 + W2 s2). Throws NumericalError on a negative weighted variance.
double bvix(const TermWeights& w, double near_variance, double next_variance);
double bvix(const ExpiryPair& pair, const TermVarianceInputs& near, const TermVarianceInputs& next);

struct BvixConfig {
  double strike_lo = 0.75;  // multiples of spot
  double strike_hi = 1.5;
  std::size_t strikes = 40;
  FFTGridConfig grid;
};

std::vector<double> bvix_strikes(double spot, const BvixConfig& config = {});

/// Index at one valuation date from model prices: FFT calls on the strike grid for
/// both expiries, puts by parity.
double model_bvix(const NdigParams& p, double spot, double rate, Date valuation, const BvixConfig& config = {});

/// Dated annual rates with as-of lookup.
struct RateSeries {
  std::vector<Date> dates;
  std::vector<double> rates;

  void validate() const;
  /// Latest rate dated on or before `d`.
  std::optional<double> as_of(Date d) const;
};

enum class VolKind { std_dev, bvix, ndig_it };

std::string_view vol_kind_name(VolKind kind) noexcept;

struct VolatilitySeries {
  std::vector<Date> dates;
  std::vector<double> values;  // percent, NaN for a failed window
  VolKind kind = VolKind::std_dev;
  std::vector<std::string> diagnostics;

  std::size_t size() const noexcept { return values.size(); }
};

/// Sample standard deviation over each window x sqrt(annualization) x 100.
VolatilitySeries rolling_std_vol(const ReturnSeries& series, std::size_t window = 1008, double annualization = 252.0);

/// 100 sqrt(Var(X_1) annualization).
double ndig_it_vol(const NdigParams& p, double annualization = 252.0);

VolatilitySeries ndig_it_series(const RollingFitSeries& fits, double annualization = 252.0);

struct BvixSeriesConfig {
  BvixConfig bvix;
  double default_rate = 0.02;
  std::optional<RateSeries> rates;
};

/// BVIX for each fitted window: spot is the close on the window-end date. Failed
/// windows become NaN with a diagnostic line.
VolatilitySeries bvix_from_fits(const PriceSeries& prices, const RollingFitSeries& fits,
                                const BvixSeriesConfig& config = {});

/// Rolling fit of the log-returns followed by bvix_from_fits.
VolatilitySeries bvix_series(const PriceSeries& prices, const RollingConfig& rolling = {},
                             const BvixSeriesConfig& config = {});

enum class NormalizeMode {
  z_score,    // (x - mean) / s
  min_shift,  // (x - min) / s
};

/// Uses the sample standard deviation s over the finite values; NaN entries pass
/// through. Throws DegenerateSeriesError for fewer than 2 values or zero spread.
VolatilitySeries normalize(const VolatilitySeries& series, NormalizeMode mode = NormalizeMode::z_score);

/// Pearson correlation over the positions where both values are finite.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace ndig
