#include "ndig/volatility_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ndig/error.hpp"
#include "ndig/kernels.hpp"

namespace ndig {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int days_between(Date a, Date b) { return static_cast<int>((b - a).count()); }

// Days from `d` to the first Friday on or after d + lo.
int friday_in(Date d, int lo) {
  const Date start = d + std::chrono::days{lo};
  const std::chrono::weekday wd{start};
  return lo + static_cast<int>((std::chrono::Friday - wd).count());
}

}  // namespace

int ExpiryPair::near_days() const { return days_between(valuation, near_expiry); }
int ExpiryPair::next_days() const { return days_between(valuation, next_expiry); }

ExpiryPair expiry_pair(Date valuation) {
  // [23, 29] and [31, 37] each contain exactly one Friday, which keeps m_t1 < M30 <= m_t2.
  const int near = friday_in(valuation, 23);
  const int next = friday_in(valuation, 31);
  ExpiryPair p;
  p.valuation = valuation;
  p.near_expiry = valuation + std::chrono::days{near};
  p.next_expiry = valuation + std::chrono::days{next};
  p.m_t1 = near * kMinutesPerDay;
  p.m_t2 = next * kMinutesPerDay;
  return p;
}

TermWeights term_weights(std::int64_t m_t1, std::int64_t m_t2, std::int64_t m_30) {
  if (!(m_t1 < m_t2)) throw DomainError("term_weights: need m_t1 < m_t2");
  if (m_30 < m_t1 || m_30 > m_t2 || m_30 <= 0) throw DomainError("term_weights: M30 must lie in [m_t1, m_t2]");
  const double m1 = static_cast<double>(m_t1);
  const double m2 = static_cast<double>(m_t2);
  const double m30 = static_cast<double>(m_30);
  const double span = m2 - m1;
  return {(m1 / m30) * ((m2 - m30) / span), (m2 / m30) * ((m30 - m1) / span)};
}

TermWeights term_weights(const ExpiryPair& pair) { return term_weights(pair.m_t1, pair.m_t2, pair.m_30); }

void TermVarianceInputs::validate() const {
  if (strikes.size() < 2) throw DomainError("TermVarianceInputs: need at least two strikes");
  if (quotes.size() != strikes.size()) throw DomainError("TermVarianceInputs: one quote per strike");
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    if (!(strikes[i] > 0.0)) throw DomainError("TermVarianceInputs: strikes must be positive");
    if (i > 0 && !(strikes[i] > strikes[i - 1])) throw DomainError("TermVarianceInputs: strikes must increase");
    if (!(std::isfinite(quotes[i]) && quotes[i] >= 0.0)) throw DomainError("TermVarianceInputs: bad quote");
  }
  if (!(term > 0.0)) throw DomainError("TermVarianceInputs: term must be positive");
  if (!(forward > 0.0)) throw DomainError("TermVarianceInputs: forward must be positive");
  const auto it = std::upper_bound(strikes.begin(), strikes.end(), forward);
  if (it == strikes.begin() || *(it - 1) != k0) {
    throw DomainError("TermVarianceInputs: K0 must be the largest strike not above the forward");
  }
}

TermVarianceInputs term_inputs_from_chain(std::span<const double> strikes, std::span<const double> calls,
                                          std::span<const double> puts, double rate, double term) {
  if (strikes.empty() || calls.size() != strikes.size() || puts.size() != strikes.size()) {
    throw DomainError("term_inputs_from_chain: strikes, calls and puts must have equal nonzero length");
  }
  std::size_t star = 0;
  for (std::size_t i = 1; i < strikes.size(); ++i) {
    if (std::abs(calls[i] - puts[i]) < std::abs(calls[star] - puts[star])) star = i;
  }
  TermVarianceInputs in;
  in.strikes.assign(strikes.begin(), strikes.end());
  in.rate = rate;
  in.term = term;
  in.forward = strikes[star] + std::exp(rate * term) * (calls[star] - puts[star]);
  const auto it = std::upper_bound(strikes.begin(), strikes.end(), in.forward);
  if (it == strikes.begin()) throw DomainError("term_inputs_from_chain: forward lies below every strike");
  const std::size_t i0 = static_cast<std::size_t>(it - strikes.begin()) - 1;
  in.k0 = strikes[i0];
  in.quotes.resize(strikes.size());
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    if (i < i0) {
      in.quotes[i] = puts[i];
    } else if (i > i0) {
      in.quotes[i] = calls[i];
    } else {
      in.quotes[i] = 0.5 * (calls[i] + puts[i]);
    }
  }
  in.validate();
  return in;
}

double term_variance(const TermVarianceInputs& in) {
  in.validate();
  const auto& k = in.strikes;
  const std::size_t n = k.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dk;
    if (i == 0) {
      dk = k[1] - k[0];
    } else if (i + 1 == n) {
      dk = k[n - 1] - k[n - 2];
    } else {
      dk = 0.5 * (k[i + 1] - k[i - 1]);
    }
    sum += dk / (k[i] * k[i]) * in.quotes[i];
  }
  const double shift = in.forward / in.k0 - 1.0;
  const double var = 2.0 * std::exp(in.rate * in.term) / in.term * sum - shift * shift / in.term;
  if (!(var >= 0.0)) throw NumericalError("term_variance: negative variance " + std::to_string(var));
  return var;
}

double bvix(const TermWeights& w, double near_variance, double next_variance) {
  const double v = w.w1 * near_variance + w.w2 * next_variance;
  if (!(v >= 0.0)) throw NumericalError("bvix: negative weighted variance");
  return 100.0 * std::sqrt(v);
}

double bvix(const ExpiryPair& pair, const TermVarianceInputs& near, const TermVarianceInputs& next) {
  return bvix(term_weights(pair), term_variance(near), term_variance(next));
}

std::vector<double> bvix_strikes(double spot, const BvixConfig& config) {
  if (!(spot > 0.0)) throw DomainError("bvix_strikes: spot must be positive");
  if (config.strikes < 2 || !(config.strike_lo > 0.0) || !(config.strike_hi > config.strike_lo)) {
    throw DomainError("bvix_strikes: need at least two strikes on a nonempty positive range");
  }
  std::vector<double> k(config.strikes);
  const double lo = config.strike_lo * spot;
  const double step = (config.strike_hi - config.strike_lo) * spot / static_cast<double>(config.strikes - 1);
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = lo + step * static_cast<double>(i);
  k.back() = config.strike_hi * spot;
  return k;
}

double model_bvix(const NdigParams& p, double spot, double rate, Date valuation, const BvixConfig& config) {
  const ExpiryPair pair = expiry_pair(valuation);
  const std::vector<double> strikes = bvix_strikes(spot, config);
  auto inputs = [&](double term) {
    const MarketContext ctx{spot, rate, term};
    const FFTPrices fft = carr_madan_prices(p, ctx, config.grid);
    std::vector<double> calls(strikes.size()), puts(strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
      calls[i] = call_at(fft, strikes[i]);
      puts[i] = put_from_parity(calls[i], ctx, strikes[i]).put;
    }
    return term_inputs_from_chain(strikes, calls, puts, rate, term);
  };
  return bvix(pair, inputs(pair.t1_years()), inputs(pair.t2_years()));
}

void RateSeries::validate() const {
  if (dates.size() != rates.size()) throw DataError("RateSeries: dates and rates differ in length");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!std::isfinite(rates[i])) throw DataError("RateSeries: non-finite rate");
    if (i > 0 && !(dates[i] > dates[i - 1])) throw DataError("RateSeries: dates must be strictly increasing");
  }
}

std::optional<double> RateSeries::as_of(Date d) const {
  const auto it = std::upper_bound(dates.begin(), dates.end(), d);
  if (it == dates.begin()) return std::nullopt;
  return rates[static_cast<std::size_t>(it - dates.begin()) - 1];
}

std::string_view vol_kind_name(VolKind kind) noexcept {
  switch (kind) {
    case VolKind::std_dev:
      return "STD";
    case VolKind::bvix:
      return "BVIX";
    case VolKind::ndig_it:
      return "NDIG_IT";
  }
  return "?";
}

VolatilitySeries rolling_std_vol(const ReturnSeries& series, std::size_t window, double annualization) {
  series.validate();
  if (window < 2) throw DomainError("rolling_std_vol: window must be at least 2");
  if (!(annualization > 0.0)) throw DomainError("rolling_std_vol: annualization must be positive");
  if (series.size() < window) {
    throw DegenerateSeriesError("rolling_std_vol: series has " + std::to_string(series.size()) +
                                " returns, shorter than the window " + std::to_string(window));
  }
  VolatilitySeries out;
  out.kind = VolKind::std_dev;
  const std::span<const double> all(series.returns);
  for (std::size_t end = window; end <= series.size(); ++end) {
    const kernels::CentralSums cs = kernels::central_sums(all.subspan(end - window, window));
    const double var = cs.m2 / static_cast<double>(window - 1);
    out.values.push_back(100.0 * std::sqrt(var * annualization));
    if (!series.dates.empty()) out.dates.push_back(series.dates[end - 1]);
  }
  return out;
}

double ndig_it_vol(const NdigParams& p, double annualization) {
  return 100.0 * std::sqrt(moments(p).variance * annualization);
}

VolatilitySeries ndig_it_series(const RollingFitSeries& fits, double annualization) {
  VolatilitySeries out;
  out.kind = VolKind::ndig_it;
  out.dates = fits.end_dates;
  out.values.reserve(fits.size());
  for (const FitResult& f : fits.fits) out.values.push_back(ndig_it_vol(f.params, annualization));
  return out;
}

VolatilitySeries bvix_from_fits(const PriceSeries& prices, const RollingFitSeries& fits,
                                const BvixSeriesConfig& config) {
  prices.validate();
  VolatilitySeries out;
  out.kind = VolKind::bvix;
  if (config.rates) {
    config.rates->validate();
  } else {
    out.diagnostics.push_back("no rate series supplied, using constant rate " + std::to_string(config.default_rate));
  }
  for (std::size_t i = 0; i < fits.size(); ++i) {
    // Return j is the log change into price j + 1, so the window-end price sits at window_end.
    const std::size_t at = fits.window_end[i];
    if (at >= prices.size()) throw DataError("bvix_from_fits: fits do not match the price series");
    const Date d = prices.dates[at];
    out.dates.push_back(d);
    double rate = config.default_rate;
    if (config.rates) {
      if (auto r = config.rates->as_of(d)) {
        rate = *r;
      } else {
        out.diagnostics.push_back(format_date(d) + ": no rate on or before this date, using " +
                                  std::to_string(config.default_rate));
      }
    }
    try {
      out.values.push_back(model_bvix(fits.fits[i].params, prices.closes[at], rate, d, config.bvix));
    } catch (const Error& e) {
      out.values.push_back(kNaN);
      out.diagnostics.push_back(format_date(d) + ": " + e.kind() + ": " + e.what());
    }
  }
  return out;
}

VolatilitySeries bvix_series(const PriceSeries& prices, const RollingConfig& rolling, const BvixSeriesConfig& config) {
  const RollingFitSeries fits = rolling_fit(prices.log_returns(), rolling);
  return bvix_from_fits(prices, fits, config);
}

VolatilitySeries normalize(const VolatilitySeries& series, NormalizeMode mode) {
  std::vector<double> finite;
  for (double v : series.values) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  if (finite.size() < 2) throw DegenerateSeriesError("normalize: need at least two finite values");
  const kernels::CentralSums cs = kernels::central_sums(finite);
  const double sd = std::sqrt(cs.m2 / static_cast<double>(finite.size() - 1));
  if (!(sd > 0.0)) throw DegenerateSeriesError("normalize: series has zero spread");
  const double shift = mode == NormalizeMode::z_score ? cs.mean : *std::min_element(finite.begin(), finite.end());
  VolatilitySeries out = series;
  for (double& v : out.values) {
    if (std::isfinite(v)) v = (v - shift) / sd;
  }
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("pearson: series differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isfinite(a[i]) && std::isfinite(b[i])) {
      x.push_back(a[i]);
      y.push_back(b[i]);
    }
  }
  if (x.size() < 2) throw DegenerateSeriesError("pearson: need at least two paired values");
  const kernels::CentralSums sx = kernels::central_sums(x);
  const kernels::CentralSums sy = kernels::central_sums(y);
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - sx.mean) * (y[i] - sy.mean);
  if (!(sx.m2 > 0.0 && sy.m2 > 0.0)) throw DegenerateSeriesError("pearson: a series has zero spread");
  return sxy / std::sqrt(sx.m2 * sy.m2);
}

}  // namespace ndig
