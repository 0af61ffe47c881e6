#pragma once

// European option pricing under the mean-correcting martingale measure:
//   S_t = S_0 exp((r - K(1)) t + X_t),
// with Carr-Madan FFT inversion of the damped call transform. The model is in daily
// units; a maturity of tau years is t = 365 tau days and r is converted to a daily rate.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ndig/core_model.hpp"

namespace ndig {

inline constexpr double kDaysPerYear = 365.0;

struct MarketContext {
  double s0;
  double r;         // continuously compounded, per year
  double maturity;  // years

  void validate() const;
  double discount() const;
};

enum class FourierRule {
  rectangle,  // left-hand rectangle: weight 1 at every node
  trapezoid,  // rectangle with the v = 0 node halved
  simpson,    // Simpson weights 1/3, 4/3, 2/3, 4/3, ... from v = 0
};

/// Grid of the Carr-Madan FFT. Frequency nodes v_j = j dv, log-strike nodes
/// k_p = ln S0 - k_bar + p dk, with dv dk = 2 pi / n and v_max k_bar = pi n.
struct FFTGridConfig {
  std::size_t n = 1024;
  double damping = 0.40;
  double dv = 0.1;
  FourierRule rule = FourierRule::trapezoid;

  double dk() const;
  double k_bar() const;
  double v_max() const;
  /// Throws DomainError on a bad grid and InfeasibleError unless 0 < damping < a_max(p).
  void validate(const NdigParams& p) const;
};

/// chf of ln S_tau under Q: S0^{iu} exp{[iu (r_d - K(1)) + psi(u)] t}. Complex u is
/// allowed inside the strip where the cgf exists. Throws InfeasibleError if K(1) does not exist.
std::complex<double> risk_neutral_chf(std::complex<double> u, const NdigParams& p, const MarketContext& ctx);
std::complex<double> risk_neutral_chf(double v, const NdigParams& p, const MarketContext& ctx);

/// Damped Carr-Madan integrand psi(v) = e^{-r tau} phi(v - i(a+1)) / (a^2 + a - v^2 + i(2a+1) v).
std::complex<double> carr_madan_integrand(double v, double damping, const NdigParams& p, const MarketContext& ctx);

struct FFTPrices {
  std::vector<double> log_strikes;
  std::vector<double> strikes;
  std::vector<double> calls;
  double tail_ratio = 0.0;  // |integrand(v_max - dv)| / max_j |integrand(v_j)|
  double damping = 0.0;
  double dv = 0.0;
  std::vector<std::complex<double>> weighted;  // integrand samples times quadrature weights and dv

  bool tail_ok() const noexcept { return tail_ratio <= 1e-8; }
};

/// Call prices on the whole log-strike grid. Throws on invalid grid or damping and
/// NumericalError on non-finite output.
FFTPrices carr_madan_prices(const NdigParams& p, const MarketContext& ctx, const FFTGridConfig& grid = {});

struct ParityPut {
  double put;
  bool floored;  // raw parity value was negative and has been set to 0
};

/// P = C - S0 + K e^{-r tau}, floored at 0.
ParityPut put_from_parity(double call, const MarketContext& ctx, double strike);

/// Black-Scholes-Merton European call (no dividends). vol <= 0 gives the
/// discounted intrinsic value.
double bsm_price(const MarketContext& ctx, double strike, double vol);
double bsm_vega(const MarketContext& ctx, double strike, double vol);

/// BSM implied volatility of a call price by safeguarded Newton/bisection. Throws
/// DomainError if the price lies outside (max(S - K e^{-r tau}, 0), S).
double implied_vol(const MarketContext& ctx, double strike, double observed_price);

/// Bits of OptionChain::flags.
enum CellFlag : unsigned {
  kCellOk = 0,
  kCallBoundViolated = 1u << 0,
  kPutFloored = 1u << 1,
  kImpliedVolFailed = 1u << 2,
  kTruncationTail = 1u << 3,
  kOffFftGrid = 1u << 4,
};

/// Surface of prices: rows are maturities, columns strikes (row-major storage).
struct OptionChain {
  double s0 = 0.0;
  double r = 0.0;
  std::vector<double> strikes;
  std::vector<double> maturities;
  std::vector<double> calls;
  std::vector<double> puts;
  std::vector<double> implied_vols;  // NaN where inversion failed
  std::vector<unsigned> flags;

  std::size_t index(std::size_t maturity, std::size_t strike) const { return maturity * strikes.size() + strike; }
  double moneyness(std::size_t strike) const { return strikes[strike] / s0; }
};

/// Call price at an arbitrary strike from the same quadrature sum the FFT evaluates on
/// its grid (direct O(n) summation). Flags strikes outside the FFT log-strike range.
double call_at(const FFTPrices& fft, double strike, bool* off_grid = nullptr);

/// Calls by FFT (one transform per maturity), puts by parity, implied vols by inversion,
/// and price-bound flags per cell.
OptionChain price_surface(const NdigParams& p, double s0, double r, std::span<const double> strikes,
                          std::span<const double> maturities, const FFTGridConfig& grid = {});

}  // namespace ndig
