#include "ndig/pricing.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "ndig/error.hpp"
#include "ndig/parallel.hpp"

namespace ndig {

namespace {

using cplx = std::complex<double>;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// FFTW planning is not thread-safe; execution with distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftwForward {
 public:
  explicit FftwForward(std::size_t n)
      : n_(n),
        in_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (in_ == nullptr || out_ == nullptr) throw NumericalError("fftw_malloc failed");
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw NumericalError("fftw plan creation failed");
  }
  FftwForward(const FftwForward&) = delete;
  FftwForward& operator=(const FftwForward&) = delete;
  ~FftwForward() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      if (plan_ != nullptr) fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }

  void set(std::size_t j, cplx z) {
    in_[j][0] = z.real();
    in_[j][1] = z.imag();
  }
  void execute() { fftw_execute(plan_); }
  cplx result(std::size_t p) const { return {out_[p][0], out_[p][1]}; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan plan_ = nullptr;
};

double rule_weight(FourierRule rule, std::size_t j) {
  switch (rule) {
    case FourierRule::rectangle:
      return 1.0;
    case FourierRule::trapezoid:
      return j == 0 ? 0.5 : 1.0;
    case FourierRule::simpson:
      return (3.0 + ((j % 2 == 0) ? -1.0 : 1.0) - (j == 0 ? 1.0 : 0.0)) / 3.0;
  }
  return 1.0;
}

double mean_correction(const NdigParams& p) {
  if (!feasible_interval(p).contains(1.0)) {
    throw InfeasibleError("pricing: cgf(1) is undefined for these parameters, no mean-correcting measure");
  }
  return cgf(1.0, p);
}

}  // namespace

void MarketContext::validate() const {
  if (!(std::isfinite(s0) && s0 > 0.0)) throw DomainError("MarketContext: s0 must be positive");
  if (!(std::isfinite(maturity) && maturity > 0.0)) throw DomainError("MarketContext: maturity must be positive");
  if (!std::isfinite(r)) throw DomainError("MarketContext: rate must be finite");
}

double MarketContext::discount() const { return std::exp(-r * maturity); }

double FFTGridConfig::dk() const { return 2.0 * std::numbers::pi / (static_cast<double>(n) * dv); }
double FFTGridConfig::k_bar() const { return 0.5 * static_cast<double>(n) * dk(); }
double FFTGridConfig::v_max() const { return static_cast<double>(n) * dv; }

void FFTGridConfig::validate(const NdigParams& p) const {
  if (n < 16 || (n & (n - 1)) != 0) throw DomainError("FFTGridConfig: n must be a power of two >= 16");
  if (!(std::isfinite(dv) && dv > 0.0)) throw DomainError("FFTGridConfig: dv must be positive");
  if (!(std::isfinite(damping) && damping > 0.0)) throw DomainError("FFTGridConfig: damping must be positive");
  const double bound = a_max(p);
  if (!(damping < bound)) {
    throw InfeasibleError("FFTGridConfig: damping " + std::to_string(damping) + " is not below a_max = " +
                          std::to_string(bound));
  }
}

cplx risk_neutral_chf(cplx u, const NdigParams& p, const MarketContext& ctx) {
  ctx.validate();
  const double k1 = mean_correction(p);
  const double days = kDaysPerYear * ctx.maturity;
  const cplx iu = cplx(0.0, 1.0) * u;
  return std::exp(iu * std::log(ctx.s0) + (iu * (ctx.r / kDaysPerYear - k1) + char_exponent(u, p)) * days);
}

cplx risk_neutral_chf(double v, const NdigParams& p, const MarketContext& ctx) {
  return risk_neutral_chf(cplx(v, 0.0), p, ctx);
}

cplx carr_madan_integrand(double v, double damping, const NdigParams& p, const MarketContext& ctx) {
  const double a = damping;
  const cplx phi = risk_neutral_chf(cplx(v, -(a + 1.0)), p, ctx);
  const cplx denom(a * a + a - v * v, (2.0 * a + 1.0) * v);
  return ctx.discount() * phi / denom;
}

FFTPrices carr_madan_prices(const NdigParams& p, const MarketContext& ctx, const FFTGridConfig& grid) {
  ctx.validate();
  grid.validate(p);
  const std::size_t n = grid.n;
  const double a = grid.damping;
  const double dv = grid.dv;
  const double dk = grid.dk();
  const double k_bar = grid.k_bar();
  const double log_s0 = std::log(ctx.s0);

  FftwForward fft(n);
  std::vector<cplx> weighted(n);
  double peak = 0.0;
  double last = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = dv * static_cast<double>(j);
    const cplx psi = carr_madan_integrand(v, a, p, ctx);
    const double mag = std::abs(psi);
    peak = std::max(peak, mag);
    if (j + 1 == n) last = mag;
    weighted[j] = psi * (rule_weight(grid.rule, j) * dv);
    fft.set(j, std::polar(1.0, v * (k_bar - log_s0)) * weighted[j]);
  }
  fft.execute();

  FFTPrices out;
  out.log_strikes.resize(n);
  out.strikes.resize(n);
  out.calls.resize(n);
  out.tail_ratio = peak > 0.0 ? last / peak : 0.0;
  out.damping = a;
  out.dv = dv;
  out.weighted = std::move(weighted);
  for (std::size_t q = 0; q < n; ++q) {
    const double k = log_s0 - k_bar + dk * static_cast<double>(q);
    const double c = std::exp(-a * k) / std::numbers::pi * fft.result(q).real();
    if (!std::isfinite(c)) throw NumericalError("carr_madan_prices: non-finite price at log-strike " + std::to_string(k));
    out.log_strikes[q] = k;
    out.strikes[q] = std::exp(k);
    out.calls[q] = c;
  }
  return out;
}

ParityPut put_from_parity(double call, const MarketContext& ctx, double strike) {
  const double raw = call - ctx.s0 + strike * ctx.discount();
  if (raw < 0.0) return {0.0, true};
  return {raw, false};
}

double bsm_price(const MarketContext& ctx, double strike, double vol) {
  ctx.validate();
  const double df = ctx.discount();
  if (strike <= 0.0) return ctx.s0 - strike * df;
  if (!(vol > 0.0)) return std::max(ctx.s0 - strike * df, 0.0);
  const double sd = vol * std::sqrt(ctx.maturity);
  const double d1 = (std::log(ctx.s0 / strike) + (ctx.r + 0.5 * vol * vol) * ctx.maturity) / sd;
  const double d2 = d1 - sd;
  return ctx.s0 * norm_cdf(d1) - strike * df * norm_cdf(d2);
}

double bsm_vega(const MarketContext& ctx, double strike, double vol) {
  if (!(vol > 0.0) || strike <= 0.0) return 0.0;
  const double sd = vol * std::sqrt(ctx.maturity);
  const double d1 = (std::log(ctx.s0 / strike) + (ctx.r + 0.5 * vol * vol) * ctx.maturity) / sd;
  return ctx.s0 * std::sqrt(ctx.maturity) * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * std::numbers::pi);
}

double implied_vol(const MarketContext& ctx, double strike, double observed_price) {
  ctx.validate();
  const double lower = std::max(ctx.s0 - strike * ctx.discount(), 0.0);
  if (!(observed_price > lower) || !(observed_price < ctx.s0)) {
    throw DomainError("implied_vol: price " + std::to_string(observed_price) + " outside the no-arbitrage band (" +
                      std::to_string(lower) + ", " + std::to_string(ctx.s0) + ")");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (bsm_price(ctx, strike, hi) < observed_price) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) throw DomainError("implied_vol: no volatility below 1e4 reproduces the price");
  }
  double vol = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double diff = bsm_price(ctx, strike, vol) - observed_price;
    if (diff == 0.0) break;
    if (diff > 0.0) {
      hi = vol;
    } else {
      lo = vol;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    const double vega = bsm_vega(ctx, strike, vol);
    double next = vega > 0.0 ? vol - diff / vega : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - vol) <= 1e-16 * vol) {
      vol = next;
      break;
    }
    vol = next;
  }
  return vol;
}

double call_at(const FFTPrices& fft, double strike, bool* off_grid) {
  if (!(strike > 0.0)) throw DomainError("call_at: strike must be positive");
  if (fft.weighted.empty()) throw DomainError("call_at: no quadrature samples");
  if (off_grid != nullptr) *off_grid = strike < fft.strikes.front() || strike > fft.strikes.back();
  const double k = std::log(strike);
  // e^{-i v_j k} by rotation, renormalized every so often.
  const cplx step = std::polar(1.0, -fft.dv * k);
  cplx rot(1.0, 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < fft.weighted.size(); ++j) {
    if (j % 64 == 0) rot = std::polar(1.0, -fft.dv * static_cast<double>(j) * k);
    sum += (rot * fft.weighted[j]).real();
    rot *= step;
  }
  return std::exp(-fft.damping * k) / std::numbers::pi * sum;
}

OptionChain price_surface(const NdigParams& p, double s0, double r, std::span<const double> strikes,
                          std::span<const double> maturities, const FFTGridConfig& grid) {
  for (double m : maturities) {
    if (!(m > 0.0)) throw DomainError("price_surface: maturities must be positive");
  }
  for (double k : strikes) {
    if (!(k > 0.0)) throw DomainError("price_surface: strikes must be positive");
  }
  OptionChain chain;
  chain.s0 = s0;
  chain.r = r;
  chain.strikes.assign(strikes.begin(), strikes.end());
  chain.maturities.assign(maturities.begin(), maturities.end());
  const std::size_t cells = strikes.size() * maturities.size();
  chain.calls.resize(cells);
  chain.puts.resize(cells);
  chain.implied_vols.resize(cells);
  chain.flags.assign(cells, kCellOk);

  auto one_maturity = [&](std::size_t m) {
    const MarketContext ctx{s0, r, maturities[m]};
    const FFTPrices fft = carr_madan_prices(p, ctx, grid);
    const double df = ctx.discount();
    for (std::size_t s = 0; s < strikes.size(); ++s) {
      const std::size_t i = chain.index(m, s);
      const double K = strikes[s];
      bool off = false;
      const double call = call_at(fft, K, &off);
      unsigned flag = kCellOk;
      if (off) flag |= kOffFftGrid;
      if (!fft.tail_ok()) flag |= kTruncationTail;
      const double tol = 1e-9 * s0;
      if (call < std::max(s0 - K * df, 0.0) - tol || call > s0 + tol) flag |= kCallBoundViolated;
      const ParityPut put = put_from_parity(call, ctx, K);
      if (put.floored) flag |= kPutFloored;
      double iv = std::numeric_limits<double>::quiet_NaN();
      try {
        iv = implied_vol(ctx, K, call);
      } catch (const DomainError&) {
        flag |= kImpliedVolFailed;
      }
      chain.calls[i] = call;
      chain.puts[i] = put.put;
      chain.implied_vols[i] = iv;
      chain.flags[i] = flag;
    }
  };
  // One transform per maturity; rows are independent.
  parallel_for_chunks(maturities.size(), 0, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) one_maturity(m);
  });
  return chain;
}

}  // namespace ndig
