// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Run a subset with: ndig_acceptance 3 7

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lewis_oracle.hpp"
#include "ndig/commands.hpp"
#include "ndig/core_model.hpp"
#include "ndig/estimation.hpp"
#include "ndig/pricing.hpp"
#include "ndig/simulation.hpp"
#include "ndig/volatility_index.hpp"
#include "support.hpp"

using namespace ndig;
namespace t = ndig::testing;

namespace {

const double kMaturities[] = {7.0 / 365.0, 30.0 / 365.0, 90.0 / 365.0, 1.0};
constexpr double kRate = 0.02;
constexpr double kSpot = 100.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed sub-check; keeps the first few messages.
  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass || detail.str().size() < 400) detail << (detail.str().empty() ? "" : "; ") << what;
    pass = false;
  }
  template <class T>
  Outcome& note(const T& x) {
    detail << (detail.str().empty() ? "" : "; ") << x;
    return *this;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<double> moneyness_strikes(double spot, std::size_t n) {
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = spot * (0.75 + 0.75 * static_cast<double>(i) / static_cast<double>(n - 1));
  return k;
}

NdigParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mu3 = -0.01 + 0.02 * u(rng);
  const double sigma3 = 0.005 + 0.1 * u(rng);
  const double rho = -0.01 + 0.02 * u(rng);
  const double lT = std::exp(std::log(0.05) + u(rng) * std::log(2000.0));
  const double lU = std::exp(std::log(0.05) + u(rng) * std::log(2000.0));
  return {mu3, sigma3, rho, lT, lU};
}

// 1. exp(cgf(w)) = chf(-i w) on 50 feasible points, reference and 20 random sets.
void c1_cgf_chf(Outcome& o) {
  std::mt19937_64 rng(101);
  std::vector<NdigParams> sets{NdigParams::reference()};
  for (int i = 0; i < 20; ++i) sets.push_back(random_params(rng));
  double worst = 0.0;
  for (const auto& p : sets) {
    const FeasibleInterval fi = feasible_interval(p);
    const double lo = std::max(fi.w_lo, -50.0), hi = std::min(fi.w_hi, 50.0);
    for (int j = 0; j < 50; ++j) {
      const double w = lo + (hi - lo) * (j + 0.5) / 50.0;
      const double a = std::exp(cgf(w, p));
      const auto b = chf(std::complex<double>(0.0, -w), p);
      const double e = std::abs(b - a) / std::abs(a);
      worst = std::max(worst, e);
    }
  }
  o.require(worst <= 1e-12, "max rel err " + fmt("%.3g", worst));
  o.note("max rel err " + fmt("%.3g", worst));
}

// 2. Moments of 10^6 simulated unit increments against the analytic values.
void c2_mc_moments(Outcome& o) {
  const NdigParams p = NdigParams::reference();
  const MomentSet m = moments(p);
  const PathSet paths = simulate_paths(p, std::vector<double>{0.0, 1.0}, 1'000'000, 0.0, 20240607);
  const SampleStats s = mc_stats(paths, 1.0);
  // Spread of the skewness over 20 batches, scaled to the full sample, for the report.
  std::vector<double> x(paths.n_paths), batch;
  for (std::size_t i = 0; i < paths.n_paths; ++i) x[i] = paths.at(i, 1) - paths.at(i, 0);
  for (std::size_t b = 0; b < 20; ++b) batch.push_back(sample_stats(std::span<const double>(x).subspan(b * 50'000, 50'000)).skewness);
  const double skew_se = std::sqrt(sample_stats(batch).variance / 20.0);
  const double zm = (s.mean - m.mean) / s.se_mean;
  const double zv = (s.variance - m.variance) / s.se_variance;
  const double es = std::abs(s.skewness / m.skewness - 1.0);
  const double ek = std::abs(s.kurtosis / m.kurtosis - 1.0);
  o.require(std::abs(zm) <= 3.0, "mean off by " + fmt("%.2f", zm) + " SE");
  o.require(std::abs(zv) <= 3.0, "variance off by " + fmt("%.2f", zv) + " SE");
  o.require(es <= 0.10, "skew " + fmt("%.4f", s.skewness) + " vs " + fmt("%.4f", m.skewness));
  o.require(ek <= 0.15, "kurt " + fmt("%.3f", s.kurtosis) + " vs " + fmt("%.3f", m.kurtosis));
  o.note("skew batch SE " + fmt("%.3f", skew_se) + " vs tolerance " + fmt("%.3f", 0.10 * std::abs(m.skewness)));
  o.note("mean z=" + fmt("%.2f", zm) + ", var z=" + fmt("%.2f", zv) + ", skew " + fmt("%.4f", s.skewness) + "/" +
         fmt("%.4f", m.skewness) + ", kurt " + fmt("%.2f", s.kurtosis) + "/" + fmt("%.2f", m.kurtosis));
}

// 3. Discounted mean of S_tau equals S0 (MC), and the risk-neutral chf at -i.
void c3_martingale(Outcome& o) {
  const NdigParams p = NdigParams::reference();
  for (double tau : {7.0 / 365.0, 30.0 / 365.0, 90.0 / 365.0}) {
    const McPrice mc = mc_option_price(p, kRate, kSpot, 0.0, tau, 1'000'000, 777);
    const double z = (mc.price - kSpot) / mc.std_error;
    o.require(std::abs(z) <= 3.0, "tau=" + fmt("%.4f", tau) + " off by " + fmt("%.2f", z) + " SE");
    o.note("z(" + fmt("%.0f", tau * 365.0) + "d)=" + fmt("%.2f", z));
  }
  for (double tau : kMaturities) {
    const MarketContext ctx{kSpot, kRate, tau};
    const auto m = risk_neutral_chf(std::complex<double>(0.0, -1.0), p, ctx);
    const double want = kSpot * std::exp(kRate * tau);
    o.require(std::abs(m - want) / want <= 1e-10, "analytic chf(-i) at tau=" + fmt("%.4f", tau));
  }
}

// 4. FFT prices against the quadrature oracle over moneyness [0.75, 1.5].
void c4_fft_vs_oracle(Outcome& o) {
  const NdigParams p = NdigParams::reference();
  double worst = 0.0;
  std::size_t count = 0;
  for (double tau : kMaturities) {
    const MarketContext ctx{kSpot, kRate, tau};
    const FFTPrices f = carr_madan_prices(p, ctx);
    std::vector<double> strikes = moneyness_strikes(kSpot, 61);
    for (double k : f.strikes) {
      if (k >= 0.75 * kSpot && k <= 1.5 * kSpot) strikes.push_back(k);
    }
    for (double k : strikes) {
      const double e = t::rel_err(call_at(f, k), t::lewis_call(p, ctx, k));
      worst = std::max(worst, e);
      ++count;
    }
  }
  o.require(worst <= 1e-4, "max rel err " + fmt("%.3g", worst));
  o.note(std::to_string(count) + " strikes, max rel err " + fmt("%.3g", worst));
}

// 5. Degenerate subordinators: BSM prices and a flat implied-vol surface.
void c5_bsm_limit(Outcome& o) {
  const NdigParams base = NdigParams::reference();
  const NdigParams p(base.mu3(), base.sigma3(), 0.0, 1e6, 1e6);
  const double vol = base.sigma3() * std::sqrt(kDaysPerYear);
  const std::vector<double> strikes = moneyness_strikes(kSpot, 31);
  const std::vector<double> taus(std::begin(kMaturities), std::end(kMaturities));
  const OptionChain ch = price_surface(p, kSpot, kRate, strikes, taus);
  double worst_price = 0.0, worst_iv = 0.0;
  for (std::size_t m = 0; m < taus.size(); ++m) {
    const MarketContext ctx{kSpot, kRate, taus[m]};
    for (std::size_t k = 0; k < strikes.size(); ++k) {
      const std::size_t i = ch.index(m, k);
      worst_price = std::max(worst_price, t::rel_err(ch.calls[i], bsm_price(ctx, strikes[k], vol)));
      const double e = std::isfinite(ch.implied_vols[i]) ? t::rel_err(ch.implied_vols[i], vol) : INFINITY;
      worst_iv = std::max(worst_iv, e);
    }
  }
  o.require(worst_price <= 1e-3, "price rel err " + fmt("%.3g", worst_price));
  o.require(worst_iv <= 0.01, "implied vol rel err " + fmt("%.3g", worst_iv));
  o.note("price rel err " + fmt("%.3g", worst_price) + ", iv rel err " + fmt("%.3g", worst_iv));
}

// 6. Parity, monotonicity and no-arbitrage bounds on the reference surface.
void c6_surface(Outcome& o) {
  const std::vector<double> strikes = moneyness_strikes(kSpot, 76);
  const std::vector<double> taus(std::begin(kMaturities), std::end(kMaturities));
  const OptionChain ch = price_surface(NdigParams::reference(), kSpot, kRate, strikes, taus);
  double worst_parity = 0.0;
  std::size_t monotone_breaks = 0, bound_breaks = 0, flagged = 0;
  for (std::size_t m = 0; m < taus.size(); ++m) {
    const double df = std::exp(-kRate * taus[m]);
    for (std::size_t k = 0; k < strikes.size(); ++k) {
      const std::size_t i = ch.index(m, k);
      worst_parity = std::max(worst_parity, std::abs(ch.calls[i] - ch.puts[i] - kSpot + strikes[k] * df));
      if (k > 0 && ch.calls[i] > ch.calls[ch.index(m, k - 1)]) ++monotone_breaks;
      if (ch.flags[i] != kCellOk) {
        ++flagged;
        continue;
      }
      if (ch.calls[i] < std::max(kSpot - strikes[k] * df, 0.0) || ch.calls[i] > kSpot) ++bound_breaks;
    }
  }
  o.require(worst_parity <= 1e-10, "parity residual " + fmt("%.3g", worst_parity));
  o.require(monotone_breaks == 0, std::to_string(monotone_breaks) + " increases in strike");
  o.require(bound_breaks == 0, std::to_string(bound_breaks) + " bound violations");
  o.note(std::to_string(ch.calls.size()) + " cells, parity " + fmt("%.3g", worst_parity) + ", flagged " +
         std::to_string(flagged));
}

// 7. Moment recovery on simulated data; Gaussian data pushes rho's role to zero.
void c7_estimation(Outcome& o) {
  const auto r = simulate_returns(NdigParams::reference(), 100'000, 4242);
  const FitResult f = fit(r);
  const double dm[] = {std::sqrt(f.terms.dm1), std::sqrt(f.terms.dm2), std::sqrt(f.terms.dm3),
                       std::sqrt(f.terms.dm4)};
  for (int k = 0; k < 4; ++k) o.require(dm[k] <= 0.05, "|dM" + std::to_string(k + 1) + "|=" + fmt("%.3g", dm[k]));
  o.require(f.objective <= 1e-2, "objective " + fmt("%.3g", f.objective));
  o.note("max |dM|=" + fmt("%.2g", *std::max_element(std::begin(dm), std::end(dm))) + ", objective " +
         fmt("%.3g", f.objective));

  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.001, 0.05);
  std::vector<double> g(100'000);
  for (auto& x : g) x = n(rng);
  const FitResult fg = fit(g);
  const MomentSet m = moments(fg.params);
  o.require(std::abs(fg.params.rho()) <= 0.1, "Gaussian fit rho " + fmt("%.4g", fg.params.rho()));
  o.require(std::abs(m.skewness) <= 0.1, "Gaussian fit skew " + fmt("%.3g", m.skewness));
  o.require(std::abs(m.kurtosis - 3.0) <= 0.1, "Gaussian fit kurt " + fmt("%.4g", m.kurtosis));
  o.note("Gaussian: rho " + fmt("%.4g", fg.params.rho()) + ", skew " + fmt("%.3g", m.skewness) + ", kurt " +
         fmt("%.4g", m.kurtosis));
}

// 8. Calendar weights and windows; flat BSM chains.
void c8_vix(Outcome& o) {
  const Date start = parse_date("2014-01-01");
  std::size_t bad = 0;
  double worst_sum = 0.0;
  for (int i = 0; i < 3653; ++i) {
    const ExpiryPair e = expiry_pair(start + std::chrono::days{i});
    const TermWeights w = term_weights(e);
    worst_sum = std::max(worst_sum, std::abs(w.w1 + w.w2 - 1.0));
    const bool ok = e.near_days() >= 23 && e.near_days() <= 29 && e.next_days() >= 31 && e.next_days() <= 37 &&
                    e.m_t1 < e.m_30 && e.m_30 <= e.m_t2 &&
                    std::chrono::weekday(e.near_expiry) == std::chrono::Friday &&
                    std::chrono::weekday(e.next_expiry) == std::chrono::Friday;
    if (!ok) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " dates break the window rules");
  o.require(worst_sum <= 1e-15, "w1 + w2 - 1 = " + fmt("%.3g", worst_sum));

  const ExpiryPair e = expiry_pair(parse_date("2021-03-10"));
  for (double vol : {0.2, 0.5, 1.0}) {
    auto term = [&](double years) {
      const MarketContext ctx{kSpot, kRate, years};
      const std::vector<double> strikes = bvix_strikes(kSpot);
      std::vector<double> calls, puts;
      for (double k : strikes) {
        calls.push_back(bsm_price(ctx, k, vol));
        puts.push_back(put_from_parity(calls.back(), ctx, k).put);
      }
      return term_inputs_from_chain(strikes, calls, puts, kRate, years);
    };
    const double v = bvix(e, term(e.t1_years()), term(e.t2_years()));
    const double err = t::rel_err(v, 100.0 * vol);
    o.require(err <= 0.05, "sigma=" + fmt("%.1f", vol) + " gives " + fmt("%.2f", v));
    o.note("sigma " + fmt("%.1f", vol) + " -> " + fmt("%.2f", v));
  }
}

// 9. Normalized intrinsic-time volatility tracks normalized rolling STD.
void c9_comovement(Outcome& o) {
  // Regimes of 500 days each with sigma3 scaled by a slowly moving factor.
  const double scale[] = {1.0, 1.6, 0.8, 1.3, 0.6, 1.1};
  const NdigParams b = NdigParams::reference();
  std::vector<double> r;
  for (std::size_t j = 0; j < std::size(scale); ++j) {
    const NdigParams p(b.mu3(), b.sigma3() * scale[j], b.rho(), b.lambda_T(), b.lambda_U());
    const auto part = simulate_returns(p, 500, 9000 + j);
    r.insert(r.end(), part.begin(), part.end());
  }
  const PriceSeries prices = t::prices_from_returns(r);
  const ReturnSeries returns = prices.log_returns();
  RollingConfig rc;
  rc.window = 250;
  rc.step = 1;
  rc.warm_start = true;
  const RollingFitSeries fits = rolling_fit(returns, rc);
  const VolatilitySeries it = normalize(ndig_it_series(fits));
  const VolatilitySeries sd = normalize(rolling_std_vol(returns, rc.window));
  const double c = pearson(it.values, sd.values);
  o.require(it.size() == sd.size(), "series lengths differ");
  o.require(c >= 0.95, "pearson " + fmt("%.4f", c));
  o.note(std::to_string(it.size()) + " windows, pearson " + fmt("%.4f", c));
}

// 10. The command-line pipeline is byte-identical across runs.
void c10_determinism(Outcome& o) {
  const auto dir = t::scratch_dir("acceptance_pipeline");
  const auto prices = t::prices_from_returns(simulate_returns(NdigParams::reference(), 1010, 1234));
  t::write_file(dir / "prices.csv", t::price_csv(prices));
  std::vector<std::filesystem::path> outs{dir / "run1", dir / "run2"};
  for (const auto& out : outs) {
    const std::string cmd = std::string(NDIG_CLI_PATH) + " pipeline --input " + (dir / "prices.csv").string() +
                            " --output-dir " + out.string() + " --seed 99 > /dev/null 2>&1";
    o.require(std::system(cmd.c_str()) == 0, "pipeline exited nonzero");
  }
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(outs[0])) {
    ++files;
    const auto other = outs[1] / e.path().filename();
    o.require(t::read_file(e.path()) == t::read_file(other), e.path().filename().string() + " differs");
  }
  o.require(files == 7, std::to_string(files) + " output files");
  o.note(std::to_string(files) + " files identical");
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "cgf/chf consistency", 1.0, c1_cgf_chf},
      {2, "analytic vs Monte Carlo moments", 30.0, c2_mc_moments},
      {3, "martingale property", 60.0, c3_martingale},
      {4, "FFT vs quadrature oracle", 10.0, c4_fft_vs_oracle},
      {5, "Black-Scholes limit", 10.0, c5_bsm_limit},
      {6, "parity, monotonicity, bounds", 5.0, c6_surface},
      {7, "estimation recovery", 300.0, c7_estimation},
      {8, "volatility index mechanics", 30.0, c8_vix},
      {9, "intrinsic-time vs historical co-movement", 600.0, c9_comovement},
      {10, "end-to-end determinism", 120.0, c10_determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= c.budget_seconds, "runtime over " + fmt("%.0f", c.budget_seconds) + " s");
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s (%s) [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
