#include "ndig/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ndig/error.hpp"
#include "ndig/kernels.hpp"
#include "ndig/parallel.hpp"

namespace ndig {

namespace {

void require_ig_params(double lambda, double mu) {
  if (!(std::isfinite(lambda) && lambda > 0.0) || !(std::isfinite(mu) && mu > 0.0)) {
    throw DomainError("inverse Gaussian requires lambda > 0 and mu > 0 (got lambda = " + std::to_string(lambda) +
                      ", mu = " + std::to_string(mu) + ")");
  }
}

void validate_grid(std::span<const double> times) {
  if (times.size() < 2) throw DomainError("simulate_paths: time grid needs at least two points");
  if (times.front() != 0.0) throw DomainError("simulate_paths: time grid must start at 0");
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (!(times[j] > times[j - 1]) || !std::isfinite(times[j])) {
      throw DomainError("simulate_paths: time grid must be strictly increasing");
    }
  }
}

}  // namespace

double draw_ig(Xoshiro256& rng, std::normal_distribution<double>& normal, double lambda, double mu) {
  const double z = normal(rng);
  const double y = z * z;
  if (y == 0.0) return mu;
  // Smaller root of the chi-square(1) transformation, written without cancellation:
  // mu + mu^2 y/(2 lambda) - mu/(2 lambda) sqrt(4 mu lambda y + mu^2 y^2).
  const double my = mu * y;
  const double root = std::sqrt(4.0 * mu * lambda * y + my * my);
  const double denom = root + my;
  double x = 4.0 * mu * mu * lambda * y / (denom * denom);
  x = std::max(x, std::numeric_limits<double>::min());
  return rng.uniform() * (mu + x) <= mu ? x : mu * mu / x;
}

std::vector<double> sample_ig(double lambda, double mu, std::size_t n, std::uint64_t seed) {
  require_ig_params(lambda, mu);
  if (n == 0) throw DomainError("sample_ig: n must be at least 1");
  Xoshiro256 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> out(n);
  for (auto& x : out) x = draw_ig(rng, normal, lambda, mu);
  return out;
}

StepDraw draw_step(Xoshiro256& rng, std::normal_distribution<double>& normal, const NdigParams& p, double dt) {
  StepDraw s{};
  s.outer = draw_ig(rng, normal, p.lambda_U() * dt * dt, NdigParams::mu_U() * dt);
  s.inner = draw_ig(rng, normal, p.lambda_T() * s.outer * s.outer, NdigParams::mu_T() * s.outer);
  s.dx = p.mu3() * dt + p.gamma() * s.outer + p.rho() * s.inner + p.sigma3() * std::sqrt(s.inner) * normal(rng);
  return s;
}

PathSet simulate_paths(const NdigParams& p, std::span<const double> times, std::size_t n_paths, double x0,
                       std::uint64_t seed, unsigned threads) {
  validate_grid(times);
  if (n_paths == 0) throw DomainError("simulate_paths: n_paths must be at least 1");
  PathSet out;
  out.times.assign(times.begin(), times.end());
  out.n_paths = n_paths;
  out.seed = seed;
  const std::size_t m = times.size();
  out.values.resize(n_paths * m);
  parallel_for_chunks(n_paths, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Xoshiro256 rng(stream_seed(seed, i));
      std::normal_distribution<double> normal;
      double* row = out.values.data() + i * m;
      row[0] = x0;
      for (std::size_t j = 1; j < m; ++j) {
        row[j] = row[j - 1] + draw_step(rng, normal, p, times[j] - times[j - 1]).dx;
      }
    }
  });
  return out;
}

std::vector<double> simulate_returns(const NdigParams& p, std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(stream_seed(seed, 0));
  std::normal_distribution<double> normal;
  std::vector<double> out(n);
  for (auto& r : out) r = draw_step(rng, normal, p, 1.0).dx;
  return out;
}

bool SampleStats::higher_moments_defined() const { return std::isfinite(skewness) && std::isfinite(kurtosis); }

SampleStats sample_stats(std::span<const double> x) {
  if (x.empty()) throw DomainError("sample_stats: empty sample");
  const kernels::CentralSums cs = kernels::central_sums(x);
  const double n = static_cast<double>(x.size());
  SampleStats s;
  s.n = x.size();
  s.mean = cs.mean;
  s.variance = x.size() > 1 ? cs.m2 / (n - 1.0) : 0.0;
  const double m2 = cs.m2 / n;
  const double m4 = cs.m4 / n;
  if (m2 > 0.0) {
    s.skewness = (cs.m3 / n) / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
  } else {
    s.skewness = std::numeric_limits<double>::quiet_NaN();
    s.kurtosis = std::numeric_limits<double>::quiet_NaN();
  }
  s.se_mean = std::sqrt(s.variance / n);
  if (x.size() > 1) {
    const double v2 = s.variance * s.variance;
    s.se_variance = std::sqrt(std::max(0.0, (m4 - v2 * (n - 3.0) / (n - 1.0)) / n));
  }
  return s;
}

SampleStats mc_stats(const PathSet& paths, double horizon) {
  const auto it = std::find(paths.times.begin(), paths.times.end(), horizon);
  if (it == paths.times.end()) {
    throw DomainError("mc_stats: horizon " + std::to_string(horizon) + " is not on the time grid");
  }
  const std::size_t j = static_cast<std::size_t>(it - paths.times.begin());
  std::vector<double> inc(paths.n_paths);
  for (std::size_t i = 0; i < paths.n_paths; ++i) inc[i] = paths.at(i, j) - paths.at(i, 0);
  return sample_stats(inc);
}

McPrice mc_option_price(const NdigParams& p, double r, double s0, double strike, double maturity,
                        std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  if (!(s0 > 0.0) || !(maturity > 0.0) || !(strike >= 0.0)) {
    throw DomainError("mc_option_price: requires s0 > 0, maturity > 0, strike >= 0");
  }
  if (n_paths < 2) throw DomainError("mc_option_price: need at least two paths");
  if (!feasible_interval(p).contains(1.0)) {
    throw InfeasibleError("mc_option_price: cgf(1) undefined, mean correction does not exist");
  }
  const double k1 = cgf(1.0, p);
  const double days = 365.0 * maturity;
  const double drift = (r / 365.0 - k1) * days;
  const double discount = std::exp(-r * maturity);
  std::vector<double> payoff(n_paths);
  // A single exact step to maturity: Levy increments need no time discretization.
  parallel_for_chunks(n_paths, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Xoshiro256 rng(stream_seed(seed, i));
      std::normal_distribution<double> normal;
      const double x = draw_step(rng, normal, p, days).dx;
      payoff[i] = discount * std::max(s0 * std::exp(drift + x) - strike, 0.0);
    }
  });
  const SampleStats st = sample_stats(payoff);
  return {st.mean, st.se_mean};
}

}  // namespace ndig
