#pragma once

// Monte Carlo engine for the NDIG process. Subordinator increments over a step of
// length dt use the Levy-process law of an IG(lambda, mu) process at time dt,
//   U(t + dt) - U(t) ~ IG(mean = mu dt, shape = lambda dt^2),
// which follows from closure of the IG family under convolution. The inner clock
// is sampled conditionally on the realized outer increment:
//   dT | dU ~ IG(mean = mu_T dU, shape = lambda_T dU^2).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "ndig/core_model.hpp"
#include "ndig/rng.hpp"

namespace ndig {

/// One IG(lambda, mu) variate (mean mu, shape lambda) by the transformation with
/// multiple roots method.
double draw_ig(Xoshiro256& rng, std::normal_distribution<double>& normal, double lambda, double mu);

/// n independent IG(lambda, mu) variates from a single stream seeded by `seed`.
std::vector<double> sample_ig(double lambda, double mu, std::size_t n, std::uint64_t seed);

/// Realized increments of one step of length dt.
struct StepDraw {
  double outer;  // dU
  double inner;  // dT = T(U(t + dt)) - T(U(t))
  double dx;     // increment of X
};

StepDraw draw_step(Xoshiro256& rng, std::normal_distribution<double>& normal, const NdigParams& p, double dt);

struct PathSet {
  std::vector<double> times;
  std::size_t n_paths = 0;
  std::vector<double> values;  // row-major, n_paths x times.size()
  std::uint64_t seed = 0;

  double at(std::size_t path, std::size_t step) const { return values[path * times.size() + step]; }
  std::span<const double> path(std::size_t i) const {
    return std::span<const double>(values).subspan(i * times.size(), times.size());
  }
};

/// Simulates n_paths paths on `times` (strictly increasing, starting at 0). Path i
/// uses the stream stream_seed(seed, i); paths are generated in parallel.
PathSet simulate_paths(const NdigParams& p, std::span<const double> times, std::size_t n_paths, double x0,
                       std::uint64_t seed, unsigned threads = 0);

/// Daily log-returns of a single simulated path of n unit steps.
std::vector<double> simulate_returns(const NdigParams& p, std::size_t n, std::uint64_t seed);

struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;  // NaN when variance is 0
  double kurtosis = 0.0;  // standardized fourth central moment; NaN when variance is 0
  double se_mean = 0.0;
  double se_variance = 0.0;

  bool higher_moments_defined() const;
};

/// Sample statistics with standard errors of the mean and of the variance.
SampleStats sample_stats(std::span<const double> x);

/// Statistics of X_horizon - X_0 across paths; `horizon` must be a grid time.
SampleStats mc_stats(const PathSet& paths, double horizon);

struct McPrice {
  double price;
  double std_error;
};

/// Discounted Monte Carlo call price under the mean-corrected dynamics
/// S_t = S_0 exp((r - K(1)) t + X_t), with t in days (t = 365 * maturity) and
/// r converted to a daily rate. Throws InfeasibleError if K(1) does not exist.
McPrice mc_option_price(const NdigParams& p, double r, double s0, double strike, double maturity,
                        std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

}  // namespace ndig
