#pragma once

// Analytic layer of the normal double inverse Gaussian (NDIG) log-price model
//
//   X_t = X_0 + mu3 t + gamma U(t) + rho T(U(t)) + sigma3 B_{T(U(t))}
//
// with U and T independent inverse Gaussian subordinators, U(1) ~ IG(lambda_U, 1)
// and T(1) ~ IG(lambda_T, 1). All quantities are per unit (daily) time.

#include <complex>

namespace ndig {

class NdigParams {
 public:
  /// Throws DomainError unless sigma3, lambda_T, lambda_U are positive and finite
  /// and mu_T = mu_U = 1.
  NdigParams(double mu3, double sigma3, double rho, double lambda_T, double lambda_U,
             double gamma = 0.0, double mu_T = 1.0, double mu_U = 1.0);

  /// Global estimates for daily bitcoin log-returns (gamma = 0).
  static NdigParams reference();

  double mu3() const noexcept { return mu3_; }
  double sigma3() const noexcept { return sigma3_; }
  double rho() const noexcept { return rho_; }
  double lambda_T() const noexcept { return lambda_T_; }
  double lambda_U() const noexcept { return lambda_U_; }
  double gamma() const noexcept { return gamma_; }
  static constexpr double mu_T() noexcept { return 1.0; }
  static constexpr double mu_U() noexcept { return 1.0; }

  friend bool operator==(const NdigParams&, const NdigParams&) = default;

 private:
  double mu3_;
  double sigma3_;
  double rho_;
  double lambda_T_;
  double lambda_U_;
  double gamma_;
};

/// Real interval of cgf arguments where both nested radicals are real.
struct FeasibleInterval {
  double w_lo;
  double w_hi;

  bool contains(double w) const noexcept { return w >= w_lo && w <= w_hi; }
};

/// Moments of the unit-time increment X_1. `kurtosis` is the standardized fourth
/// central moment (3 for a Gaussian).
struct MomentSet {
  double mean;
  double variance;
  double skewness;
  double kurtosis;

  double excess_kurtosis() const noexcept { return kurtosis - 3.0; }
};

/// Shared intermediates of the moment formulas:
/// s = gamma + rho, c = rho/lambda_T + s/lambda_U, d = 1/lambda_T + 1/lambda_U,
/// sigma = rho^2/lambda_T + sigma3^2.
struct MomentIntermediates {
  double s;
  double c;
  double d;
  double sigma;
};

/// Inner radicand h(w) = 1 - 2 rho w / lambda_T - sigma3^2 w^2 / lambda_T.
double inner_radicand(double w, const NdigParams& p) noexcept;

/// Outer radicand g(w) = 1 - 2 (lambda_T/lambda_U)(1 - sqrt h(w)) - 2 gamma w / lambda_U.
/// Throws DomainError when h(w) < 0.
double outer_radicand(double w, const NdigParams& p);

/// Cumulant generating function K(w) = ln E[exp(w X_1)]. Throws DomainError
/// outside the feasible interval.
double cgf(double w, const NdigParams& p);

/// Characteristic exponent psi(u) = ln E[exp(i u X_1)] for complex u inside the
/// strip of analyticity; phi_{X_t}(u) = exp(t psi(u)).
std::complex<double> char_exponent(std::complex<double> u, const NdigParams& p);

std::complex<double> chf(double v, const NdigParams& p);
std::complex<double> chf(std::complex<double> u, const NdigParams& p);

MomentIntermediates moment_intermediates(const NdigParams& p) noexcept;

/// Mean, variance, skewness and kurtosis of X_1 for general gamma.
MomentSet moments(const NdigParams& p) noexcept;

/// Reduced formulas valid for gamma = 0; throws DomainError otherwise.
MomentSet moments_gamma_zero(const NdigParams& p);

/// Maximal interval {h(w) >= 0, g(w) >= 0}. Always contains 0.
FeasibleInterval feasible_interval(const NdigParams& p);

/// Largest damping a such that w = 1 + a stays feasible. Throws InfeasibleError
/// when w_hi <= 1, i.e. when the mean correction K(1) itself does not exist.
double a_max(const NdigParams& p);

}  // namespace ndig
