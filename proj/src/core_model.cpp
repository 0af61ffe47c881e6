#include "ndig/core_model.hpp"

#include <cmath>
#include <string>

#include "ndig/error.hpp"

namespace ndig {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// Radicands this close to zero are rounding noise at the feasibility boundary.
constexpr double kRadicandSlack = 1e-12;

double clamp_radicand(double value, const char* which, double w) {
  if (value >= 0.0) return value;
  if (value > -kRadicandSlack) return 0.0;
  throw DomainError(std::string("cgf: negative ") + which + " radicand at w = " + std::to_string(w));
}

// Roots of sigma3^2 w^2 + 2 rho w - bound = 0, bound > 0, evaluated without cancellation.
FeasibleInterval quadratic_roots(double sigma3, double rho, double bound) {
  const double s2 = sigma3 * sigma3;
  const double disc = std::sqrt(rho * rho + s2 * bound);
  FeasibleInterval out{};
  if (rho >= 0.0) {
    out.w_hi = bound / (disc + rho);
    out.w_lo = -(disc + rho) / s2;
  } else {
    out.w_hi = (disc - rho) / s2;
    out.w_lo = -bound / (disc - rho);
  }
  return out;
}

// Bisection for the sign change of a concave function with f(0) > 0 and f(edge) < 0.
template <typename F>
double concave_boundary(F f, double edge) {
  double inside = 0.0;
  double outside = edge;
  for (int it = 0; it < 200 && inside != outside; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (f(mid) >= 0.0) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

}  // namespace

NdigParams::NdigParams(double mu3, double sigma3, double rho, double lambda_T, double lambda_U,
                       double gamma, double mu_T, double mu_U)
    : mu3_(mu3), sigma3_(sigma3), rho_(rho), lambda_T_(lambda_T), lambda_U_(lambda_U), gamma_(gamma) {
  if (!std::isfinite(mu3) || !std::isfinite(rho) || !std::isfinite(gamma)) {
    throw DomainError("NdigParams: mu3, rho and gamma must be finite");
  }
  if (!positive_finite(sigma3)) throw DomainError("NdigParams: sigma3 must be positive");
  if (!positive_finite(lambda_T)) throw DomainError("NdigParams: lambda_T must be positive");
  if (!positive_finite(lambda_U)) throw DomainError("NdigParams: lambda_U must be positive");
  if (mu_T != 1.0 || mu_U != 1.0) {
    throw DomainError("NdigParams: mu_T and mu_U are fixed to 1 for identifiability");
  }
}

NdigParams NdigParams::reference() { return {0.004, 0.0551, -0.0008, 9.9293, 0.145}; }

double inner_radicand(double w, const NdigParams& p) noexcept {
  return 1.0 - (2.0 * p.rho() * w + p.sigma3() * p.sigma3() * w * w) / p.lambda_T();
}

double outer_radicand(double w, const NdigParams& p) {
  const double h = clamp_radicand(inner_radicand(w, p), "inner", w);
  return 1.0 - 2.0 * (p.lambda_T() / p.lambda_U()) * (1.0 - std::sqrt(h)) -
         2.0 * p.gamma() * w / p.lambda_U();
}

double cgf(double w, const NdigParams& p) {
  // lambda (1 - sqrt(1 - x/lambda)) is evaluated as x / (1 + sqrt(1 - x/lambda))
  // so that large shapes (the Brownian limit) keep full relative precision.
  const double q = 2.0 * p.rho() * w + p.sigma3() * p.sigma3() * w * w;
  const double h = clamp_radicand(1.0 - q / p.lambda_T(), "inner", w);
  const double inner = q / (1.0 + std::sqrt(h));
  const double a = inner + p.gamma() * w;
  const double g = clamp_radicand(1.0 - 2.0 * a / p.lambda_U(), "outer", w);
  return p.mu3() * w + 2.0 * a / (1.0 + std::sqrt(g));
}

std::complex<double> char_exponent(std::complex<double> u, const NdigParams& p) {
  using C = std::complex<double>;
  const C z = C(0.0, 1.0) * u;
  const C q = 2.0 * p.rho() * z + p.sigma3() * p.sigma3() * z * z;
  const C inner = q / (1.0 + std::sqrt(1.0 - q / p.lambda_T()));
  // The gamma slot carries the U(t) loading; it vanishes for gamma = 0.
  const C a = inner + p.gamma() * z;
  return p.mu3() * z + 2.0 * a / (1.0 + std::sqrt(1.0 - 2.0 * a / p.lambda_U()));
}

std::complex<double> chf(std::complex<double> u, const NdigParams& p) {
  return std::exp(char_exponent(u, p));
}

std::complex<double> chf(double v, const NdigParams& p) {
  return chf(std::complex<double>(v, 0.0), p);
}

MomentIntermediates moment_intermediates(const NdigParams& p) noexcept {
  MomentIntermediates m{};
  m.s = p.gamma() + p.rho();
  m.c = p.rho() / p.lambda_T() + m.s / p.lambda_U();
  m.d = 1.0 / p.lambda_T() + 1.0 / p.lambda_U();
  m.sigma = p.rho() * p.rho() / p.lambda_T() + p.sigma3() * p.sigma3();
  return m;
}

MomentSet moments(const NdigParams& p) noexcept {
  const auto [s, c, d, sigma] = moment_intermediates(p);
  const double lT = p.lambda_T();
  const double lU = p.lambda_U();
  const double var = sigma + s * s / lU;
  MomentSet m{};
  m.mean = p.mu3() + s;
  m.variance = var;
  m.skewness = 3.0 * (sigma * c + s * s * s / (lU * lU)) / std::pow(var, 1.5);
  const double k4 = 3.0 * (sigma * sigma * d +
                           2.0 * sigma * (c * c + (p.rho() / lT) * (p.rho() / lT) + 2.0 * (s / lU) * (s / lU)) +
                           5.0 * s * s * s * s / (lU * lU * lU));
  m.kurtosis = k4 / (var * var) + 3.0;
  return m;
}

MomentSet moments_gamma_zero(const NdigParams& p) {
  if (p.gamma() != 0.0) throw DomainError("moments_gamma_zero: requires gamma = 0");
  const double lT = p.lambda_T();
  const double lU = p.lambda_U();
  const double rho = p.rho();
  const double s3sq = p.sigma3() * p.sigma3();
  const double d = 1.0 / lT + 1.0 / lU;
  const double sigma = rho * rho / lT + s3sq;
  const double var = s3sq + d * rho * rho;
  // Third cumulant: 3 rho [sigma3^2 d + rho^2 (1/lT^2 + 1/(lT lU) + 1/lU^2)].
  const double k3 = 3.0 * rho * (s3sq * d + rho * rho * (1.0 / (lT * lT) + 1.0 / (lT * lU) + 1.0 / (lU * lU)));
  const double k4 = 3.0 * sigma * sigma * d +
                    6.0 * rho * rho * sigma * (d * d + 1.0 / (lT * lT) + 2.0 / (lU * lU)) +
                    15.0 * rho * rho * rho * rho / (lU * lU * lU);
  MomentSet m{};
  m.mean = p.mu3() + rho;
  m.variance = var;
  m.skewness = k3 / std::pow(var, 1.5);
  m.kurtosis = k4 / (var * var) + 3.0;
  return m;
}

FeasibleInterval feasible_interval(const NdigParams& p) {
  const double lT = p.lambda_T();
  const double lU = p.lambda_U();
  // h(w) >= 0  <=>  sigma3^2 w^2 + 2 rho w <= lambda_T.
  const FeasibleInterval h_interval = quadratic_roots(p.sigma3(), p.rho(), lT);
  if (p.gamma() == 0.0) {
    // g(w) >= 0  <=>  sqrt(h) >= 1 - lambda_U/(2 lambda_T); when the right side is
    // not positive only h >= 0 binds. Otherwise h >= (1 - lambda_U/(2 lambda_T))^2,
    // i.e. sigma3^2 w^2 + 2 rho w <= lambda_U (1 - lambda_U/(4 lambda_T)).
    if (lU >= 2.0 * lT) return h_interval;
    return quadratic_roots(p.sigma3(), p.rho(), lU * (1.0 - lU / (4.0 * lT)));
  }
  // g is concave on the h-interval with g(0) = 1, so each side has one crossing.
  auto g = [&p](double w) { return outer_radicand(w, p); };
  FeasibleInterval out = h_interval;
  if (g(h_interval.w_hi) < 0.0) out.w_hi = concave_boundary(g, h_interval.w_hi);
  if (g(h_interval.w_lo) < 0.0) out.w_lo = concave_boundary(g, h_interval.w_lo);
  return out;
}

double a_max(const NdigParams& p) {
  const FeasibleInterval fi = feasible_interval(p);
  if (!(fi.w_hi > 1.0)) {
    throw InfeasibleError("a_max: cgf(1) is undefined (w_hi = " + std::to_string(fi.w_hi) +
                          " <= 1); mean correction does not exist");
  }
  return fi.w_hi - 1.0;
}

}  // namespace ndig
