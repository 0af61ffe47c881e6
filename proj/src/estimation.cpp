#include "ndig/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ndig/error.hpp"
#include "ndig/kernels.hpp"
#include "ndig/nelder_mead.hpp"
#include "ndig/parallel.hpp"
#include "ndig/rng.hpp"

namespace ndig {

void ReturnSeries::validate() const {
  if (!dates.empty() && dates.size() != returns.size()) {
    throw DataError("ReturnSeries: dates and returns differ in length");
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i] > dates[i - 1])) throw DataError("ReturnSeries: dates must be strictly increasing");
  }
  for (double r : returns) {
    if (!std::isfinite(r)) throw DataError("ReturnSeries: non-finite return");
  }
}

void PriceSeries::validate() const {
  if (dates.size() != closes.size()) throw DataError("PriceSeries: dates and closes differ in length");
  for (std::size_t i = 0; i < closes.size(); ++i) {
    if (!(std::isfinite(closes[i]) && closes[i] > 0.0)) {
      throw DataError("PriceSeries: price at row " + std::to_string(i + 1) + " is not positive");
    }
    if (i > 0 && !(dates[i] > dates[i - 1])) {
      throw DataError("PriceSeries: dates not strictly increasing at " + format_date(dates[i]));
    }
  }
}

ReturnSeries PriceSeries::log_returns() const {
  validate();
  ReturnSeries r;
  if (closes.size() < 2) return r;
  r.dates.assign(dates.begin() + 1, dates.end());
  r.returns.resize(closes.size() - 1);
  for (std::size_t i = 1; i < closes.size(); ++i) r.returns[i - 1] = std::log(closes[i] / closes[i - 1]);
  return r;
}

MomentSet empirical_moments(std::span<const double> returns) {
  if (returns.size() < 4) {
    throw DegenerateSeriesError("empirical_moments: need at least 4 returns, got " + std::to_string(returns.size()));
  }
  const kernels::CentralSums cs = kernels::central_sums(returns);
  const double n = static_cast<double>(returns.size());
  const double m2 = cs.m2 / n;
  // Rounding leaves a residual spread of order eps |mean| in a constant series.
  constexpr double kTiny = 64.0 * std::numeric_limits<double>::epsilon();
  if (!(m2 > kTiny * kTiny * cs.mean * cs.mean)) {
    throw DegenerateSeriesError("empirical_moments: series has zero variance");
  }
  MomentSet m{};
  m.mean = cs.mean;
  m.variance = cs.m2 / (n - 1.0);
  m.skewness = (cs.m3 / n) / std::pow(m2, 1.5);
  m.kurtosis = (cs.m4 / n) / (m2 * m2);
  return m;
}

std::complex<double> empirical_chf(std::span<const double> returns, double v) {
  if (returns.empty()) throw DomainError("empirical_chf: empty series");
  double re = 0.0, im = 0.0;
  kernels::ecf_sums(returns, std::span<const double>(&v, 1), std::span<double>(&re, 1), std::span<double>(&im, 1));
  const double n = static_cast<double>(returns.size());
  return {re / n, im / n};
}

std::vector<double> ChfQuadrature::grid() const {
  if (nodes < 2 || !(v_max > 0.0)) throw DomainError("ChfQuadrature: need at least 2 nodes and v_max > 0");
  std::vector<double> v(nodes);
  const double h = 2.0 * v_max / static_cast<double>(nodes - 1);
  for (std::size_t k = 0; k < nodes; ++k) v[k] = -v_max + h * static_cast<double>(k);
  return v;
}

std::vector<double> ChfQuadrature::weights() const {
  const std::vector<double> v = grid();
  const double h = 2.0 * v_max / static_cast<double>(nodes - 1);
  std::vector<double> w(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = v[k] / weight_scale;
    w[k] = h * std::exp(-t * t);
  }
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

EstimationObjective::EstimationObjective(std::span<const double> returns, const ChfQuadrature& quadrature)
    : empirical_(empirical_moments(returns)), grid_(quadrature.grid()), weights_(quadrature.weights()) {
  if (empirical_.mean == 0.0 || empirical_.skewness == 0.0) {
    throw DegenerateSeriesError("objective: an empirical moment is exactly zero, moment ratios are undefined");
  }
  std::vector<double> re(grid_.size()), im(grid_.size());
  kernels::ecf_sums(returns, grid_, re, im);
  const double n = static_cast<double>(returns.size());
  ecf_.resize(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) ecf_[k] = {re[k] / n, im[k] / n};
}

ObjectiveTerms EstimationObjective::terms(const NdigParams& p) const {
  const MomentSet model = moments(p);
  auto sq_ratio = [](double m, double e) {
    const double d = 1.0 - m / e;
    return d * d;
  };
  ObjectiveTerms t;
  t.dm1 = sq_ratio(model.mean, empirical_.mean);
  t.dm2 = sq_ratio(model.variance, empirical_.variance);
  t.dm3 = sq_ratio(model.skewness, empirical_.skewness);
  t.dm4 = sq_ratio(model.kurtosis, empirical_.kurtosis);
  double cf = 0.0;
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    cf += weights_[k] * std::norm(ecf_[k] - chf(grid_[k], p));
  }
  t.dcf = cf;
  return t;
}

ObjectiveTerms objective(const NdigParams& p, std::span<const double> returns, const ChfQuadrature& quadrature) {
  return EstimationObjective(returns, quadrature).terms(p);
}

namespace {

constexpr double kLogMin = -30.0;
constexpr double kLogMax = 30.0;

// Search coordinates: (mu3/scale, ln sigma3, rho/scale, ln lambda_T, ln lambda_U).
struct Coordinates {
  double scale;

  std::array<double, 5> encode(const NdigParams& p) const {
    return {p.mu3() / scale, std::log(p.sigma3()), p.rho() / scale, std::log(p.lambda_T()), std::log(p.lambda_U())};
  }

  NdigParams decode(const std::vector<double>& x) const {
    auto ex = [](double v) { return std::exp(std::clamp(v, kLogMin, kLogMax)); };
    return {x[0] * scale, ex(x[1]), x[2] * scale, ex(x[3]), ex(x[4])};
  }
};

struct Search {
  const EstimationObjective& objective;
  Coordinates coords;
  double penalty;

  double value(const std::vector<double>& x) const {
    for (double v : x) {
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    }
    try {
      const NdigParams p = coords.decode(x);
      double f = objective.terms(p).total();
      if (!feasible_interval(p).contains(1.0)) f += penalty;
      return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  NelderMeadResult run(const NdigParams& start, double step_scale, const FitConfig& cfg) const {
    const auto x0 = coords.encode(start);
    const std::vector<double> steps{0.2 * step_scale, 0.2 * step_scale, 0.2 * step_scale, 0.5 * step_scale,
                                    0.5 * step_scale};
    NelderMeadOptions opt;
    opt.max_evaluations = cfg.max_evaluations;
    opt.f_tolerance = cfg.f_tolerance;
    opt.x_tolerance = cfg.x_tolerance;
    return nelder_mead([this](const std::vector<double>& x) { return value(x); },
                       std::vector<double>(x0.begin(), x0.end()), steps, opt);
  }
};

FitResult make_result(const EstimationObjective& obj, const Coordinates& coords, const NelderMeadResult& nm,
                      std::size_t evaluations) {
  FitResult r;
  r.params = coords.decode(nm.x);
  r.terms = obj.terms(r.params);
  r.objective = r.terms.total();
  r.converged = nm.converged && feasible_interval(r.params).contains(1.0);
  r.evaluations = evaluations;
  return r;
}

}  // namespace

std::vector<NdigParams> initial_candidates(const MomentSet& e) {
  const double sd = std::sqrt(e.variance);
  // For rho = 0 the excess kurtosis is 3 d with d = 1/lambda_T + 1/lambda_U.
  const double excess = std::max(e.kurtosis - 3.0, 0.05);
  const double d = excess / 3.0;
  // Small-rho skewness is about 3 d rho / sigma3.
  double rho = e.skewness * sd / (3.0 * d);
  const double rho_cap = std::sqrt(0.5 * e.variance / d);
  rho = std::clamp(rho, -rho_cap, rho_cap);
  const double sigma3 = std::sqrt(e.variance - d * rho * rho);
  std::vector<NdigParams> out;
  for (double f : {0.01, 0.05, 0.2, 0.5, 0.8, 0.95}) {
    const double lT = 1.0 / (f * d);
    const double lU = 1.0 / ((1.0 - f) * d);
    out.emplace_back(e.mean - rho, sigma3, rho, lT, lU);
  }
  return out;
}

FitResult fit(std::span<const double> returns, const FitConfig& config, const std::optional<NdigParams>& start) {
  if (returns.size() < config.min_length) {
    throw DegenerateSeriesError("fit: series has " + std::to_string(returns.size()) + " returns, need at least " +
                                std::to_string(config.min_length));
  }
  const EstimationObjective obj(returns, config.quadrature);
  const Search search{obj, Coordinates{std::sqrt(obj.empirical().variance)}, config.infeasibility_penalty};

  std::size_t evaluations = 0;
  NelderMeadResult best{{}, std::numeric_limits<double>::infinity(), 0, false};
  auto consider = [&](const NelderMeadResult& nm) {
    evaluations += nm.evaluations;
    if (nm.value < best.value) best = nm;
  };

  if (start) {
    consider(search.run(*start, 0.25, config));
  } else {
    std::vector<NdigParams> cands = initial_candidates(obj.empirical());
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      ranked.emplace_back(search.value([&] {
                            const auto x = search.coords.encode(cands[i]);
                            return std::vector<double>(x.begin(), x.end());
                          }()),
                          i);
    }
    evaluations += cands.size();
    std::stable_sort(ranked.begin(), ranked.end());
    Xoshiro256 rng(config.seed);
    std::normal_distribution<double> normal;
    const std::size_t starts = std::max<std::size_t>(1, config.restarts);
    for (std::size_t r = 0; r < starts; ++r) {
      auto x = search.coords.encode(cands[ranked[r % ranked.size()].second]);
      if (r >= ranked.size()) {
        for (auto& xi : x) xi += 0.3 * normal(rng);
      }
      consider(search.run(search.coords.decode(std::vector<double>(x.begin(), x.end())), 1.0, config));
    }
  }
  // Restart from the optimum so a collapsed simplex does not stop the search early.
  const NdigParams polish_from = search.coords.decode(best.x);
  const NelderMeadResult polished = search.run(polish_from, 0.05, config);
  consider(polished);
  best.converged = polished.converged;
  return make_result(obj, search.coords, best, evaluations);
}

RollingFitSeries rolling_fit(const ReturnSeries& series, const RollingConfig& config) {
  series.validate();
  if (config.window == 0 || config.step == 0) throw DomainError("rolling_fit: window and step must be positive");
  if (series.size() < config.window) {
    throw DegenerateSeriesError("rolling_fit: series has " + std::to_string(series.size()) +
                                " returns, shorter than the window " + std::to_string(config.window));
  }
  RollingFitSeries out;
  out.window_length = config.window;
  out.step = config.step;
  for (std::size_t end = config.window; end <= series.size(); end += config.step) {
    out.window_end.push_back(end);
    if (!series.dates.empty()) out.end_dates.push_back(series.dates[end - 1]);
  }
  out.fits.resize(out.window_end.size());
  const std::span<const double> all(series.returns);
  auto window_of = [&](std::size_t i) { return all.subspan(out.window_end[i] - config.window, config.window); };

  if (config.warm_start) {
    std::optional<NdigParams> previous;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.fits[i] = fit(window_of(i), config.fit, previous);
      previous = out.fits[i].params;
    }
  } else {
    parallel_for_chunks(out.size(), config.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) out.fits[i] = fit(window_of(i), config.fit);
    });
  }
  return out;
}

}  // namespace ndig
