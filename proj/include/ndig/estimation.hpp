#pragma once

// Parameter estimation for the NDIG model by matching the first four moments and the
// empirical characteristic function of daily log-returns. gamma is fixed at 0 and
// mu_T = mu_U = 1; the free parameters are (mu3, sigma3, rho, lambda_T, lambda_U).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ndig/core_model.hpp"
#include "ndig/date.hpp"

namespace ndig {

struct ReturnSeries {
  std::vector<Date> dates;  // date of each return (the later of the two prices)
  std::vector<double> returns;

  std::size_t size() const noexcept { return returns.size(); }
  /// Throws DataError on length mismatch, unsorted dates or non-finite values.
  void validate() const;
};

/// Daily closes. Log-returns drop the first row.
struct PriceSeries {
  std::vector<Date> dates;
  std::vector<double> closes;

  std::size_t size() const noexcept { return closes.size(); }
  /// Throws DataError on length mismatch, unsorted or duplicate dates, non-positive prices.
  void validate() const;
  ReturnSeries log_returns() const;
};

/// Sample mean, unbiased variance, standardized skewness and (non-excess) kurtosis.
/// Throws DegenerateSeriesError for n < 4 or zero variance.
MomentSet empirical_moments(std::span<const double> returns);

/// (1/n) sum_j exp(i v x_j).
std::complex<double> empirical_chf(std::span<const double> returns, double v);

/// Weighted trapezoid rule for the chf distance: nodes on [-v_max, v_max], weight
/// exp(-(v / weight_scale)^2).
struct ChfQuadrature {
  double v_max = 20.0;
  std::size_t nodes = 101;
  double weight_scale = 1.0;

  std::vector<double> grid() const;
  std::vector<double> weights() const;
};

/// The five squared deviations; objective = their sum.
struct ObjectiveTerms {
  double dm1 = 0.0;  // (1 - E_model / E_emp)^2
  double dm2 = 0.0;  // variance
  double dm3 = 0.0;  // skewness
  double dm4 = 0.0;  // kurtosis
  double dcf = 0.0;  // weighted integral of |ecf - chf|^2

  double total() const noexcept { return dm1 + dm2 + dm3 + dm4 + dcf; }
};

/// Precomputes the empirical moments and empirical chf of one return sample.
class EstimationObjective {
 public:
  EstimationObjective(std::span<const double> returns, const ChfQuadrature& quadrature);

  ObjectiveTerms terms(const NdigParams& p) const;
  const MomentSet& empirical() const noexcept { return empirical_; }
  std::span<const std::complex<double>> ecf() const noexcept { return ecf_; }

 private:
  MomentSet empirical_;
  std::vector<double> grid_;
  std::vector<double> weights_;
  std::vector<std::complex<double>> ecf_;
};

ObjectiveTerms objective(const NdigParams& p, std::span<const double> returns, const ChfQuadrature& quadrature = {});

struct FitConfig {
  std::size_t restarts = 5;
  std::size_t max_evaluations = 5000;  // per start
  double f_tolerance = 1e-13;
  double x_tolerance = 1e-7;
  double infeasibility_penalty = 1e6;
  std::size_t min_length = 100;
  std::uint64_t seed = 20240607;
  ChfQuadrature quadrature;
};

struct FitResult {
  NdigParams params = NdigParams::reference();
  ObjectiveTerms terms;
  double objective = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
};

/// Moment-matched starting point used by `fit`: rho from the skew sign, sigma3 from
/// the sample standard deviation, lambdas from the excess kurtosis with the split
/// between the two subordinators chosen on a coarse grid.
std::vector<NdigParams> initial_candidates(const MomentSet& empirical);

/// Minimizes the objective. Throws DegenerateSeriesError for short or constant
/// series. When `start` is given a single warm-started search is run from it.
FitResult fit(std::span<const double> returns, const FitConfig& config = {},
              const std::optional<NdigParams>& start = std::nullopt);

struct RollingConfig {
  std::size_t window = 1008;
  std::size_t step = 1;
  bool warm_start = true;
  unsigned threads = 0;  // used only for cold starts
  FitConfig fit;
};

struct RollingFitSeries {
  std::size_t window_length = 0;
  std::size_t step = 0;
  std::vector<std::size_t> window_end;  // number of returns consumed, i.e. end index + 1
  std::vector<Date> end_dates;
  std::vector<FitResult> fits;

  std::size_t size() const noexcept { return fits.size(); }
};

/// Windows end at returns window, window + step, ... (1-based counts).
RollingFitSeries rolling_fit(const ReturnSeries& series, const RollingConfig& config = {});

}  // namespace ndig
