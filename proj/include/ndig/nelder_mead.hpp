#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ndig {

struct NelderMeadOptions {
  std::size_t max_evaluations = 5000;
  double f_tolerance = 1e-14;  // spread of simplex values (absolute)
  double f_relative = 1e-10;   // added tolerance per unit of |best value|
  double x_tolerance = 1e-10;  // max coordinate distance from the best vertex
  // Also stop once the value spread is within the f tolerance and the best value has not
  // improved by more than that tolerance for this many evaluations (flat valleys).
  std::size_t stall_evaluations = 500;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  std::size_t evaluations;
  bool converged;
};

/// Derivative-free simplex minimization (standard reflection/expansion/contraction/
/// shrink coefficients). The initial simplex is x0 plus one vertex per coordinate
/// displaced by steps[i].
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const std::vector<double>& steps, const NelderMeadOptions& options = {});

}  // namespace ndig
