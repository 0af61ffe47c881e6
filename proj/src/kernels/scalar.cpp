#include <cmath>

#include "ndig/kernels.hpp"

namespace ndig::kernels::scalar {

CentralSums central_sums(std::span<const double> x) {
  CentralSums out;
  out.n = x.size();
  if (x.empty()) return out;
  double sum = 0.0;
  for (double xi : x) sum += xi;
  out.mean = sum / static_cast<double>(x.size());
  for (double xi : x) {
    const double d = xi - out.mean;
    const double d2 = d * d;
    out.m2 += d2;
    out.m3 += d2 * d;
    out.m4 += d2 * d2;
  }
  return out;
}

void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    double c = 0.0;
    double s = 0.0;
    for (double xi : x) {
      const double arg = v[k] * xi;
      c += std::cos(arg);
      s += std::sin(arg);
    }
    re[k] = c;
    im[k] = s;
  }
}

}  // namespace ndig::kernels::scalar
