#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference implementation and
// vectorized variants (AVX2+FMA on x86-64, NEON on AArch64); the active variant is
// picked once at runtime from CPU capabilities and can be overridden for testing.

#include <cstddef>
#include <span>
#include <string_view>

namespace ndig::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

/// True when the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Variant used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Overrides the dispatch choice. Throws DomainError if the variant is unavailable.
void force_isa(Isa isa);

/// Restores the CPU-detected choice (NDIG_KERNELS=scalar in the environment pins scalar).
void reset_isa() noexcept;

/// Mean and sums of centered powers: m_k = sum (x_i - mean)^k for k = 2, 3, 4.
struct CentralSums {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

/// Sums of cos(v_k x_i) and sin(v_k x_i) over i for every frequency v_k.
/// `re` and `im` must have the same length as `v`.
using EcfSumsFn = void (*)(std::span<const double> x, std::span<const double> v, std::span<double> re,
                           std::span<double> im);
using CentralSumsFn = CentralSums (*)(std::span<const double> x);

CentralSums central_sums(std::span<const double> x);
void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im);

namespace scalar {
CentralSums central_sums(std::span<const double> x);
void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im);
}  // namespace scalar

namespace avx2 {
CentralSums central_sums(std::span<const double> x);
void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im);
}  // namespace avx2

namespace neon {
CentralSums central_sums(std::span<const double> x);
void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im);
}  // namespace neon

}  // namespace ndig::kernels
