#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ndig/error.hpp"
#include "ndig/kernels.hpp"

namespace ndig::kernels {

#ifndef NDIG_HAVE_AVX2_TU
namespace avx2 {
CentralSums central_sums(std::span<const double> x) { return scalar::central_sums(x); }
void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im) {
  scalar::ecf_sums(x, v, re, im);
}
}  // namespace avx2
#endif

#ifndef NDIG_HAVE_NEON_TU
namespace neon {
CentralSums central_sums(std::span<const double> x) { return scalar::central_sums(x); }
void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im) {
  scalar::ecf_sums(x, v, re, im);
}
}  // namespace neon
#endif

namespace {

Isa detect() noexcept {
  if (const char* env = std::getenv("NDIG_KERNELS"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::scalar;
  }
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(NDIG_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#ifdef NDIG_HAVE_NEON_TU
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw DomainError("kernels: variant '" + std::string(isa_name(isa)) + "' is not available on this CPU");
  }
  current().store(isa, std::memory_order_relaxed);
}

void reset_isa() noexcept { current().store(detect(), std::memory_order_relaxed); }

CentralSums central_sums(std::span<const double> x) {
  switch (active_isa()) {
    case Isa::avx2:
      return avx2::central_sums(x);
    case Isa::neon:
      return neon::central_sums(x);
    case Isa::scalar:
      break;
  }
  return scalar::central_sums(x);
}

void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im) {
  if (re.size() != v.size() || im.size() != v.size()) {
    throw DomainError("ecf_sums: output spans must match the frequency grid");
  }
  switch (active_isa()) {
    case Isa::avx2:
      return avx2::ecf_sums(x, v, re, im);
    case Isa::neon:
      return neon::ecf_sums(x, v, re, im);
    case Isa::scalar:
      break;
  }
  scalar::ecf_sums(x, v, re, im);
}

}  // namespace ndig::kernels
