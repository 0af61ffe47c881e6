#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ndig/error.hpp"
#include "ndig/kernels.hpp"

using namespace ndig::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::student_t_distribution<double> t(3.0);
  std::vector<double> x(n);
  for (auto& v : x) v = 0.001 + scale * t(rng);
  return x;
}

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (isa_available(isa)) out.push_back(isa);
  }
  return out;
}

CentralSums sums_with(Isa isa, std::span<const double> x) {
  return isa == Isa::avx2 ? avx2::central_sums(x) : neon::central_sums(x);
}

void ecf_with(Isa isa, std::span<const double> x, std::span<const double> v, std::span<double> re,
              std::span<double> im) {
  if (isa == Isa::avx2) {
    avx2::ecf_sums(x, v, re, im);
  } else {
    neon::ecf_sums(x, v, re, im);
  }
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar central sums by hand") {
  const std::vector<double> x{1.0, 2.0, 3.0, 6.0};
  const CentralSums s = scalar::central_sums(x);
  CHECK(s.n == 4);
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.m2 == doctest::Approx(4 + 1 + 0 + 9));
  CHECK(s.m3 == doctest::Approx(-8 - 1 + 0 + 27));
  CHECK(s.m4 == doctest::Approx(16 + 1 + 0 + 81));
}

TEST_CASE("vector central sums match scalar") {
  const auto isas = vector_isas();
  if (isas.empty()) MESSAGE("no vector kernels on this machine; scalar only");
  for (Isa isa : isas) {
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 1008u, 100003u}) {
      const auto x = random_vector(n, 0.05, n);
      const CentralSums a = scalar::central_sums(x);
      const CentralSums b = sums_with(isa, x);
      CAPTURE(n);
      CHECK(b.n == a.n);
      CHECK(b.mean == doctest::Approx(a.mean).epsilon(1e-13));
      CHECK(b.m2 == doctest::Approx(a.m2).epsilon(1e-12));
      double abs3 = 0.0;  // m3 may cancel to near zero, so compare against sum |x - mean|^3
      for (double xi : x) abs3 += std::pow(std::abs(xi - a.mean), 3);
      CHECK(std::abs(b.m3 - a.m3) <= 1e-12 * abs3);
      CHECK(b.m4 == doctest::Approx(a.m4).epsilon(1e-12));
    }
  }
}

TEST_CASE("vector ecf sums match scalar") {
  for (Isa isa : vector_isas()) {
    for (std::size_t n : {1u, 3u, 4u, 6u, 17u, 1008u, 20001u}) {
      const auto x = random_vector(n, 0.05, 100 + n);
      std::vector<double> v;
      for (int k = 0; k <= 100; ++k) v.push_back(-20.0 + 0.4 * k);
      v.push_back(1234.5);  // large arguments exercise the range reduction
      v.push_back(-98765.4);
      std::vector<double> re0(v.size()), im0(v.size()), re1(v.size()), im1(v.size());
      scalar::ecf_sums(x, v, re0, im0);
      ecf_with(isa, x, v, re1, im1);
      for (std::size_t k = 0; k < v.size(); ++k) {
        CAPTURE(n);
        CAPTURE(v[k]);
        CHECK(std::abs(re1[k] - re0[k]) <= 1e-13 * static_cast<double>(n));
        CHECK(std::abs(im1[k] - im0[k]) <= 1e-13 * static_cast<double>(n));
      }
    }
  }
}

TEST_CASE("dispatch selection and override") {
  CHECK(isa_available(Isa::scalar));
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  const auto x = random_vector(1001, 0.02, 9);
  const CentralSums a = central_sums(x);
  reset_isa();
  const CentralSums b = central_sums(x);
  CHECK(b.m2 == doctest::Approx(a.m2).epsilon(1e-12));
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!isa_available(isa)) CHECK_THROWS_AS(force_isa(isa), ndig::DomainError);
  }
  CHECK(isa_name(Isa::avx2) == "avx2");
  MESSAGE("active kernels: " << isa_name(active_isa()));
}

TEST_CASE("ecf span sizes are validated") {
  std::vector<double> x{1.0}, v{1.0, 2.0}, re(1), im(2);
  CHECK_THROWS_AS(ecf_sums(x, v, re, im), ndig::DomainError);
}

}  // TEST_SUITE
