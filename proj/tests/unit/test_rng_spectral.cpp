#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/quadrature.hpp"
#include "pdmp/rng.hpp"
#include "pdmp/spectral.hpp"

using namespace pdmp;

TEST_CASE("random streams replay and split deterministically") {
  RandomStream a(5, 3), b(5, 3), c(5, 4);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  RandomStream a2(5, 3);
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs |= a2() != c();
  CHECK(differs);
  CHECK(a.split(1).key() == b.split(1).key());
  CHECK(a.split(1).key() != a.split(2).key());

  CounterStream k1{1, 2, 3}, k2{1, 2, 3}, k3{1, 3, 2};
  CHECK(k1() == k2());
  CHECK(derive_seed({1, 2, 3}) != derive_seed({1, 3, 2}));
  (void)k3;
}

TEST_CASE("random source distributions") {
  RandomStream r(11);
  CHECK_THROWS_AS(r.exponential(0.0), InvalidArgument);
  double s = 0.0, s2 = 0.0, e = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK_FALSE((u < 0.0 || u >= 1.0));
    const double z = r.normal();
    s += z;
    s2 += z * z;
    e += r.exponential(2.0);
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(e / n - 0.5) < 4.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("power-law basis") {
  const SpectralBasis b = SpectralBasis::power_law(2.0, 4);
  CHECK(b.n_modes() == 4);
  CHECK(b.eigenvalue(0) == 1.0);
  CHECK(b.eigenvalue(3) == doctest::Approx(1.0 / 16.0));
  CHECK(b.inverse_eigenvalues()[2] == doctest::Approx(9.0));
  CHECK(b.trace() == doctest::Approx(1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0));
  CHECK(b.tail_trace(2) == doctest::Approx(1.0 / 9.0 + 1.0 / 16.0));

  try {
    SpectralBasis::power_law(0.5, 4);
    FAIL("expected rejection");
  } catch (const InvalidArgument& e) {
    CHECK(e.path() == "basis.s");
  }
  CHECK_THROWS_AS(SpectralBasis::power_law(1.0, 4), InvalidArgument);
  CHECK_THROWS_AS(SpectralBasis::power_law(2.0, 0), InvalidArgument);
}

TEST_CASE("custom and Wiener bases") {
  CHECK_THROWS_AS(SpectralBasis::custom({1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(SpectralBasis::custom({1.0, -1.0}), InvalidArgument);
  CHECK_THROWS_AS(SpectralBasis::custom({}), InvalidArgument);
  const SpectralBasis w = SpectralBasis::wiener(3);
  CHECK(w.eigenvalue(0) == doctest::Approx(4.0 / (std::numbers::pi * std::numbers::pi)));
  CHECK(w.eigenvalue(2) == doctest::Approx(1.0 / (6.25 * std::numbers::pi * std::numbers::pi)));
}

TEST_CASE("Brownian bridge eigenvalues match the discretised covariance kernel") {
  // Power iteration on min(s,t) - st/T; the oracle does not use the closed form.
  for (double T : {1.0, 2.0}) {
    const double top = oracle::bridge_kernel_top_eigenvalue(T, 800);
    const SpectralBasis b = SpectralBasis::brownian_bridge(T, 8);
    CHECK(b.eigenvalue(0) == doctest::Approx(top).epsilon(1e-5));
    CHECK(b.parameter() == T);
  }
  const SpectralBasis b = SpectralBasis::brownian_bridge(1.0, 5);
  // Orthonormality of the eigenfunctions by quadrature.
  const GaussLegendre& gl = gauss_legendre(64);
  for (std::size_t j = 1; j <= 5; ++j)
    for (std::size_t k = 1; k <= 5; ++k) {
      const double ip = gl.integrate([&](double t) { return b.bridge_mode(j, t) * b.bridge_mode(k, t); }, 0.0, 1.0);
      CHECK(ip == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
  CHECK_THROWS_AS(SpectralBasis::power_law(2.0, 3).bridge_mode(1, 0.5), InvalidArgument);
}

TEST_CASE("Gaussian measure draws have the configured variances") {
  const SpectralBasis b = SpectralBasis::power_law(2.0, 3);
  const GaussianMeasure g(b, 2.0);
  CHECK(g.variances()[1] == doctest::Approx(1.0 / 16.0));
  CHECK(g.trace() == doctest::Approx(1.0 + 1.0 / 16.0 + 1.0 / 81.0));
  RandomStream r(3);
  const int n = 100000;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto x = g.sample(r);
    s2 += x[1] * x[1];
  }
  const double v = 1.0 / 16.0;
  CHECK(std::abs(s2 / n - v) < 4.0 * v * std::sqrt(2.0 / n));

  CoeffVector out{9.0, 9.0, 9.0};
  g.sample_into(r, out, 2);
  CHECK(out[2] == 9.0);
  CHECK(out[0] != 9.0);
}

TEST_CASE("Hurwitz tail against brute-force summation") {
  CHECK(hurwitz_tail(2.0, 0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-13));
  CHECK(hurwitz_tail(4.0, 0) == doctest::Approx(std::pow(std::numbers::pi, 4) / 90.0).epsilon(1e-13));
  for (double s : {1.5, 2.0, 3.0})
    for (std::size_t n : {0u, 1u, 8u, 20u, 64u, 1000u}) {
      CAPTURE(s);
      CAPTURE(n);
      CHECK(hurwitz_tail(s, n) == doctest::Approx(oracle::hurwitz_brute(s, n, 200000)).epsilon(1e-9));
    }
  // Frozen after the oracle check above.
  CHECK(hurwitz_tail(2.0, 8) == doctest::Approx(0.11751201469403143).epsilon(1e-14));
  CHECK_THROWS_AS(hurwitz_tail(1.0, 3), InvalidArgument);
}

TEST_CASE("Gauss-Legendre rules") {
  const GaussLegendre& g5 = gauss_legendre(5);
  double wsum = 0.0;
  for (double w : g5.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
  // Exact to degree 2n - 1 = 9.
  CHECK(g5.integrate([](double x) { return std::pow(x, 8) + x * x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 9.0 + 0.25).epsilon(1e-14));
  CHECK(g5.nodes.back() == doctest::Approx(0.9061798459386640).epsilon(1e-15));
  const GaussLegendre& g128 = gauss_legendre(128);
  CHECK(g128.integrate([](double x) { return std::cos(x); }, 0.0, 10.0) ==
        doctest::Approx(std::sin(10.0)).epsilon(1e-13));
}
