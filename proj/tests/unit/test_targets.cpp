#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pdmp/errors.hpp"
#include "pdmp/targets.hpp"

using namespace pdmp;

TEST_CASE("quadratic and zero potentials") {
  const SpectralBasis b = SpectralBasis::power_law(2.0, 3);
  const TargetPotential q = quadratic_target(b);
  const CoeffVector x{1.0, -2.0, 0.5};
  CHECK(q.value(x) == doctest::Approx(0.5 * (1 + 4 + 0.25)));
  CHECK(q.grad(x) == x);
  CHECK(q.grad_bound(2.0) == 2.0);
  const TargetPotential z = zero_target(b);
  CHECK(z.is_zero);
  CHECK(z.value(x) == 0.0);
  CHECK(z.grad(x) == CoeffVector(3, 0.0));
}

TEST_CASE("projection ignores the tail coordinates") {
  const SpectralBasis b = SpectralBasis::power_law(2.0, 4);
  const TargetPotential p = projected_target(quadratic_target(b), 2);
  const CoeffVector x{1.0, 2.0, 3.0, 4.0};
  CHECK(p.value(x) == doctest::Approx(2.5));
  const CoeffVector g = p.grad(x);
  CHECK(g == CoeffVector{1.0, 2.0, 0.0, 0.0});
  CHECK(p.active_modes == 2);
  CHECK(p.partial(x, 3) == 0.0);
  CHECK(projected_target(quadratic_target(b), 4).name == "quadratic");
  CHECK_THROWS_AS(projected_target(quadratic_target(b), 0), InvalidArgument);
  CHECK_THROWS_AS(projected_target(quadratic_target(b), 5), InvalidArgument);
}

TEST_CASE("drift registry") {
  CHECK(drift_names().size() == 4);
  try {
    make_drift("linear", {{"alpha", 1.0}});
    FAIL("expected rejection");
  } catch (const InvalidArgument& e) {
    CHECK(e.path() == "target.alpha");
  }
  try {
    make_drift("cubic", {});
    FAIL("expected rejection");
  } catch (const InvalidArgument& e) {
    CHECK(e.path() == "target.drift");
  }
  RandomStream rng(2);
  for (const auto& name : drift_names()) {
    const BridgeDrift d = make_drift(name, {});
    CAPTURE(name);
    CHECK(check_drift_derivatives(d, 200, 3.0, rng) < 1e-6);
  }
  const BridgeDrift lin = make_drift("linear", {{"theta", 2.0}});
  CHECK(lin.b(1.5) == -3.0);
  CHECK(lin.db(0.3) == -2.0);
}

TEST_CASE("linear-drift bridge potential is exactly quadratic") {
  // Phi = 1/2 int (b^2 + b') dt with b = -theta y, and int y^2 = |x|^2 for the
  // orthonormal sine modes, so Phi = theta^2 |x|^2 / 2 - theta T / 2.
  const double theta = 1.3, T = 2.0;
  const SpectralBasis basis = SpectralBasis::brownian_bridge(T, 8);
  const TargetPotential phi = bridge_target(basis, make_drift("linear", {{"theta", theta}}), 64);
  RandomStream rng(4);
  for (int probe = 0; probe < 20; ++probe) {
    CoeffVector x(8);
    for (auto& xi : x) xi = rng.normal();
    double nrm2 = 0.0;
    for (double xi : x) nrm2 += xi * xi;
    CHECK(phi.value(x) == doctest::Approx(0.5 * theta * theta * nrm2 - 0.5 * theta * T).epsilon(1e-12));
    const CoeffVector g = phi.grad(x);
    for (std::size_t k = 0; k < 8; ++k) CHECK(g[k] == doctest::Approx(theta * theta * x[k]).epsilon(1e-11));
  }
  CHECK(phi.m1 == doctest::Approx(theta * theta).epsilon(1e-12));
  CHECK(phi.m0 == doctest::Approx(0.0));
  CHECK(phi.lower_bound == doctest::Approx(-0.5 * T * theta));
}

TEST_CASE("nonlinear bridge potentials: gradients and growth constants") {
  const SpectralBasis basis = SpectralBasis::brownian_bridge(1.0, 16);
  RandomStream rng(6);
  for (const char* name : {"sine", "tanh"}) {
    CAPTURE(name);
    const TargetPotential phi = bridge_target(basis, make_drift(name, {{"alpha", 0.8}}), 128);
    CHECK(check_gradient(phi, 50, 3.0, rng).max_rel_error < 1e-6);
    CHECK(check_grad_growth(phi, 200, 5.0, rng) <= 1.0);
    CHECK(std::isfinite(phi.hessian_bound));
    // The Girsanov integrand is bounded below by -T sup|b'| / 2.
    for (int k = 0; k < 50; ++k) {
      CoeffVector x(16);
      for (auto& xi : x) xi = 3.0 * rng.normal();
      CHECK(phi.value(x) >= phi.lower_bound - 1e-12);
    }
  }
  CHECK_THROWS_AS(bridge_target(SpectralBasis::power_law(2.0, 4), make_drift("zero", {})), InvalidArgument);
  CHECK_THROWS_AS(bridge_target(basis, make_drift("zero", {}), 8), InvalidArgument);
}

TEST_CASE("bridge path reconstruction") {
  const SpectralBasis basis = SpectralBasis::brownian_bridge(1.0, 2);
  const CoeffVector x{1.0, 0.5};
  const double t = 0.25;
  const double expect = std::sqrt(2.0) * (std::sin(std::numbers::pi * t) + 0.5 * std::sin(2.0 * std::numbers::pi * t));
  CHECK(bridge_path(basis, x, t) == doctest::Approx(expect));
  CHECK(bridge_path(basis, x, 0.0) == doctest::Approx(0.0));
  CHECK(bridge_path(basis, x, 1.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("custom potentials and the gradient check catch wrong gradients") {
  const auto value = [](std::span<const double> x) { return std::cos(x[0]) + x[1] * x[1]; };
  const auto good = [](std::span<const double> x, std::span<double> g) {
    g[0] = -std::sin(x[0]);
    g[1] = 2.0 * x[1];
  };
  const auto bad = [](std::span<const double> x, std::span<double> g) {
    g[0] = std::sin(x[0]);
    g[1] = 2.0 * x[1];
  };
  RandomStream rng(8);
  CHECK(check_gradient(custom_target("c", 2, value, good, 1.0, 2.0), 30, 2.0, rng).max_rel_error < 1e-7);
  CHECK(check_gradient(custom_target("c", 2, value, bad, 1.0, 2.0), 30, 2.0, rng).max_rel_error > 0.1);
  // Growth constants that are too small are detected.
  CHECK(check_grad_growth(custom_target("c", 2, value, good, 0.0, 0.5), 200, 4.0, rng) > 1.0);
}
