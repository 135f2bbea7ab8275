#pragma once
// Potentials Phi = -log(d mu / d mu_0) with the derivative and growth data the
// samplers need to build thinning majorants.

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pdmp/rng.hpp"
#include "pdmp/spectral.hpp"

namespace pdmp {

class TargetPotential {
 public:
  using Value = std::function<double(std::span<const double>)>;
  using Gradient = std::function<void(std::span<const double>, std::span<double>)>;

  std::string name;
  std::size_t n_modes = 0;
  Value evaluate;
  /// Writes grad Phi(x) into out (length n_modes).
  Gradient gradient;
  /// sup_x ||Hess Phi(x)||_op; infinity when unknown.
  double hessian_bound = std::numeric_limits<double>::infinity();
  /// ||grad Phi(x)|| <= m0 + m1 ||x||.
  double m0 = 0.0;
  double m1 = 0.0;
  double lower_bound = -std::numeric_limits<double>::infinity();
  /// Coordinates >= active_modes never influence Phi (set by projection).
  std::size_t active_modes = 0;
  /// True when Phi identically vanishes; lets samplers skip gradient work.
  bool is_zero = false;

  double value(std::span<const double> x) const { return evaluate(x); }
  CoeffVector grad(std::span<const double> x) const;
  double partial(std::span<const double> x, std::size_t i) const;
  /// Growth envelope m0 + m1 r.
  double grad_bound(double norm_x) const noexcept { return m0 + m1 * norm_x; }
};

TargetPotential zero_target(const SpectralBasis& basis);
/// Phi(x) = ||x||^2 / 2.
TargetPotential quadratic_target(const SpectralBasis& basis);
/// Phi_N = Phi o Proj_N: coordinates beyond n_keep are ignored.
TargetPotential projected_target(const TargetPotential& base, std::size_t n_keep);
/// User-supplied function bundle; growth constants are taken on trust and
/// should be validated with check_grad_growth.
TargetPotential custom_target(std::string name, std::size_t n_modes, TargetPotential::Value value,
                              TargetPotential::Gradient gradient, double m0, double m1,
                              double hessian_bound = std::numeric_limits<double>::infinity(),
                              double lower_bound = -std::numeric_limits<double>::infinity());

/// Scalar drift of dX = b(X) dt + dW with the derivatives the Girsanov
/// potential needs.
struct BridgeDrift {
  std::string name;
  std::function<double(double)> b, db, d2b, d3b;
  double sup_b = std::numeric_limits<double>::infinity();
  double sup_db = std::numeric_limits<double>::infinity();
  double sup_d2b = std::numeric_limits<double>::infinity();
  double sup_d3b = std::numeric_limits<double>::infinity();
  /// |b''/2 + b b'|(y) <= g0 + g1 |y|.
  double g0 = 0.0;
  double g1 = 0.0;
  /// sup |d/dy (b''/2 + b b')|.
  double dg_sup = std::numeric_limits<double>::infinity();
};

/// Built-in drifts: "linear" (b = -theta y), "sine" (b = alpha sin y),
/// "tanh" (b = alpha tanh(y / scale)), "zero".
BridgeDrift make_drift(const std::string& name, const std::map<std::string, double>& params);
std::vector<std::string> drift_names();

inline constexpr std::size_t kDefaultBridgeQuadPoints = 128;

/// Girsanov potential of a diffusion bridge pinned at 0 on [0, T].
TargetPotential bridge_target(const SpectralBasis& basis, const BridgeDrift& drift,
                              std::size_t quad_points = kDefaultBridgeQuadPoints);

/// Path value x(t) = sum_k x_k e_k(t) for a Brownian bridge basis.
double bridge_path(const SpectralBasis& basis, std::span<const double> x, double t);

struct GradientCheck {
  double max_rel_error = 0.0;
  std::size_t worst_point = 0;
};

/// Central differences with step h against the analytic gradient at n_points
/// draws uniform in the ball of the given radius.
GradientCheck check_gradient(const TargetPotential& target, std::size_t n_points, double radius,
                             RandomSource& rng, double h = 1e-5);

/// Largest ||grad Phi(x)|| / (m0 + m1 ||x||) over the probes; <= 1 when the
/// growth constants are valid there.
double check_grad_growth(const TargetPotential& target, std::size_t n_points, double radius, RandomSource& rng);

/// Largest relative finite-difference error of db, d2b, d3b on [-range, range].
double check_drift_derivatives(const BridgeDrift& drift, std::size_t n_points, double range, RandomSource& rng,
                               double h = 1e-5);

}  // namespace pdmp
