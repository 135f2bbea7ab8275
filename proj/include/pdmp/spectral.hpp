#pragma once
// Truncated Hilbert space in the eigenbasis of a diagonal covariance operator,
// the Gaussian measures N(0, C^p) on it, and Karhunen-Loeve draws.

#include <cstddef>
#include <span>
#include <vector>

#include "pdmp/rng.hpp"

namespace pdmp {

/// Coordinates <x, e_i> in the truncated eigenbasis.
using CoeffVector = std::vector<double>;

enum class BasisKind { PowerLaw, BrownianBridge, Custom };

class SpectralBasis {
 public:
  /// eigenvalue_i = i^{-s}, i = 1..n_modes. Requires s > 1.
  static SpectralBasis power_law(double s, std::size_t n_modes);
  /// Brownian bridge on [0, T]: eigenvalue_k = T^2 / (k^2 pi^2) with
  /// eigenfunctions sqrt(2/T) sin(k pi t / T).
  static SpectralBasis brownian_bridge(double horizon, std::size_t n_modes);
  /// Explicit list; must be positive, finite and non-increasing.
  static SpectralBasis custom(std::vector<double> eigenvalues);
  /// Wiener process on [0,1]: (i - 1/2)^{-2} pi^{-2}, delivered as a custom list.
  static SpectralBasis wiener(std::size_t n_modes);

  std::size_t n_modes() const noexcept { return eigenvalues_.size(); }
  BasisKind kind() const noexcept { return kind_; }
  /// s for PowerLaw, T for BrownianBridge, 0 for Custom.
  double parameter() const noexcept { return parameter_; }

  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  double eigenvalue(std::size_t i) const { return eigenvalues_.at(i); }
  /// Precomputed 1 / eigenvalue.
  std::span<const double> inverse_eigenvalues() const noexcept { return inverse_; }
  double trace() const noexcept { return trace_; }
  /// Partial trace sum_{i >= from} eigenvalue_i (0-based from).
  double tail_trace(std::size_t from) const;

  /// Brownian bridge eigenfunction e_k(t), k = 1..n_modes. Only for BrownianBridge.
  double bridge_mode(std::size_t k, double t) const;

 private:
  SpectralBasis(BasisKind kind, double parameter, std::vector<double> eigenvalues);

  BasisKind kind_;
  double parameter_;
  std::vector<double> eigenvalues_;
  std::vector<double> inverse_;
  double trace_;
};

/// Throws InvalidArgument unless a and b have identical truncation.
void require_same_modes(const SpectralBasis& a, const SpectralBasis& b);

/// Centred Gaussian with covariance C^power in the basis of C.
class GaussianMeasure {
 public:
  GaussianMeasure(SpectralBasis basis, double power = 1.0);

  const SpectralBasis& basis() const noexcept { return basis_; }
  double power() const noexcept { return power_; }
  std::size_t n_modes() const noexcept { return basis_.n_modes(); }
  std::span<const double> variances() const noexcept { return variance_; }
  std::span<const double> std_devs() const noexcept { return stddev_; }
  double trace() const;

  CoeffVector sample(RandomSource& rng) const;
  /// Fill the first n_active coordinates of out from the first n_active draws.
  void sample_into(RandomSource& rng, std::span<double> out, std::size_t n_active) const;

 private:
  SpectralBasis basis_;
  double power_;
  std::vector<double> variance_;
  std::vector<double> stddev_;
};

/// Hurwitz zeta tail sum_{i > n} i^{-s} = zeta(s, n + 1), s > 1.
double hurwitz_tail(double s, std::size_t n);

}  // namespace pdmp
