#pragma once
// Finite-dimensional approximation error ||P_T f - P_T^{N'} f||_{L2(mu)}
// estimated with coupled trajectories.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "pdmp/functionals.hpp"
#include "pdmp/samplers.hpp"

namespace pdmp {

struct ApproxStudyRow {
  std::size_t n_approx = 0;
  double t_horizon = 0.0;
  double error_l2mu = 0.0;
  double error_se = 0.0;
  /// Unbiased estimate of the squared error and its standard error.
  double error_sq = 0.0;
  double error_sq_se = 0.0;
  /// C * T * sqrt(tail) with C calibrated at the first level.
  double predicted_bound = 0.0;
  double bound_constant = 0.0;
  /// sqrt(sum_{i > N'} gamma_i^2) over the infinite power-law tail when known,
  /// otherwise over the reference truncation.
  double tail_sqrt = 0.0;
  /// Same over the reference truncation only.
  double finite_tail_sqrt = 0.0;
};

struct ApproxStudyOptions {
  unsigned threads = 1;
  double band_height = 1.0;
  std::size_t max_events = kDefaultMaxEvents;
  /// Independent coupled (N', N_ref) pairs per member; at least 2.
  std::size_t replicates = 2;
  /// Initial law; defaults to importance resampling from mu_0 (exact Gaussian
  /// posterior for the quadratic potential).
  std::function<PhaseState(RandomSource&)> initial;
};

/// For each member an initial z ~ mu and R independent coupled (N', N_ref)
/// pairs; the mean over r != s of Delta_r Delta_s is unbiased for the squared
/// semigroup error at z.
std::vector<ApproxStudyRow> approx_error_study(const SamplerSpec& spec, const TargetPotential& target,
                                               const SpectralBasis& basis, const Functional& f,
                                               const std::vector<std::size_t>& levels, double t_horizon,
                                               std::size_t ensemble, std::uint64_t seed,
                                               const ApproxStudyOptions& options = {});

/// Exact draw from mu for Phi = ||x||^2 / 2: x_i ~ N(0, g_i / (1 + g_i)), v ~ nu_0.
PhaseState quadratic_posterior_draw(const SamplerAssembly& sampler, RandomSource& rng);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pdmp
