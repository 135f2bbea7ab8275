#pragma once
// Estimators and checks: batch-means variance, Zig-Zag tuning, generator
// invariance residuals, autocovariance decay fits, drift condition, and the
// mu / mu_N divergence.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pdmp/engine.hpp"
#include "pdmp/functionals.hpp"
#include "pdmp/samplers.hpp"
#include "pdmp/spectral.hpp"
#include "pdmp/targets.hpp"

namespace pdmp {

struct VarianceEstimate {
  std::string functional_name;
  double time_average = 0.0;
  double asym_variance = 0.0;
  /// sqrt(asym_variance / total_time)
  double std_error = 0.0;
  std::size_t batches = 0;
  double events_per_unit_time = 0.0;
  /// Standard error of asym_variance itself under approximately normal batch means.
  double asym_variance_se = 0.0;
};

inline constexpr std::size_t kMinBatches = 20;

/// Batch means over n_batches equal slices of [0, t_end]. The skeleton must
/// carry its events.
VarianceEstimate batch_means_variance(const EventSkeleton& skeleton, const Flow& flow, const StateFunction& f,
                                      std::size_t n_batches, std::string name = "f");

struct ZigZagTuning {
  std::vector<double> speeds;
  /// nu^2 sum_i gamma_i^{5-4r} / a_i with nu^2 = 4 sqrt(2/pi).
  double predicted_sigma2 = 0.0;
  /// sum_i a_i / gamma_i; the switch count per unit time is proportional to it.
  double switch_rate_factor = 0.0;
  /// sum_i gamma_i^{2-4r}
  double smoothness_sum = 0.0;
  bool smoothness_suspect = false;
  std::vector<std::string> warnings;
};

/// Asymptotic variance of x^2 for the unit-speed 1D Zig-Zag on N(0,1).
double zigzag_nu2();

/// a_i = gamma_i^{3-2r} with the companion predictions.
ZigZagTuning optimal_zz_velocities(const SpectralBasis& basis, double r);

struct ResidualEstimate {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double z_score() const { return std_error > 0.0 ? estimate / std_error : 0.0; }
};

struct InvarianceOptions {
  /// Nested Monte Carlo size for stochastic jump kernels.
  std::size_t nested = 16;
  unsigned threads = 1;
  /// Samples per RNG chunk; fixes the stream layout independent of threads.
  std::size_t chunk = 4096;
};

struct InvarianceResult {
  std::vector<ResidualEstimate> residuals;
  double ess = 0.0;
  std::size_t n_samples = 0;
};

/// Self-normalised importance estimate of E_mu[L f] from mu_0 draws with
/// weights e^{-Phi}. Throws DegenerateWeights when ESS < 5% of n_samples.
InvarianceResult invariance_residual(const SamplerAssembly& sampler, const std::vector<Functional>& functions,
                                     std::size_t n_samples, RandomSource& rng, const InvarianceOptions& options = {});

/// Generator applied to f at z. Stochastic jumps are averaged over `nested` draws.
double generator_apply(const SamplerAssembly& sampler, const Functional& f, const PhaseState& z, RandomSource& rng,
                       std::size_t nested);

struct DecayProblem {
  const RateChannels* channels = nullptr;
  Flow flow;
  double horizon = kDefaultHorizon;
  /// Draw from the invariant law.
  std::function<PhaseState(RandomSource&)> stationary_draw;
};

struct DecayFit {
  double kappa = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> times;
  std::vector<double> acov;
  std::vector<double> acov_se;
};

struct DecayOptions {
  unsigned threads = 1;
  /// Fit only grid points with t >= fit_from.
  double fit_from = 0.0;
};

/// Stationary autocovariance of f on t_grid and a least-squares fit of its log.
DecayFit decay_rate_fit(const DecayProblem& problem, const StateFunction& f, std::size_t ensemble_size,
                        const std::vector<double>& t_grid, RandomSource& rng, const DecayOptions& options = {});

/// Sampler form: stationary draws by importance resampling from mu_0.
DecayFit decay_rate_fit(const SamplerAssembly& sampler, const StateFunction& f, std::size_t ensemble_size,
                        const std::vector<double>& t_grid, RandomSource& rng, const DecayOptions& options = {});

/// Importance resampling from mu_0 proposals towards e^{-Phi} mu_0.
std::vector<PhaseState> resample_stationary(const SamplerAssembly& sampler, std::size_t count, std::size_t pool,
                                            RandomSource& rng);

struct DriftCheck {
  /// max over probes of A Phi + c1 ||Sigma^{1/2} grad Phi||^2 - c2
  double worst_margin = 0.0;
  bool satisfied = false;
  /// min over probes of <grad Phi, x> - (Phi(x) - Phi(0))
  double worst_convexity_gap = 0.0;
};

/// A Phi = Tr(Sigma Hess Phi) - <x, grad Phi> - <grad Phi, Sigma grad Phi>, with
/// the Hessian diagonal from central differences of the gradient.
double drift_operator(const TargetPotential& target, const SpectralBasis& basis, std::span<const double> x,
                      double h = 1e-5);

DriftCheck drift_condition_check(const TargetPotential& target, const SpectralBasis& basis, double c1, double c2,
                                 std::size_t n_probes, RandomSource& rng);

struct MuDivergence {
  /// prod_{i>N} (g_i + 1) / sqrt(2 g_i + 1) - 1
  double exact_product = 0.0;
  /// (1/2) sum_{i>N} g_i^2
  double asymptotic = 0.0;
};

/// Tail over modes n_trunc+1 .. basis.n_modes(). Only defined for Phi = ||x||^2 / 2.
MuDivergence mu_divergence(const SpectralBasis& basis, bool quadratic_case, std::size_t n_trunc);

}  // namespace pdmp
