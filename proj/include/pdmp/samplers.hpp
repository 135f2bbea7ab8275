#pragma once
// Zig-Zag, Bouncy Particle and Boomerang samplers on a truncated basis, with
// canonical or smoothed rates, refreshment, and projected approximants.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdmp/engine.hpp"
#include "pdmp/spectral.hpp"
#include "pdmp/targets.hpp"

namespace pdmp {

enum class Algorithm { ZigZag, BouncyParticle, BoomerangPure, BoomerangFactorised };
enum class RateMode { Canonical, Smoothed };
enum class ReflectionKind { NegateAll, FlipMode, BpsHyperplane, FiniteDimGradient };

std::string to_string(Algorithm a);
std::string to_string(RateMode m);
Algorithm parse_algorithm(const std::string& s);
RateMode parse_rate_mode(const std::string& s);

/// Additional switching rate gamma_c(x, v), required to be invariant under
/// the channel's reflection.
struct ExtraRate {
  enum class Kind { None, Constant, Speed, Custom };
  Kind kind = Kind::None;
  double value = 0.0;
  /// Custom only: gamma_c(z) for channel c, and a constant majorant for it.
  std::function<double(const PhaseState&, std::size_t)> fn;
  double custom_bound = 0.0;
};

inline constexpr double kDefaultBpsZeta = 4.0;

struct SamplerSpec {
  Algorithm algorithm = Algorithm::BoomerangPure;
  RateMode rate_mode = RateMode::Canonical;
  double refresh_rate = 0.0;
  /// Zig-Zag speeds a_i; defaults to gamma_i^{3 - 2r} with r = zz_tuning_r.
  std::optional<std::vector<double>> zz_velocities;
  double zz_tuning_r = 0.0;
  double bps_zeta = kDefaultBpsZeta;
  /// N' <= N: modes beyond N' are frozen and Phi is replaced by Phi o Proj_N'.
  std::optional<std::size_t> approx_level;
  ExtraRate extra;
  /// Pure Boomerang only: reflect with the Sigma-weighted gradient instead of v -> -v.
  bool boomerang_gradient_reflection = false;
  double horizon = kDefaultHorizon;
};

/// Law of the velocity: product of signed speeds (Zig-Zag) or N(0, Sigma^power).
class VelocityLaw {
 public:
  static VelocityLaw signs(std::vector<double> speeds);
  static VelocityLaw gaussian(const SpectralBasis& basis, double power);

  bool is_gaussian() const noexcept { return gaussian_.has_value(); }
  std::size_t n_modes() const noexcept { return n_; }
  /// Per-mode variance of the law.
  std::span<const double> variances() const noexcept { return variances_; }
  const std::vector<double>& speeds() const noexcept { return speeds_; }
  /// Redraw v_i for i < n_active; later coordinates untouched.
  void sample_into(RandomSource& rng, std::span<double> v, std::size_t n_active) const;
  CoeffVector sample(RandomSource& rng) const;

 private:
  std::size_t n_ = 0;
  std::optional<GaussianMeasure> gaussian_;
  std::vector<double> speeds_;
  std::vector<double> variances_;
};

// Rates --------------------------------------------------------------------

/// lambda_i = (v_i (x_i / gamma_i^2 + d_i Phi))^+
std::vector<double> zigzag_rates(const PhaseState& z, const TargetPotential& target, const SpectralBasis& basis);
/// (<grad Phi, v>)^+
double boomerang_pure_rate(const PhaseState& z, const TargetPotential& target);
/// lambda_i = (v_i d_i Phi)^+
std::vector<double> boomerang_factorised_rates(const PhaseState& z, const TargetPotential& target);
/// (<v, grad Phi + Sigma^{-1} x>)^+
double bps_rate(const PhaseState& z, const TargetPotential& target, const SpectralBasis& basis);
/// log(1 + e^u), evaluated without overflow or cancellation.
double smoothed_rate(double u);

// Reflections ----------------------------------------------------------------

PhaseState zigzag_flip(PhaseState z, std::size_t i);
PhaseState negate_velocity(PhaseState z);
/// v - 2 <v, gPsi> / ||Sigma^{zeta/2} gPsi||^2 Sigma^zeta gPsi, gPsi = grad Phi + Sigma^{-1} x.
PhaseState bps_reflect(PhaseState z, const TargetPotential& target, const SpectralBasis& basis, double zeta);
/// v - 2 <g, v> / <Sigma_v g, g> Sigma_v g, g = grad Phi.
PhaseState finite_dim_reflect(PhaseState z, const TargetPotential& target, std::span<const double> sigma_v);

/// Velocity-only forms on the first n coordinates; throw DegenerateGradient
/// when the weighted norm of the direction is below 1e-14.
void reflect_hyperplane(std::span<double> v, std::span<const double> direction, std::span<const double> metric);

/// Apply one reflection kind. FlipMode uses `mode`; the state-dependent kinds
/// build their direction from the target.
PhaseState apply_reflection(ReflectionKind kind, PhaseState z, const TargetPotential& target,
                            const SpectralBasis& basis, double zeta, std::size_t mode = 0);

PhaseState refresh_jump(PhaseState z, const VelocityLaw& law, RandomSource& rng);

// Assembly -------------------------------------------------------------------

inline constexpr std::uint64_t kRefreshKey = std::uint64_t{1} << 40;

struct SamplerAssembly {
  Algorithm algorithm;
  SamplerSpec spec;
  SpectralBasis basis;
  /// Phi o Proj_N' (the unprojected target when no approx level is set).
  TargetPotential target;
  std::size_t n_active;
  Flow flow;
  std::shared_ptr<const RateChannels> channels;
  VelocityLaw velocity;
  double horizon;
  std::vector<std::string> warnings;
  /// Channel index of the refresh clock, if any.
  std::optional<std::size_t> refresh_channel;

  /// Draw from mu_0 = pi_0 x nu_0 on all modes.
  PhaseState sample_reference(RandomSource& rng) const;
  EventSkeleton run(const PhaseState& initial, double t_end, RandomSource& rng,
                    std::size_t max_events = kDefaultMaxEvents, EngineStats* stats = nullptr,
                    bool record = true) const;
};

SamplerAssembly assemble_sampler(const SamplerSpec& spec, const TargetPotential& target, const SpectralBasis& basis);

/// Decorator multiplying every non-refresh rate and majorant by `factor`.
/// Breaks invariance deliberately; used as a negative control.
class ScaledChannels final : public RateChannels {
 public:
  ScaledChannels(std::shared_ptr<const RateChannels> inner, double factor, std::optional<std::size_t> keep);
  std::size_t size() const override { return inner_->size(); }
  void rates(const PhaseState& z, std::span<double> out) const override;
  void bounds(const PhaseState& z, double horizon, std::span<double> out) const override;
  void jump(std::size_t c, PhaseState& z, RandomSource& rng) const override { inner_->jump(c, z, rng); }
  bool stochastic(std::size_t c) const override { return inner_->stochastic(c); }
  std::uint64_t channel_key(std::size_t c) const override { return inner_->channel_key(c); }

 private:
  std::shared_ptr<const RateChannels> inner_;
  double factor_;
  std::optional<std::size_t> keep_;
};

/// Copy of an assembly whose reflection rates are scaled by factor.
SamplerAssembly corrupt_rates(const SamplerAssembly& a, double factor);

}  // namespace pdmp
