#include "pdmp/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pdmp/errors.hpp"
#include "pdmp/kernels.hpp"

namespace pdmp {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ZigZag: return "zigzag";
    case Algorithm::BouncyParticle: return "bps";
    case Algorithm::BoomerangPure: return "boomerang";
    case Algorithm::BoomerangFactorised: return "boomerang_factorised";
  }
  return "?";
}

std::string to_string(RateMode m) { return m == RateMode::Canonical ? "canonical" : "smoothed"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "zigzag") return Algorithm::ZigZag;
  if (s == "bps") return Algorithm::BouncyParticle;
  if (s == "boomerang") return Algorithm::BoomerangPure;
  if (s == "boomerang_factorised") return Algorithm::BoomerangFactorised;
  throw InvalidArgument("unknown algorithm '" + s + "' (zigzag, bps, boomerang, boomerang_factorised)",
                        "sampler.algorithm");
}

RateMode parse_rate_mode(const std::string& s) {
  if (s == "canonical") return RateMode::Canonical;
  if (s == "smoothed") return RateMode::Smoothed;
  throw InvalidArgument("unknown rate mode '" + s + "' (canonical, smoothed)", "sampler.rate_mode");
}

double smoothed_rate(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

// Velocity law ----------------------------------------------------------------

VelocityLaw VelocityLaw::signs(std::vector<double> speeds) {
  VelocityLaw law;
  law.n_ = speeds.size();
  law.variances_.resize(speeds.size());
  for (std::size_t i = 0; i < speeds.size(); ++i) law.variances_[i] = speeds[i] * speeds[i];
  law.speeds_ = std::move(speeds);
  return law;
}

VelocityLaw VelocityLaw::gaussian(const SpectralBasis& basis, double power) {
  VelocityLaw law;
  law.n_ = basis.n_modes();
  law.gaussian_.emplace(basis, power);
  const auto var = law.gaussian_->variances();
  law.variances_.assign(var.begin(), var.end());
  return law;
}

void VelocityLaw::sample_into(RandomSource& rng, std::span<double> v, std::size_t n_active) const {
  n_active = std::min(n_active, n_);
  if (gaussian_) {
    gaussian_->sample_into(rng, v, n_active);
  } else {
    for (std::size_t i = 0; i < n_active; ++i) v[i] = rng.sign() * speeds_[i];
  }
}

CoeffVector VelocityLaw::sample(RandomSource& rng) const {
  CoeffVector v(n_);
  sample_into(rng, v, n_);
  return v;
}

// Rates -----------------------------------------------------------------------

std::vector<double> zigzag_rates(const PhaseState& z, const TargetPotential& target, const SpectralBasis& basis) {
  const CoeffVector g = target.grad(z.x);
  const auto inv = basis.inverse_eigenvalues();
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::max(0.0, z.v[i] * (z.x[i] * inv[i] + g[i]));
  return out;
}

double boomerang_pure_rate(const PhaseState& z, const TargetPotential& target) {
  return std::max(0.0, kernels::dot(target.grad(z.x), z.v));
}

std::vector<double> boomerang_factorised_rates(const PhaseState& z, const TargetPotential& target) {
  const CoeffVector g = target.grad(z.x);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::max(0.0, z.v[i] * g[i]);
  return out;
}

namespace {

CoeffVector grad_psi(const PhaseState& z, const TargetPotential& target, const SpectralBasis& basis) {
  CoeffVector g = target.grad(z.x);
  const auto inv = basis.inverse_eigenvalues();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += inv[i] * z.x[i];
  return g;
}

}  // namespace

double bps_rate(const PhaseState& z, const TargetPotential& target, const SpectralBasis& basis) {
  return std::max(0.0, kernels::dot(grad_psi(z, target, basis), z.v));
}

// Reflections -------------------------------------------------------------------

PhaseState zigzag_flip(PhaseState z, std::size_t i) {
  z.v.at(i) = -z.v[i];
  return z;
}

PhaseState negate_velocity(PhaseState z) {
  for (double& vi : z.v) vi = -vi;
  return z;
}

void reflect_hyperplane(std::span<double> v, std::span<const double> direction, std::span<const double> metric) {
  const std::size_t n = v.size();
  double q = 0.0;
  double p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q += metric[i] * direction[i] * direction[i];
    p += v[i] * direction[i];
  }
  if (!(q >= 1e-14)) throw DegenerateGradient("reflection direction vanishes (weighted norm " + std::to_string(q) + ")");
  const double k = 2.0 * p / q;
  for (std::size_t i = 0; i < n; ++i) v[i] -= k * metric[i] * direction[i];
}

PhaseState bps_reflect(PhaseState z, const TargetPotential& target, const SpectralBasis& basis, double zeta) {
  const CoeffVector g = grad_psi(z, target, basis);
  const GaussianMeasure m(basis, zeta);
  reflect_hyperplane(z.v, g, m.variances());
  return z;
}

PhaseState finite_dim_reflect(PhaseState z, const TargetPotential& target, std::span<const double> sigma_v) {
  const CoeffVector g = target.grad(z.x);
  reflect_hyperplane(z.v, g, sigma_v);
  return z;
}

PhaseState apply_reflection(ReflectionKind kind, PhaseState z, const TargetPotential& target,
                            const SpectralBasis& basis, double zeta, std::size_t mode) {
  switch (kind) {
    case ReflectionKind::NegateAll: return negate_velocity(std::move(z));
    case ReflectionKind::FlipMode: return zigzag_flip(std::move(z), mode);
    case ReflectionKind::BpsHyperplane: return bps_reflect(std::move(z), target, basis, zeta);
    case ReflectionKind::FiniteDimGradient: return finite_dim_reflect(std::move(z), target, basis.eigenvalues());
  }
  return z;
}

PhaseState refresh_jump(PhaseState z, const VelocityLaw& law, RandomSource& rng) {
  law.sample_into(rng, z.v, z.v.size());
  return z;
}

// Channel banks -------------------------------------------------------------------

namespace {

const double kLog2 = std::numbers::ln2;
// Absolute padding added to majorants so that rounding in the rate cannot
// overshoot a bound that is nearly zero through cancellation.
constexpr double kPad = 1e-12;

struct BankCommon {
  SpectralBasis basis;
  TargetPotential target;
  std::size_t n_active;
  RateMode mode;
  ExtraRate extra;
  double refresh_rate;
  VelocityLaw velocity;

  double shaped(double u) const { return mode == RateMode::Smoothed ? smoothed_rate(u) : std::max(0.0, u); }
  double mode_pad() const { return mode == RateMode::Smoothed ? kLog2 : 0.0; }

  void gradient(const PhaseState& z, std::vector<double>& g) const {
    g.resize(z.size());
    if (target.is_zero) std::fill(g.begin(), g.end(), 0.0);
    else target.gradient(z.x, g);
  }

  double active_sq(std::span<const double> a) const {
    return kernels::sum_sq(std::span<const double>(a.data(), n_active));
  }

  double growth(double xn) const { return target.is_zero ? 0.0 : target.grad_bound(xn); }

  double custom_extra(const PhaseState& z, std::size_t c) const {
    return extra.kind == ExtraRate::Kind::Custom ? extra.fn(z, c) : 0.0;
  }
};

class BankBase : public RateChannels {
 public:
  explicit BankBase(BankCommon common, std::size_t n_reflect)
      : c_(std::move(common)), n_reflect_(n_reflect), has_refresh_(c_.refresh_rate > 0.0) {}

  std::size_t size() const override { return n_reflect_ + (has_refresh_ ? 1 : 0); }
  bool stochastic(std::size_t c) const override { return c == n_reflect_; }
  std::uint64_t channel_key(std::size_t c) const override { return c == n_reflect_ ? kRefreshKey : c; }

  void jump(std::size_t c, PhaseState& z, RandomSource& rng) const override {
    if (c == n_reflect_) c_.velocity.sample_into(rng, z.v, c_.n_active);
    else reflect(c, z);
  }

  std::optional<std::size_t> refresh_index() const {
    return has_refresh_ ? std::optional<std::size_t>(n_reflect_) : std::nullopt;
  }
  std::size_t n_reflect() const noexcept { return n_reflect_; }
  virtual void reflect(std::size_t c, PhaseState& z) const = 0;
  /// Extra rate in isolation (symmetry check).
  virtual double extra_rate(const PhaseState& z, std::size_t c) const = 0;

 protected:
  void fill_refresh(std::span<double> out) const {
    if (has_refresh_) out[n_reflect_] = c_.refresh_rate;
  }

  BankCommon c_;
  std::size_t n_reflect_;
  bool has_refresh_;
};

class ZigZagBank final : public BankBase {
 public:
  explicit ZigZagBank(BankCommon c) : BankBase(std::move(c), 0) { n_reflect_ = c_.n_active; }

  void rates(const PhaseState& z, std::span<double> out) const override {
    thread_local std::vector<double> g;
    c_.gradient(z, g);
    const auto inv = c_.basis.inverse_eigenvalues();
    for (std::size_t i = 0; i < n_reflect_; ++i)
      out[i] = c_.shaped(z.v[i] * (z.x[i] * inv[i] + g[i])) + extra_rate(z, i);
    fill_refresh(out);
  }

  void bounds(const PhaseState& z, double h, std::span<double> out) const override {
    const auto inv = c_.basis.inverse_eigenvalues();
    const double xn = std::sqrt(c_.active_sq(z.x));
    const double vn = std::sqrt(c_.active_sq(z.v));
    const double G = c_.growth(xn + h * vn);
    for (std::size_t i = 0; i < n_reflect_; ++i) {
      const double vx = z.v[i] * z.x[i];
      const double vv = z.v[i] * z.v[i];
      const double lin = (vx + h * vv) * inv[i];
      double b = std::max(0.0, lin) + std::abs(z.v[i]) * G + c_.mode_pad() + extra_bound(z, i);
      b += kPad * (1.0 + (std::abs(vx) + h * vv) * inv[i] + b);
      out[i] = b;
    }
    fill_refresh(out);
  }

  void reflect(std::size_t c, PhaseState& z) const override { z.v[c] = -z.v[c]; }

  double extra_rate(const PhaseState& z, std::size_t c) const override {
    switch (c_.extra.kind) {
      case ExtraRate::Kind::None: return 0.0;
      case ExtraRate::Kind::Constant: return c_.extra.value;
      case ExtraRate::Kind::Speed: return c_.extra.value * std::abs(z.v[c]);
      case ExtraRate::Kind::Custom: return c_.custom_extra(z, c);
    }
    return 0.0;
  }

 private:
  double extra_bound(const PhaseState& z, std::size_t c) const {
    switch (c_.extra.kind) {
      case ExtraRate::Kind::None: return 0.0;
      case ExtraRate::Kind::Constant: return c_.extra.value;
      case ExtraRate::Kind::Speed: return c_.extra.value * std::abs(z.v[c]);
      case ExtraRate::Kind::Custom: return c_.extra.custom_bound;
    }
    return 0.0;
  }
};

class BpsBank final : public BankBase {
 public:
  BpsBank(BankCommon c, double zeta) : BankBase(std::move(c), 1) {
    const GaussianMeasure m(c_.basis, zeta);
    metric_.assign(m.variances().begin(), m.variances().end());
  }

  void rates(const PhaseState& z, std::span<double> out) const override {
    thread_local std::vector<double> g;
    psi_gradient(z, g);
    out[0] = c_.shaped(kernels::dot(std::span<const double>(g.data(), c_.n_active),
                                    std::span<const double>(z.v.data(), c_.n_active))) +
             extra_rate(z, 0);
    fill_refresh(out);
  }

  void bounds(const PhaseState& z, double h, std::span<double> out) const override {
    const auto inv = c_.basis.inverse_eigenvalues();
    const std::size_t n = c_.n_active;
    double vx = 0.0, vv = 0.0, avx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      vx += z.v[i] * z.x[i] * inv[i];
      avx += std::abs(z.v[i] * z.x[i]) * inv[i];
      vv += z.v[i] * z.v[i] * inv[i];
    }
    const double xn = std::sqrt(c_.active_sq(z.x));
    const double vn = std::sqrt(c_.active_sq(z.v));
    double b = std::max(0.0, vx + h * vv) + vn * c_.growth(xn + h * vn) + c_.mode_pad() + extra_bound(z);
    b += kPad * (1.0 + avx + h * vv + b);
    out[0] = b;
    fill_refresh(out);
  }

  void reflect(std::size_t, PhaseState& z) const override {
    thread_local std::vector<double> g;
    psi_gradient(z, g);
    const std::size_t n = c_.n_active;
    try {
      reflect_hyperplane(std::span<double>(z.v.data(), n), std::span<const double>(g.data(), n),
                         std::span<const double>(metric_.data(), n));
    } catch (const DegenerateGradient&) {
      for (std::size_t i = 0; i < n; ++i) z.v[i] = -z.v[i];
    }
  }

  double extra_rate(const PhaseState& z, std::size_t) const override {
    switch (c_.extra.kind) {
      case ExtraRate::Kind::None: return 0.0;
      case ExtraRate::Kind::Constant: return c_.extra.value;
      case ExtraRate::Kind::Speed: return c_.extra.value * metric_speed(z);
      case ExtraRate::Kind::Custom: return c_.custom_extra(z, 0);
    }
    return 0.0;
  }

 private:
  void psi_gradient(const PhaseState& z, std::vector<double>& g) const {
    c_.gradient(z, g);
    const auto inv = c_.basis.inverse_eigenvalues();
    for (std::size_t i = 0; i < c_.n_active; ++i) g[i] += inv[i] * z.x[i];
  }

  // sqrt(<Sigma^{-zeta} v, v>), preserved by the hyperplane reflection.
  double metric_speed(const PhaseState& z) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < c_.n_active; ++i) acc += z.v[i] * z.v[i] / metric_[i];
    return std::sqrt(acc);
  }

  double extra_bound(const PhaseState& z) const {
    switch (c_.extra.kind) {
      case ExtraRate::Kind::None: return 0.0;
      case ExtraRate::Kind::Constant: return c_.extra.value;
      case ExtraRate::Kind::Speed: return c_.extra.value * metric_speed(z);
      case ExtraRate::Kind::Custom: return c_.extra.custom_bound;
    }
    return 0.0;
  }

  std::vector<double> metric_;
};

class BoomerangPureBank final : public BankBase {
 public:
  BoomerangPureBank(BankCommon c, bool gradient_reflection)
      : BankBase(std::move(c), 1), gradient_reflection_(gradient_reflection) {}

  void rates(const PhaseState& z, std::span<double> out) const override {
    thread_local std::vector<double> g;
    c_.gradient(z, g);
    out[0] = c_.shaped(kernels::dot(std::span<const double>(g.data(), c_.n_active),
                                    std::span<const double>(z.v.data(), c_.n_active))) +
             extra_rate(z, 0);
    fill_refresh(out);
  }

  void bounds(const PhaseState& z, double, std::span<double> out) const override {
    // ||x|| ||v|| <= r^2 / 2 with r^2 = ||x||^2 + ||v||^2 conserved by the rotation.
    const double r2 = c_.active_sq(z.x) + c_.active_sq(z.v);
    const double r = std::sqrt(r2);
    double b = c_.target.is_zero ? 0.0 : c_.target.m0 * r + 0.5 * c_.target.m1 * r2;
    b += c_.mode_pad() + extra_bound(r);
    b += kPad * (1.0 + b);
    out[0] = b;
    fill_refresh(out);
  }

  void reflect(std::size_t, PhaseState& z) const override {
    const std::size_t n = c_.n_active;
    if (gradient_reflection_) {
      thread_local std::vector<double> g;
      c_.gradient(z, g);
      try {
        reflect_hyperplane(std::span<double>(z.v.data(), n), std::span<const double>(g.data(), n),
                           std::span<const double>(c_.velocity.variances().data(), n));
        return;
      } catch (const DegenerateGradient&) {
      }
    }
    for (std::size_t i = 0; i < n; ++i) z.v[i] = -z.v[i];
  }

  double extra_rate(const PhaseState& z, std::size_t) const override {
    switch (c_.extra.kind) {
      case ExtraRate::Kind::None: return 0.0;
      case ExtraRate::Kind::Constant: return c_.extra.value;
      case ExtraRate::Kind::Speed: return c_.extra.value * std::sqrt(c_.active_sq(z.v));
      case ExtraRate::Kind::Custom: return c_.custom_extra(z, 0);
    }
    return 0.0;
  }

 private:
  double extra_bound(double r) const {
    switch (c_.extra.kind) {
      case ExtraRate::Kind::None: return 0.0;
      case ExtraRate::Kind::Constant: return c_.extra.value;
      case ExtraRate::Kind::Speed: return c_.extra.value * r;
      case ExtraRate::Kind::Custom: return c_.extra.custom_bound;
    }
    return 0.0;
  }

  bool gradient_reflection_;
};

class BoomerangFactorisedBank final : public BankBase {
 public:
  explicit BoomerangFactorisedBank(BankCommon c) : BankBase(std::move(c), 0) { n_reflect_ = c_.n_active; }

  void rates(const PhaseState& z, std::span<double> out) const override {
    thread_local std::vector<double> g;
    c_.gradient(z, g);
    for (std::size_t i = 0; i < n_reflect_; ++i) out[i] = c_.shaped(z.v[i] * g[i]) + extra_rate(z, i);
    fill_refresh(out);
  }

  void bounds(const PhaseState& z, double, std::span<double> out) const override {
    // |v_i d_i Phi| <= r_i ||grad Phi||, with each r_i conserved by the rotation.
    const double r = std::sqrt(c_.active_sq(z.x) + c_.active_sq(z.v));
    const double G = c_.growth(r);
    for (std::size_t i = 0; i < n_reflect_; ++i) {
      const double ri = std::hypot(z.x[i], z.v[i]);
      double b = ri * G + c_.mode_pad() + extra_bound(ri);
      b += kPad * (1.0 + b);
      out[i] = b;
    }
    fill_refresh(out);
  }

  void reflect(std::size_t c, PhaseState& z) const override { z.v[c] = -z.v[c]; }

  double extra_rate(const PhaseState& z, std::size_t c) const override {
    switch (c_.extra.kind) {
      case ExtraRate::Kind::None: return 0.0;
      case ExtraRate::Kind::Constant: return c_.extra.value;
      case ExtraRate::Kind::Speed: return c_.extra.value * std::abs(z.v[c]);
      case ExtraRate::Kind::Custom: return c_.custom_extra(z, c);
    }
    return 0.0;
  }

 private:
  double extra_bound(double ri) const {
    switch (c_.extra.kind) {
      case ExtraRate::Kind::None: return 0.0;
      case ExtraRate::Kind::Constant: return c_.extra.value;
      case ExtraRate::Kind::Speed: return c_.extra.value * ri;
      case ExtraRate::Kind::Custom: return c_.extra.custom_bound;
    }
    return 0.0;
  }
};

std::vector<double> default_speeds(const SpectralBasis& basis, double r) {
  std::vector<double> a(basis.n_modes());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(basis.eigenvalue(i), 0.5 * (3.0 - 2.0 * r));
  return a;
}

void check_extra_symmetry(const BankBase& bank, const SamplerAssembly& a) {
  if (a.spec.extra.kind == ExtraRate::Kind::None) return;
  if (a.spec.extra.kind != ExtraRate::Kind::Custom && !(a.spec.extra.value >= 0.0))
    throw InvalidArgument("extra rate must be non-negative", "sampler.extra_rate");
  if (a.spec.extra.kind == ExtraRate::Kind::Custom && !a.spec.extra.fn)
    throw InvalidArgument("custom extra rate needs a function", "sampler.extra_rate");
  RandomStream rng(0x9e3779b97f4a7c15ULL, 0x5e77);
  for (int probe = 0; probe < 100; ++probe) {
    PhaseState z = a.sample_reference(rng);
    for (std::size_t c = 0; c < bank.n_reflect(); ++c) {
      PhaseState r = z;
      bank.reflect(c, r);
      const double g0 = bank.extra_rate(z, c);
      const double g1 = bank.extra_rate(r, c);
      if (!(g0 >= 0.0)) throw InvalidArgument("extra rate must be non-negative", "sampler.extra_rate");
      if (std::abs(g0 - g1) > 1e-9 * (1.0 + std::abs(g0)))
        throw InvalidArgument("extra rate is not invariant under the channel reflection", "sampler.extra_rate");
    }
  }
}

}  // namespace

PhaseState SamplerAssembly::sample_reference(RandomSource& rng) const {
  PhaseState z;
  z.x = GaussianMeasure(basis, 1.0).sample(rng);
  z.v = velocity.sample(rng);
  return z;
}

EventSkeleton SamplerAssembly::run(const PhaseState& initial, double t_end, RandomSource& rng,
                                   std::size_t max_events, EngineStats* stats, bool record) const {
  RunOptions opt;
  opt.horizon = horizon;
  opt.max_events = max_events;
  opt.stats = stats;
  opt.record = record;
  return run_pdmp(initial, *channels, flow, t_end, rng, opt);
}

SamplerAssembly assemble_sampler(const SamplerSpec& spec, const TargetPotential& target, const SpectralBasis& basis) {
  const std::size_t n = basis.n_modes();
  if (target.n_modes != n) throw InvalidArgument("target and basis truncations differ", "target");
  const std::size_t n_active = spec.approx_level.value_or(n);
  if (n_active < 1 || n_active > n)
    throw InvalidArgument("approx_level must lie in [1, n_modes]", "sampler.approx_level");
  if (!(spec.refresh_rate >= 0.0) || !std::isfinite(spec.refresh_rate))
    throw InvalidArgument("refresh rate must be finite and non-negative", "sampler.refresh_rate");
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon))
    throw InvalidArgument("horizon must be positive and finite", "sampler.horizon");

  std::vector<std::string> warnings;
  TargetPotential projected = projected_target(target, n_active);
  BankCommon common{basis, projected, n_active, spec.rate_mode, spec.extra, spec.refresh_rate, VelocityLaw{}};
  std::shared_ptr<BankBase> bank;
  Flow flow;

  switch (spec.algorithm) {
    case Algorithm::ZigZag: {
      std::vector<double> a = spec.zz_velocities ? *spec.zz_velocities : default_speeds(basis, spec.zz_tuning_r);
      if (a.size() != n) throw InvalidArgument("zz_velocities must have one entry per mode", "sampler.zz_velocities");
      double membership = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(a[i] > 0.0) || !std::isfinite(a[i]))
          throw InvalidArgument("zz_velocities must be positive and finite", "sampler.zz_velocities");
        membership += a[i] * a[i] / (basis.eigenvalue(i) * basis.eigenvalue(i));
      }
      if (!std::isfinite(membership))
        throw InvalidArgument("sum a_i^2 / gamma_i^4 diverges at this truncation", "sampler.zz_velocities");
      common.velocity = VelocityLaw::signs(std::move(a));
      flow = Flow::linear(n, n_active);
      bank = std::make_shared<ZigZagBank>(std::move(common));
      break;
    }
    case Algorithm::BouncyParticle: {
      if (!(spec.bps_zeta >= 2.0) || !std::isfinite(spec.bps_zeta))
        throw InvalidArgument("bps_zeta must be at least 2", "sampler.bps_zeta");
      if (spec.bps_zeta < 4.0)
        warnings.push_back("bps_zeta below 4: the reflection is not covered by the Gaussian-invariance result");
      common.velocity = VelocityLaw::gaussian(basis, spec.bps_zeta);
      flow = Flow::linear(n, n_active);
      bank = std::make_shared<BpsBank>(std::move(common), spec.bps_zeta);
      break;
    }
    case Algorithm::BoomerangPure:
    case Algorithm::BoomerangFactorised: {
      common.velocity = VelocityLaw::gaussian(basis, 1.0);
      flow = Flow::rotation_unit(n, n_active);
      if (spec.algorithm == Algorithm::BoomerangPure)
        bank = std::make_shared<BoomerangPureBank>(std::move(common), spec.boomerang_gradient_reflection);
      else
        bank = std::make_shared<BoomerangFactorisedBank>(std::move(common));
      if (spec.refresh_rate == 0.0) warnings.push_back("refresh_rate = 0: no ergodicity guarantee");
      break;
    }
  }

  SamplerAssembly a{spec.algorithm, spec,     basis,   projected, n_active,  flow,
                    bank,           VelocityLaw{}, spec.horizon, std::move(warnings), bank->refresh_index()};
  a.velocity = spec.algorithm == Algorithm::ZigZag
                   ? VelocityLaw::signs(spec.zz_velocities ? *spec.zz_velocities
                                                           : default_speeds(basis, spec.zz_tuning_r))
                   : VelocityLaw::gaussian(basis, spec.algorithm == Algorithm::BouncyParticle ? spec.bps_zeta : 1.0);
  check_extra_symmetry(*bank, a);
  return a;
}

ScaledChannels::ScaledChannels(std::shared_ptr<const RateChannels> inner, double factor,
                               std::optional<std::size_t> keep)
    : inner_(std::move(inner)), factor_(factor), keep_(keep) {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
}

void ScaledChannels::rates(const PhaseState& z, std::span<double> out) const {
  inner_->rates(z, out);
  for (std::size_t c = 0; c < out.size(); ++c)
    if (!keep_ || c != *keep_) out[c] *= factor_;
}

void ScaledChannels::bounds(const PhaseState& z, double horizon, std::span<double> out) const {
  inner_->bounds(z, horizon, out);
  for (std::size_t c = 0; c < out.size(); ++c)
    if (!keep_ || c != *keep_) out[c] *= factor_;
}

SamplerAssembly corrupt_rates(const SamplerAssembly& a, double factor) {
  SamplerAssembly out = a;
  out.channels = std::make_shared<ScaledChannels>(a.channels, factor, a.refresh_channel);
  return out;
}

}  // namespace pdmp
