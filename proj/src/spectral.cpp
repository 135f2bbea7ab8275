#include "pdmp/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pdmp/errors.hpp"

namespace pdmp {

SpectralBasis::SpectralBasis(BasisKind kind, double parameter, std::vector<double> eigenvalues)
    : kind_(kind), parameter_(parameter), eigenvalues_(std::move(eigenvalues)), trace_(0.0) {
  if (eigenvalues_.empty()) throw InvalidArgument("basis needs at least one mode", "basis.n_modes");
  inverse_.resize(eigenvalues_.size());
  for (std::size_t i = 0; i < eigenvalues_.size(); ++i) {
    const double g = eigenvalues_[i];
    if (!(g > 0.0) || !std::isfinite(g))
      throw InvalidArgument("eigenvalue " + std::to_string(i + 1) + " must be positive and finite",
                            "basis.eigenvalues");
    if (i > 0 && g > eigenvalues_[i - 1])
      throw InvalidArgument("eigenvalues must be non-increasing", "basis.eigenvalues");
    inverse_[i] = 1.0 / g;
  }
  // Smallest terms first keeps the partial sum accurate for slowly decaying spectra.
  for (std::size_t i = eigenvalues_.size(); i-- > 0;) trace_ += eigenvalues_[i];
}

SpectralBasis SpectralBasis::power_law(double s, std::size_t n_modes) {
  if (!(s > 1.0)) throw InvalidArgument("power-law exponent must exceed 1 (trace class)", "basis.s");
  if (n_modes == 0) throw InvalidArgument("n_modes must be at least 1", "basis.n_modes");
  std::vector<double> ev(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) ev[i] = std::pow(static_cast<double>(i + 1), -s);
  return SpectralBasis(BasisKind::PowerLaw, s, std::move(ev));
}

SpectralBasis SpectralBasis::brownian_bridge(double horizon, std::size_t n_modes) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InvalidArgument("bridge horizon must be positive", "basis.T");
  if (n_modes == 0) throw InvalidArgument("n_modes must be at least 1", "basis.n_modes");
  std::vector<double> ev(n_modes);
  const double pi = std::numbers::pi;
  for (std::size_t k = 1; k <= n_modes; ++k) {
    const double kp = static_cast<double>(k) * pi;
    ev[k - 1] = horizon * horizon / (kp * kp);
  }
  return SpectralBasis(BasisKind::BrownianBridge, horizon, std::move(ev));
}

SpectralBasis SpectralBasis::custom(std::vector<double> eigenvalues) {
  return SpectralBasis(BasisKind::Custom, 0.0, std::move(eigenvalues));
}

SpectralBasis SpectralBasis::wiener(std::size_t n_modes) {
  if (n_modes == 0) throw InvalidArgument("n_modes must be at least 1", "basis.n_modes");
  std::vector<double> ev(n_modes);
  const double pi = std::numbers::pi;
  for (std::size_t i = 1; i <= n_modes; ++i) {
    const double w = (static_cast<double>(i) - 0.5) * pi;
    ev[i - 1] = 1.0 / (w * w);
  }
  return custom(std::move(ev));
}

double SpectralBasis::tail_trace(std::size_t from) const {
  double acc = 0.0;
  for (std::size_t i = eigenvalues_.size(); i-- > from;) acc += eigenvalues_[i];
  return acc;
}

double SpectralBasis::bridge_mode(std::size_t k, double t) const {
  if (kind_ != BasisKind::BrownianBridge) throw InvalidArgument("bridge_mode needs a Brownian bridge basis");
  const double T = parameter_;
  return std::sqrt(2.0 / T) * std::sin(static_cast<double>(k) * std::numbers::pi * t / T);
}

void require_same_modes(const SpectralBasis& a, const SpectralBasis& b) {
  if (a.n_modes() != b.n_modes())
    throw InvalidArgument("truncation mismatch: " + std::to_string(a.n_modes()) + " vs " +
                          std::to_string(b.n_modes()));
}

GaussianMeasure::GaussianMeasure(SpectralBasis basis, double power) : basis_(std::move(basis)), power_(power) {
  if (!std::isfinite(power)) throw InvalidArgument("covariance power must be finite");
  const auto ev = basis_.eigenvalues();
  variance_.resize(ev.size());
  stddev_.resize(ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    variance_[i] = power == 1.0 ? ev[i] : std::pow(ev[i], power);
    stddev_[i] = std::sqrt(variance_[i]);
  }
}

double GaussianMeasure::trace() const {
  double acc = 0.0;
  for (std::size_t i = variance_.size(); i-- > 0;) acc += variance_[i];
  return acc;
}

CoeffVector GaussianMeasure::sample(RandomSource& rng) const {
  CoeffVector out(n_modes());
  sample_into(rng, out, n_modes());
  return out;
}

void GaussianMeasure::sample_into(RandomSource& rng, std::span<double> out, std::size_t n_active) const {
  if (out.size() != n_modes()) throw InvalidArgument("sample_into: output length mismatch");
  if (n_active > n_modes()) n_active = n_modes();
  for (std::size_t i = 0; i < n_active; ++i) out[i] = stddev_[i] * rng.normal();
}

double hurwitz_tail(double s, std::size_t n) {
  if (!(s > 1.0)) throw InvalidArgument("hurwitz_tail needs s > 1", "s");
  // Sum directly until the Euler-Maclaurin remainder is tiny, then expand at a.
  constexpr double kStart = 16.0;
  double direct = 0.0;
  double a = static_cast<double>(n) + 1.0;
  std::vector<double> head;
  while (a < kStart) {
    head.push_back(std::pow(a, -s));
    a += 1.0;
  }
  for (std::size_t i = head.size(); i-- > 0;) direct += head[i];

  // zeta(s, a) = a^{1-s}/(s-1) + a^{-s}/2 + sum_k B_2k/(2k)! (s)_{2k-1} a^{-s-2k+1} + R
  static constexpr double kBernoulli[] = {1.0 / 6.0,         -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                          5.0 / 66.0,        -691.0 / 2730.0, 7.0 / 6.0};
  const double a_s = std::pow(a, -s);
  double tail = a * a_s / (s - 1.0) + 0.5 * a_s;
  double rising = s;         // (s)_{2k-1}
  double factorial = 2.0;    // (2k)!
  double apow = a_s / a;     // a^{-s-2k+1}
  for (std::size_t k = 1; k <= std::size(kBernoulli); ++k) {
    tail += kBernoulli[k - 1] / factorial * rising * apow;
    const double m = 2.0 * static_cast<double>(k);
    rising *= (s + m - 1.0) * (s + m);
    factorial *= (m + 1.0) * (m + 2.0);
    apow /= a * a;
  }
  return direct + tail;
}

}  // namespace pdmp
