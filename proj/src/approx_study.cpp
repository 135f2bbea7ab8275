#include "pdmp/approx_study.hpp"

#include <algorithm>
#include <cmath>

#include "pdmp/diagnostics.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/parallel.hpp"

namespace pdmp {

PhaseState quadratic_posterior_draw(const SamplerAssembly& sampler, RandomSource& rng) {
  PhaseState z;
  const std::size_t n = sampler.basis.n_modes();
  z.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = sampler.basis.eigenvalue(i);
    z.x[i] = std::sqrt(g / (1.0 + g)) * rng.normal();
  }
  z.v = sampler.velocity.sample(rng);
  return z;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs two or more paired points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("log-log slope needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

std::vector<ApproxStudyRow> approx_error_study(const SamplerSpec& spec, const TargetPotential& target,
                                               const SpectralBasis& basis, const Functional& f,
                                               const std::vector<std::size_t>& levels, double t_horizon,
                                               std::size_t ensemble, std::uint64_t seed,
                                               const ApproxStudyOptions& options) {
  if (levels.empty()) throw InvalidArgument("approx study needs at least one level", "study.levels");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < 1 || (k > 0 && levels[k] <= levels[k - 1]))
      throw InvalidArgument("levels must be positive and strictly increasing", "study.levels");
  }
  if (levels.back() > basis.n_modes())
    throw InvalidArgument("levels must not exceed the reference truncation", "study.levels");
  if (!(t_horizon > 0.0)) throw InvalidArgument("study horizon must be positive", "study.t_horizon");
  if (ensemble < 2) throw InvalidArgument("ensemble must have at least two members", "study.ensemble");
  if (options.replicates < 2) throw InvalidArgument("need at least two replicates per member", "study.replicates");

  SamplerSpec ref_spec = spec;
  ref_spec.approx_level.reset();
  const SamplerAssembly ref = assemble_sampler(ref_spec, target, basis);
  std::vector<SamplerAssembly> approx;
  approx.reserve(levels.size());
  for (std::size_t L : levels) {
    SamplerSpec s = spec;
    s.approx_level = L;
    approx.push_back(assemble_sampler(s, target, basis));
  }

  std::function<PhaseState(RandomSource&)> initial = options.initial;
  if (!initial) {
    if (target.name == "quadratic") {
      initial = [&ref](RandomSource& r) { return quadratic_posterior_draw(ref, r); };
    } else {
      initial = [&ref](RandomSource& r) { return resample_stationary(ref, 1, 64, r).front(); };
    }
  }

  CoupledOptions copt;
  copt.horizon = spec.horizon;
  copt.band_height = options.band_height;
  copt.max_events = options.max_events;
  const std::size_t nl = levels.size();
  // products[m * nl + l]: unbiased estimate of (P^{N'} f - P f)^2 at member m.
  std::vector<double> products(ensemble * nl);

  const std::size_t reps = options.replicates;
  parallel_for(ensemble, options.threads, [&](std::size_t m) {
    RandomStream init_rng(seed, 2 * m);
    const PhaseState z0 = initial(init_rng);
    std::vector<double> sum(nl, 0.0), sum_sq(nl, 0.0);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const std::uint64_t key = derive_seed({seed, m, rep + 1});
      const double fr = f(run_pdmp_coupled(z0, *ref.channels, ref.flow, t_horizon, key, copt).final_state);
      for (std::size_t l = 0; l < nl; ++l) {
        const SamplerAssembly& a = approx[l];
        const double d = f(run_pdmp_coupled(z0, *a.channels, a.flow, t_horizon, key, copt).final_state) - fr;
        sum[l] += d;
        sum_sq[l] += d * d;
      }
    }
    // Mean of Delta_r Delta_s over ordered pairs r != s.
    const double pairs = static_cast<double>(reps) * static_cast<double>(reps - 1);
    for (std::size_t l = 0; l < nl; ++l) products[m * nl + l] = (sum[l] * sum[l] - sum_sq[l]) / pairs;
  });

  const bool power_law = basis.kind() == BasisKind::PowerLaw;
  std::vector<ApproxStudyRow> rows(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t m = 0; m < ensemble; ++m) {
      const double p = products[m * nl + l];
      s += p;
      s2 += p * p;
    }
    const double n = static_cast<double>(ensemble);
    const double mean = s / n;
    const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
    ApproxStudyRow& r = rows[l];
    r.n_approx = levels[l];
    r.t_horizon = t_horizon;
    r.error_sq = mean;
    r.error_sq_se = std::sqrt(var / n);
    r.error_l2mu = std::sqrt(std::max(0.0, mean));
    r.error_se = r.error_l2mu > 0.0 ? r.error_sq_se / (2.0 * r.error_l2mu) : std::sqrt(r.error_sq_se);
    r.finite_tail_sqrt = std::sqrt(basis.tail_trace(levels[l]));
    r.tail_sqrt = power_law ? std::sqrt(hurwitz_tail(basis.parameter(), levels[l])) : r.finite_tail_sqrt;
  }
  const double c = rows[0].tail_sqrt > 0.0 ? rows[0].error_l2mu / (t_horizon * rows[0].tail_sqrt) : 0.0;
  for (auto& r : rows) {
    r.bound_constant = c;
    r.predicted_bound = c * t_horizon * r.tail_sqrt;
  }
  return rows;
}

}  // namespace pdmp
