#include "pdmp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pdmp/errors.hpp"
#include "pdmp/kernels.hpp"
#include "pdmp/parallel.hpp"

namespace pdmp {

VarianceEstimate batch_means_variance(const EventSkeleton& skeleton, const Flow& flow, const StateFunction& f,
                                      std::size_t n_batches, std::string name) {
  if (n_batches < kMinBatches)
    throw InvalidArgument("batch means needs at least " + std::to_string(kMinBatches) + " batches", "study.batches");
  const double t0 = skeleton.initial.t;
  const double T = skeleton.t_end - t0;
  if (skeleton.event_count == 0) throw InsufficientLength("trajectory has no events");
  if (skeleton.events.size() != skeleton.event_count)
    throw InvalidArgument("batch means needs a skeleton with recorded events");
  const double mean_gap = T / static_cast<double>(skeleton.event_count);
  const double L = T / static_cast<double>(n_batches);
  if (L < 10.0 * mean_gap)
    throw InsufficientLength("batch length " + std::to_string(L) + " is below 10 mean inter-event times (" +
                             std::to_string(mean_gap) + ")");

  std::vector<double> edges(n_batches + 1);
  for (std::size_t k = 0; k <= n_batches; ++k) edges[k] = t0 + L * static_cast<double>(k);
  edges.back() = skeleton.t_end;
  const std::vector<double> integrals = interval_integrals(skeleton, flow, f, edges);

  double total = 0.0;
  for (double I : integrals) total += I;
  const double mean = total / T;
  double ss = 0.0;
  for (double I : integrals) {
    const double d = I / L - mean;
    ss += d * d;
  }
  const double k = static_cast<double>(n_batches);
  VarianceEstimate est;
  est.functional_name = std::move(name);
  est.time_average = mean;
  est.asym_variance = L * ss / (k - 1.0);
  est.std_error = std::sqrt(est.asym_variance / T);
  est.batches = n_batches;
  est.events_per_unit_time = static_cast<double>(skeleton.event_count) / T;
  est.asym_variance_se = est.asym_variance * std::sqrt(2.0 / (k - 1.0));
  return est;
}

double zigzag_nu2() { return 4.0 * std::sqrt(2.0 / std::numbers::pi); }

ZigZagTuning optimal_zz_velocities(const SpectralBasis& basis, double r) {
  if (!std::isfinite(r)) throw InvalidArgument("tuning exponent must be finite", "sampler.zz_tuning_r");
  ZigZagTuning out;
  const std::size_t n = basis.n_modes();
  out.speeds.resize(n);
  std::vector<double> smooth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g2 = basis.eigenvalue(i);
    const double g = std::sqrt(g2);
    out.speeds[i] = std::pow(g2, 0.5 * (3.0 - 2.0 * r));
    smooth[i] = std::pow(g, 2.0 - 4.0 * r);
  }
  for (std::size_t i = n; i-- > 0;) {
    const double g = std::sqrt(basis.eigenvalue(i));
    out.predicted_sigma2 += std::pow(g, 5.0 - 4.0 * r) / out.speeds[i];
    out.switch_rate_factor += out.speeds[i] / g;
    out.smoothness_sum += smooth[i];
  }
  out.predicted_sigma2 *= zigzag_nu2();
  // The second half of the modes should carry a small share of a convergent sum.
  double upper = 0.0;
  for (std::size_t i = n; i-- > n / 2;) upper += smooth[i];
  if (n >= 4 && upper > 0.1 * out.smoothness_sum) {
    out.smoothness_suspect = true;
    out.warnings.push_back("sum of gamma_i^(2-4r) does not look convergent at this truncation");
  }
  return out;
}

double generator_apply(const SamplerAssembly& s, const Functional& f, const PhaseState& z, RandomSource& rng,
                       std::size_t nested) {
  const std::size_t n = z.size();
  thread_local std::vector<double> gx, gv, rates;
  gx.assign(n, 0.0);
  gv.assign(n, 0.0);
  f.gradient(z, gx, gv);
  double out = 0.0;
  const std::size_t na = s.flow.n_active;
  if (s.flow.kind == FlowKind::Linear) {
    for (std::size_t i = 0; i < na; ++i) out += z.v[i] * gx[i];
  } else {
    for (std::size_t i = 0; i < na; ++i) out += s.flow.omega[i] * (z.v[i] * gx[i] - z.x[i] * gv[i]);
  }
  const RateChannels& ch = *s.channels;
  rates.resize(ch.size());
  ch.rates(z, rates);
  const double f0 = f(z);
  PhaseState w;
  for (std::size_t c = 0; c < ch.size(); ++c) {
    if (rates[c] == 0.0) continue;
    if (!ch.stochastic(c)) {
      w = z;
      ch.jump(c, w, rng);
      out += rates[c] * (f(w) - f0);
    } else {
      if (f.position_only) continue;
      const std::size_t m = std::max<std::size_t>(nested, 1);
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        w = z;
        ch.jump(c, w, rng);
        acc += f(w);
      }
      out += rates[c] * (acc / static_cast<double>(m) - f0);
    }
  }
  return out;
}

InvarianceResult invariance_residual(const SamplerAssembly& s, const std::vector<Functional>& functions,
                                     std::size_t n_samples, RandomSource& rng, const InvarianceOptions& options) {
  if (n_samples < 2) throw InvalidArgument("invariance residual needs at least two samples", "study.samples");
  if (options.chunk == 0) throw InvalidArgument("chunk size must be positive");
  const std::size_t nf = functions.size();
  const std::uint64_t base = rng();
  const std::size_t n_chunks = (n_samples + options.chunk - 1) / options.chunk;
  std::vector<double> logw(n_samples);
  std::vector<double> lf(n_samples * nf);

  parallel_for(n_chunks, options.threads, [&](std::size_t chunk) {
    RandomStream cr(base, chunk);
    const std::size_t lo = chunk * options.chunk;
    const std::size_t hi = std::min(n_samples, lo + options.chunk);
    for (std::size_t k = lo; k < hi; ++k) {
      const PhaseState z = s.sample_reference(cr);
      logw[k] = s.target.is_zero ? 0.0 : -s.target.value(z.x);
      for (std::size_t j = 0; j < nf; ++j) lf[k * nf + j] = generator_apply(s, functions[j], z, cr, options.nested);
    }
  });

  const double lmax = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(n_samples);
  double sw = 0.0, sw2 = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    w[k] = std::exp(logw[k] - lmax);
    sw += w[k];
    sw2 += w[k] * w[k];
  }
  InvarianceResult res;
  res.n_samples = n_samples;
  res.ess = sw * sw / sw2;
  if (res.ess < 0.05 * static_cast<double>(n_samples))
    throw DegenerateWeights("effective sample size " + std::to_string(res.ess) + " below 5% of " +
                            std::to_string(n_samples));
  for (std::size_t j = 0; j < nf; ++j) {
    double num = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) num += w[k] * lf[k * nf + j];
    const double theta = num / sw;
    double var = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
      const double d = w[k] * (lf[k * nf + j] - theta);
      var += d * d;
    }
    res.residuals.push_back(ResidualEstimate{functions[j].name, theta, std::sqrt(var) / sw});
  }
  return res;
}

std::vector<PhaseState> resample_stationary(const SamplerAssembly& s, std::size_t count, std::size_t pool,
                                            RandomSource& rng) {
  if (count == 0 || pool == 0) throw InvalidArgument("resampling needs positive sizes");
  std::vector<PhaseState> props(pool);
  std::vector<double> logw(pool);
  for (std::size_t k = 0; k < pool; ++k) {
    props[k] = s.sample_reference(rng);
    logw[k] = s.target.is_zero ? 0.0 : -s.target.value(props[k].x);
  }
  const double lmax = *std::max_element(logw.begin(), logw.end());
  std::vector<double> cum(pool);
  double acc = 0.0;
  for (std::size_t k = 0; k < pool; ++k) {
    acc += std::exp(logw[k] - lmax);
    cum[k] = acc;
  }
  // Systematic resampling.
  std::vector<PhaseState> out;
  out.reserve(count);
  const double u0 = rng.uniform();
  std::size_t k = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const double target = (u0 + static_cast<double>(j)) / static_cast<double>(count) * acc;
    while (k + 1 < pool && cum[k] <= target) ++k;
    out.push_back(props[k]);
  }
  // Order carries no information; shuffle so members are exchangeable.
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

namespace {

DecayFit fit_decay(const std::vector<std::vector<double>>& values, const std::vector<double>& t_grid,
                   double fit_from) {
  const std::size_t K = values.size();
  const std::size_t G = t_grid.size();
  double mean = 0.0;
  for (const auto& row : values)
    for (double v : row) mean += v;
  mean /= static_cast<double>(K * G);

  double var0 = 0.0;
  for (const auto& row : values) var0 += (row[0] - mean) * (row[0] - mean);
  var0 /= static_cast<double>(K);
  if (!(var0 > 1e-24 * (1.0 + mean * mean))) throw DegenerateInput("functional has no variance under the ensemble");

  DecayFit out;
  out.times = t_grid;
  out.acov.resize(G);
  out.acov_se.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    double s = 0.0, s2 = 0.0;
    for (const auto& row : values) {
      const double p = (row[0] - mean) * (row[g] - mean);
      s += p;
      s2 += p * p;
    }
    const double m = s / static_cast<double>(K);
    out.acov[g] = m;
    out.acov_se[g] = std::sqrt(std::max(0.0, s2 / static_cast<double>(K) - m * m) / static_cast<double>(K - 1));
  }

  std::vector<double> ts, ys;
  for (std::size_t g = 0; g < G; ++g) {
    if (t_grid[g] < fit_from) continue;
    if (!(out.acov[g] > 0.0))
      throw NonPositiveCovariance("autocovariance is non-positive at t=" + std::to_string(t_grid[g]) +
                                  "; shrink the fit window");
    ts.push_back(t_grid[g]);
    ys.push_back(std::log(out.acov[g]));
  }
  if (ts.size() < 2) throw InvalidArgument("decay fit needs at least two grid points in the window", "study.t_grid");
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sty / stt;
  out.kappa = -slope;
  out.intercept = my - slope * mt;
  double ssr = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (out.intercept + slope * ts[i]);
    ssr += r * r;
  }
  out.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return out;
}

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.size() < 2) throw InvalidArgument("time grid needs at least two points", "study.t_grid");
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    if (!(t_grid[g] >= 0.0) || (g > 0 && !(t_grid[g] > t_grid[g - 1])))
      throw InvalidArgument("time grid must be non-negative and increasing", "study.t_grid");
  }
}

std::vector<std::vector<double>> ensemble_values(const RateChannels& ch, const Flow& flow, double horizon,
                                                 const std::vector<PhaseState>& starts, const StateFunction& f,
                                                 const std::vector<double>& t_grid, std::uint64_t base,
                                                 unsigned threads) {
  std::vector<std::vector<double>> values(starts.size());
  const double t_max = t_grid.back();
  parallel_for(starts.size(), threads, [&](std::size_t m) {
    RandomStream rs(base, m);
    PhaseState z0 = starts[m];
    z0.t = 0.0;
    std::vector<double>& row = values[m];
    row.resize(t_grid.size());
    if (t_max > 0.0) {
      RunOptions opt;
      opt.horizon = horizon;
      const EventSkeleton sk = run_pdmp(z0, ch, flow, t_max, rs, opt);
      for (std::size_t g = 0; g < t_grid.size(); ++g) row[g] = f(state_at(sk, flow, t_grid[g]));
    } else {
      row[0] = f(z0);
    }
  });
  return values;
}

}  // namespace

DecayFit decay_rate_fit(const DecayProblem& problem, const StateFunction& f, std::size_t ensemble_size,
                        const std::vector<double>& t_grid, RandomSource& rng, const DecayOptions& options) {
  if (problem.channels == nullptr || !problem.stationary_draw)
    throw InvalidArgument("decay problem needs channels and a stationary draw");
  if (ensemble_size < 1000) throw InvalidArgument("decay fit needs an ensemble of at least 1000", "study.ensemble");
  check_grid(t_grid);
  std::vector<PhaseState> starts(ensemble_size);
  for (auto& z : starts) z = problem.stationary_draw(rng);
  const std::uint64_t base = rng();
  return fit_decay(ensemble_values(*problem.channels, problem.flow, problem.horizon, starts, f, t_grid, base,
                                   options.threads),
                   t_grid, options.fit_from);
}

DecayFit decay_rate_fit(const SamplerAssembly& sampler, const StateFunction& f, std::size_t ensemble_size,
                        const std::vector<double>& t_grid, RandomSource& rng, const DecayOptions& options) {
  if (ensemble_size < 1000) throw InvalidArgument("decay fit needs an ensemble of at least 1000", "study.ensemble");
  check_grid(t_grid);
  const std::vector<PhaseState> starts = resample_stationary(sampler, ensemble_size, 4 * ensemble_size, rng);
  const std::uint64_t base = rng();
  return fit_decay(ensemble_values(*sampler.channels, sampler.flow, sampler.horizon, starts, f, t_grid, base,
                                   options.threads),
                   t_grid, options.fit_from);
}

double drift_operator(const TargetPotential& target, const SpectralBasis& basis, std::span<const double> x,
                      double h) {
  const std::size_t n = basis.n_modes();
  const auto sig = basis.eigenvalues();
  CoeffVector g = target.grad(x);
  CoeffVector xp(x.begin(), x.end());
  CoeffVector gp(n), gm(n);
  double trace = 0.0;
  for (std::size_t i = 0; i < std::min(n, target.active_modes); ++i) {
    const double xi = xp[i];
    xp[i] = xi + h;
    target.gradient(xp, gp);
    xp[i] = xi - h;
    target.gradient(xp, gm);
    xp[i] = xi;
    trace += sig[i] * (gp[i] - gm[i]) / (2.0 * h);
  }
  return trace - kernels::dot(x, g) - kernels::weighted_sum_sq(sig, g);
}

DriftCheck drift_condition_check(const TargetPotential& target, const SpectralBasis& basis, double c1, double c2,
                                 std::size_t n_probes, RandomSource& rng) {
  if (target.n_modes != basis.n_modes()) throw InvalidArgument("target and basis truncations differ");
  if (n_probes == 0) throw InvalidArgument("drift check needs at least one probe", "study.probes");
  const GaussianMeasure pi0(basis, 1.0);
  const CoeffVector zero(basis.n_modes(), 0.0);
  const double phi0 = target.value(zero);
  DriftCheck out;
  out.worst_margin = -std::numeric_limits<double>::infinity();
  out.worst_convexity_gap = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n_probes; ++p) {
    const CoeffVector x = pi0.sample(rng);
    const CoeffVector g = target.grad(x);
    const double m = drift_operator(target, basis, x) + c1 * kernels::weighted_sum_sq(basis.eigenvalues(), g) - c2;
    out.worst_margin = std::max(out.worst_margin, m);
    out.worst_convexity_gap = std::min(out.worst_convexity_gap, kernels::dot(g, x) - (target.value(x) - phi0));
  }
  out.satisfied = out.worst_margin <= 0.0;
  return out;
}

MuDivergence mu_divergence(const SpectralBasis& basis, bool quadratic_case, std::size_t n_trunc) {
  if (!quadratic_case)
    throw InvalidArgument("the product formula only holds for the quadratic potential", "study.quadratic");
  if (n_trunc > basis.n_modes()) throw InvalidArgument("truncation beyond the available modes", "study.n_trunc");
  double log_sum = 0.0;
  double quartic = 0.0;
  // Smallest terms first.
  for (std::size_t i = basis.n_modes(); i-- > n_trunc;) {
    const double g = basis.eigenvalue(i);
    // log((1+g)/sqrt(1+2g)) = log1p(g^2/(1+2g)) / 2 without cancellation.
    log_sum += 0.5 * std::log1p(g * g / (1.0 + 2.0 * g));
    quartic += g * g;
  }
  return MuDivergence{std::expm1(log_sum), 0.5 * quartic};
}

}  // namespace pdmp
