#include "pdmp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pdmp/errors.hpp"
#include "pdmp/kernels.hpp"
#include "pdmp/quadrature.hpp"

namespace pdmp {

double PhaseState::energy() const { return kernels::sum_sq(x) + kernels::sum_sq(v); }

Flow Flow::linear(std::size_t n_modes, std::optional<std::size_t> n_active) {
  Flow f;
  f.kind = FlowKind::Linear;
  f.n_modes = n_modes;
  f.n_active = std::min(n_active.value_or(n_modes), n_modes);
  return f;
}

Flow Flow::rotation_unit(std::size_t n_modes, std::optional<std::size_t> n_active) {
  Flow f;
  f.kind = FlowKind::Rotation;
  f.n_modes = n_modes;
  f.n_active = std::min(n_active.value_or(n_modes), n_modes);
  f.omega.assign(n_modes, 0.0);
  std::fill(f.omega.begin(), f.omega.begin() + static_cast<std::ptrdiff_t>(f.n_active), 1.0);
  f.unit_omega = true;
  f.max_omega = f.n_active > 0 ? 1.0 : 0.0;
  return f;
}

Flow Flow::rotation(std::vector<double> omega) {
  Flow f;
  f.kind = FlowKind::Rotation;
  f.n_modes = omega.size();
  for (double w : omega)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("angular rates must be finite and non-negative");
  // Active modes are the leading block of nonzero rates.
  f.n_active = 0;
  for (std::size_t i = 0; i < omega.size(); ++i)
    if (omega[i] > 0.0) f.n_active = i + 1;
  f.max_omega = omega.empty() ? 0.0 : *std::max_element(omega.begin(), omega.end());
  f.unit_omega = std::all_of(omega.begin(), omega.begin() + static_cast<std::ptrdiff_t>(f.n_active),
                             [](double w) { return w == 1.0; });
  f.omega = std::move(omega);
  return f;
}

void flow_advance(PhaseState& z, double dt, const Flow& flow) {
  if (dt == 0.0) return;
  const std::size_t n = flow.n_active;
  if (flow.kind == FlowKind::Linear) {
    kernels::axpy(dt, std::span<const double>(z.v.data(), n), std::span<double>(z.x.data(), n));
  } else if (flow.unit_omega) {
    kernels::rotate_uniform(std::span<double>(z.x.data(), n), std::span<double>(z.v.data(), n), std::cos(dt),
                            std::sin(dt));
  } else {
    thread_local std::vector<double> c, s;
    c.resize(n);
    s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = std::cos(flow.omega[i] * dt);
      s[i] = std::sin(flow.omega[i] * dt);
    }
    kernels::rotate_modes(std::span<double>(z.x.data(), n), std::span<double>(z.v.data(), n), c, s);
  }
  z.t += dt;
}

PhaseState flow_advanced(PhaseState z, double dt, const Flow& flow) {
  flow_advance(z, dt, flow);
  return z;
}

namespace {

void copy_state(const PhaseState& src, PhaseState& dst) {
  dst.x.assign(src.x.begin(), src.x.end());
  dst.v.assign(src.v.begin(), src.v.end());
  dst.t = src.t;
}

// Advance to absolute time target, pinning the clock to avoid drift.
void flow_to(PhaseState& z, double target, const Flow& flow) {
  flow_advance(z, target - z.t, flow);
  z.t = target;
}

void check_bounds(std::span<const double> rates, std::span<const double> bounds) {
  for (std::size_t c = 0; c < rates.size(); ++c)
    if (rates[c] > bounds[c] * (1.0 + kBoundSlack) || !(rates[c] >= 0.0))
      throw ChannelBoundViolated(c, rates[c], bounds[c]);
}

double total(std::span<const double> a) {
  double acc = 0.0;
  for (double x : a) acc += x;
  return acc;
}

struct Scratch {
  std::vector<double> bounds;
  std::vector<double> rates;
  explicit Scratch(std::size_t n) : bounds(n), rates(n) {}
};

// Thinning within one window of length h from z. Leaves z at the accepted
// event time (before the jump) or at the end of the window.
bool thin_window(PhaseState& z, const RateChannels& ch, const Flow& flow, double h, RandomSource& rng,
                 EngineStats* stats, Scratch& sc, std::size_t& chosen) {
  const double t0 = z.t;
  ch.bounds(z, h, sc.bounds);
  for (double b : sc.bounds)
    if (!(b >= 0.0) || std::isnan(b)) throw InvalidArgument("channel majorant must be non-negative");
  const double lam_bar = total(sc.bounds);
  if (stats) {
    ++stats->windows;
    stats->max_window_bound = std::max(stats->max_window_bound, lam_bar);
  }
  if (!(lam_bar > 0.0)) {
    if (std::isfinite(h)) flow_to(z, t0 + h, flow);
    return false;
  }
  if (!std::isfinite(lam_bar)) throw InvalidArgument("channel majorant is not finite over the horizon");
  double s = 0.0;
  for (;;) {
    s += rng.exponential(lam_bar);
    if (s >= h) {
      flow_to(z, t0 + h, flow);
      if (stats) stats->bound_mass += lam_bar * h;
      return false;
    }
    flow_to(z, t0 + s, flow);
    ch.rates(z, sc.rates);
    check_bounds(sc.rates, sc.bounds);
    const double lam = total(sc.rates);
    const double u = rng.uniform() * lam_bar;
    if (stats) {
      ++stats->candidates;
      stats->ratio_sum += lam / lam_bar;
    }
    if (u < lam) {
      double cum = 0.0;
      chosen = sc.rates.size() - 1;
      for (std::size_t c = 0; c < sc.rates.size(); ++c) {
        cum += sc.rates[c];
        if (u < cum) {
          chosen = c;
          break;
        }
      }
      // Guard against a rounding overshoot landing on a zero-rate tail channel.
      while (sc.rates[chosen] == 0.0 && chosen > 0) --chosen;
      if (stats) {
        ++stats->accepted;
        stats->bound_mass += lam_bar * s;
      }
      return true;
    }
  }
}

void validate_initial(const PhaseState& z, const Flow& flow) {
  if (z.x.size() != z.v.size()) throw InvalidArgument("position and velocity lengths differ");
  if (z.x.size() != flow.n_modes) throw InvalidArgument("state length does not match the flow");
}

}  // namespace

void ChannelList::rates(const PhaseState& z, std::span<double> out) const {
  for (std::size_t c = 0; c < channels_.size(); ++c) out[c] = channels_[c].rate(z);
}

void ChannelList::bounds(const PhaseState& z, double horizon, std::span<double> out) const {
  for (std::size_t c = 0; c < channels_.size(); ++c) out[c] = channels_[c].bound(z, horizon);
}

void ChannelList::jump(std::size_t c, PhaseState& z, RandomSource& rng) const {
  if (channels_.at(c).jump) channels_[c].jump(z, rng);
}

std::vector<double> rates_along(const RateChannels& channels, const PhaseState& z, double dt, const Flow& flow) {
  std::vector<double> out(channels.size());
  channels.rates(flow_advanced(z, dt, flow), out);
  return out;
}

void EngineStats::merge(const EngineStats& o) {
  windows += o.windows;
  candidates += o.candidates;
  accepted += o.accepted;
  bound_mass += o.bound_mass;
  ratio_sum += o.ratio_sum;
  max_window_bound = std::max(max_window_bound, o.max_window_bound);
}

ThinnedEvent first_event_thinned(const PhaseState& z, const RateChannels& channels, const Flow& flow,
                                 double horizon, RandomSource& rng, EngineStats* stats) {
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  PhaseState w = z;
  Scratch sc(channels.size());
  std::size_t chosen = 0;
  ThinnedEvent out;
  if (thin_window(w, channels, flow, horizon, rng, stats, sc, chosen)) {
    out.dt = w.t - z.t;
    out.channel = chosen;
  }
  return out;
}

EventSkeleton run_pdmp(const PhaseState& initial, const RateChannels& channels, const Flow& flow, double t_end,
                       RandomSource& rng, const RunOptions& options) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive and finite", "run.t_end");
  if (!(options.horizon > 0.0)) throw InvalidArgument("horizon must be positive", "sampler.horizon");
  validate_initial(initial, flow);
  EventSkeleton sk;
  sk.initial = initial;
  sk.t_end = t_end;
  PhaseState z = initial;
  Scratch sc(channels.size());
  while (z.t < t_end) {
    const double h = std::min(options.horizon, t_end - z.t);
    std::size_t c = 0;
    if (!thin_window(z, channels, flow, h, rng, options.stats, sc, c)) continue;
    channels.jump(c, z, rng);
    if (++sk.event_count > options.max_events) throw ExplosionSuspected(sk.event_count, z.t);
    if (options.record) sk.events.push_back(Event{z.t, channels.channel_key(c), z});
  }
  z.t = t_end;
  sk.final_state = std::move(z);
  return sk;
}

namespace {

struct FieldPoint {
  double time;
  double height;
  std::uint32_t band;
  std::uint32_t index;
};

// Lazily generated Poisson points of one channel within one window.
struct ChannelField {
  std::uint32_t bands = 0;
  std::vector<FieldPoint> points;  // sorted by time
  std::size_t cursor = 0;

  void reset() {
    bands = 0;
    points.clear();
    cursor = 0;
  }
};

constexpr std::uint64_t kFieldTag = 0x6669656c64ULL;
constexpr std::uint64_t kJumpTag = 0x6a756d70ULL;

void extend_field(ChannelField& f, std::uint32_t bands_needed, std::uint64_t member, std::uint64_t window,
                  std::uint64_t key, double w_start, double h, double band_height) {
  if (bands_needed <= f.bands) return;
  const std::size_t old = f.points.size();
  for (std::uint32_t b = f.bands; b < bands_needed; ++b) {
    CounterStream rs{member, window, key, b, kFieldTag};
    std::poisson_distribution<std::uint32_t> count(h * band_height);
    const std::uint32_t n = count(rs);
    for (std::uint32_t j = 0; j < n; ++j) {
      const double t = w_start + h * rs.uniform();
      const double y = band_height * (static_cast<double>(b) + rs.uniform());
      f.points.push_back(FieldPoint{t, y, b, j});
    }
  }
  f.bands = bands_needed;
  auto by_time = [](const FieldPoint& a, const FieldPoint& b) { return a.time < b.time; };
  std::sort(f.points.begin() + static_cast<std::ptrdiff_t>(old), f.points.end(), by_time);
  std::inplace_merge(f.points.begin(), f.points.begin() + static_cast<std::ptrdiff_t>(old), f.points.end(), by_time);
  // Earlier points were already passed; keep the cursor at the first point after it.
  f.cursor = 0;
}

}  // namespace

EventSkeleton run_pdmp_coupled(const PhaseState& initial, const RateChannels& channels, const Flow& flow,
                               double t_end, std::uint64_t member_key, const CoupledOptions& options) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive and finite", "run.t_end");
  if (!(options.horizon > 0.0) || !std::isfinite(options.horizon))
    throw InvalidArgument("coupled horizon must be positive and finite");
  if (!(options.band_height > 0.0)) throw InvalidArgument("band height must be positive");
  validate_initial(initial, flow);

  const double h = options.horizon;
  const double H = options.band_height;
  const std::size_t nc = channels.size();
  EventSkeleton sk;
  sk.initial = initial;
  sk.t_end = t_end;
  PhaseState z = initial;
  Scratch sc(nc);
  std::vector<ChannelField> fields(nc);
  std::vector<std::uint64_t> keys(nc);
  for (std::size_t c = 0; c < nc; ++c) keys[c] = channels.channel_key(c);
  EngineStats* stats = options.stats;

  auto window = static_cast<std::uint64_t>(std::floor(z.t / h));
  while (z.t < t_end) {
    const double w_start = static_cast<double>(window) * h;
    const double w_end = std::min(w_start + h, t_end);
    for (auto& f : fields) f.reset();
    bool need_bounds = true;
    for (;;) {
      if (need_bounds) {
        channels.bounds(z, w_end - z.t, sc.bounds);
        if (stats) {
          ++stats->windows;
          stats->max_window_bound = std::max(stats->max_window_bound, total(sc.bounds));
        }
        need_bounds = false;
      }
      // Earliest field point after z.t lying under some channel's majorant.
      double best_t = std::numeric_limits<double>::infinity();
      std::size_t best_c = nc;
      const FieldPoint* best_p = nullptr;
      for (std::size_t c = 0; c < nc; ++c) {
        const double b = sc.bounds[c];
        if (!(b > 0.0)) continue;
        if (!std::isfinite(b)) throw InvalidArgument("channel majorant is not finite over the horizon");
        ChannelField& f = fields[c];
        extend_field(f, static_cast<std::uint32_t>(std::floor(b / H)) + 1, member_key, window, keys[c], w_start, h,
                     H);
        while (f.cursor < f.points.size() && f.points[f.cursor].time <= z.t) ++f.cursor;
        for (std::size_t j = f.cursor; j < f.points.size(); ++j) {
          const FieldPoint& p = f.points[j];
          if (p.time >= best_t || p.time >= w_end) break;
          if (p.height < b) {
            best_t = p.time;
            best_c = c;
            best_p = &p;
            break;
          }
        }
      }
      if (best_p == nullptr) {
        if (stats) stats->bound_mass += total(sc.bounds) * (w_end - z.t);
        flow_to(z, w_end, flow);
        break;
      }
      if (stats) stats->bound_mass += total(sc.bounds) * (best_t - z.t);
      flow_to(z, best_t, flow);
      channels.rates(z, sc.rates);
      check_bounds(sc.rates, sc.bounds);
      if (stats) {
        ++stats->candidates;
        stats->ratio_sum += sc.rates[best_c] / sc.bounds[best_c];
      }
      if (best_p->height < sc.rates[best_c]) {
        CounterStream js{member_key, window, keys[best_c], best_p->band, best_p->index, kJumpTag};
        channels.jump(best_c, z, js);
        if (stats) ++stats->accepted;
        if (++sk.event_count > options.max_events) throw ExplosionSuspected(sk.event_count, z.t);
        if (options.record) sk.events.push_back(Event{z.t, keys[best_c], z});
        need_bounds = true;
      }
    }
    ++window;
  }
  z.t = t_end;
  sk.final_state = std::move(z);
  return sk;
}

PhaseState state_at(const EventSkeleton& skeleton, const Flow& flow, double t) {
  if (t < skeleton.initial.t || t > skeleton.t_end) throw InvalidArgument("state_at: time outside the trajectory");
  auto it = std::upper_bound(skeleton.events.begin(), skeleton.events.end(), t,
                             [](double tt, const Event& e) { return tt < e.t; });
  PhaseState z = it == skeleton.events.begin() ? skeleton.initial : std::prev(it)->after;
  flow_to(z, t, flow);
  return z;
}

std::vector<double> interval_integrals(const EventSkeleton& skeleton, const Flow& flow, const StateFunction& f,
                                       std::span<const double> edges, std::size_t quad_points) {
  if (edges.size() < 2) return {};
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k] >= edges[k - 1])) throw InvalidArgument("interval edges must be non-decreasing");
  const GaussLegendre& gl = gauss_legendre(quad_points);
  const double panel =
      flow.kind == FlowKind::Rotation && flow.max_omega > 0.0 ? 2.0 * std::numbers::pi / flow.max_omega
                                                              : 2.0 * std::numbers::pi;
  std::vector<double> out(edges.size() - 1, 0.0);
  PhaseState node;

  auto integrate_piece = [&](const PhaseState& start, double a, double b) {
    const double len = b - a;
    if (!(len > 0.0)) return 0.0;
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(len / panel)));
    const double pw = len / static_cast<double>(panels);
    double acc = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
      const double pa = a + pw * static_cast<double>(p);
      acc += gl.integrate(
          [&](double tau) {
            copy_state(start, node);
            flow_advance(node, tau - start.t, flow);
            node.t = tau;
            return f(node);
          },
          pa, pa + pw);
    }
    return acc;
  };

  const std::size_t n_arcs = skeleton.events.size() + 1;
  std::size_t k = 0;
  for (std::size_t arc = 0; arc < n_arcs && k + 1 < edges.size(); ++arc) {
    const PhaseState& start = arc == 0 ? skeleton.initial : skeleton.events[arc - 1].after;
    const double a0 = start.t;
    const double b0 = arc + 1 < n_arcs ? skeleton.events[arc].t : skeleton.t_end;
    while (k + 1 < edges.size()) {
      const double lo = std::max(a0, edges[k]);
      const double hi = std::min(b0, edges[k + 1]);
      if (hi > lo) out[k] += integrate_piece(start, lo, hi);
      if (edges[k + 1] <= b0) ++k;
      else break;
    }
  }
  return out;
}

double arc_integrate(const EventSkeleton& skeleton, const Flow& flow, const StateFunction& f,
                     std::size_t quad_points) {
  const double t0 = skeleton.initial.t;
  const double edges[] = {t0, skeleton.t_end};
  return interval_integrals(skeleton, flow, f, edges, quad_points)[0] / (skeleton.t_end - t0);
}

}  // namespace pdmp
