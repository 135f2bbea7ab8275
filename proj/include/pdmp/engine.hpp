#pragma once
// Generic PDMP engine: deterministic flows, event times by thinning against
// per-window constant majorants, jumps, and skeleton recording.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pdmp/rng.hpp"
#include "pdmp/spectral.hpp"

namespace pdmp {

struct PhaseState {
  CoeffVector x;
  CoeffVector v;
  double t = 0.0;

  std::size_t size() const noexcept { return x.size(); }
  /// sum_i x_i^2 + v_i^2
  double energy() const;
};

enum class FlowKind { Linear, Rotation };

/// Linear: x <- x + t v. Rotation: each mode turns at angular rate omega_i.
/// Modes at index >= n_active are frozen in both cases.
struct Flow {
  FlowKind kind = FlowKind::Linear;
  std::size_t n_modes = 0;
  std::size_t n_active = 0;
  /// Rotation only. Zero entries are frozen modes.
  std::vector<double> omega;
  bool unit_omega = false;
  double max_omega = 0.0;

  static Flow linear(std::size_t n_modes, std::optional<std::size_t> n_active = std::nullopt);
  /// Unit-speed rotation on modes < n_active.
  static Flow rotation_unit(std::size_t n_modes, std::optional<std::size_t> n_active = std::nullopt);
  static Flow rotation(std::vector<double> omega);
};

void flow_advance(PhaseState& z, double dt, const Flow& flow);
PhaseState flow_advanced(PhaseState z, double dt, const Flow& flow);

/// A bank of rate channels sharing one state evaluation.
class RateChannels {
 public:
  virtual ~RateChannels() = default;
  virtual std::size_t size() const = 0;
  /// Intensities at z.
  virtual void rates(const PhaseState& z, std::span<double> out) const = 0;
  /// Majorants valid along the flow from z over [0, horizon].
  virtual void bounds(const PhaseState& z, double horizon, std::span<double> out) const = 0;
  /// Apply the jump kernel of channel c in place.
  virtual void jump(std::size_t c, PhaseState& z, RandomSource& rng) const = 0;
  /// True when the jump consumes randomness.
  virtual bool stochastic(std::size_t c) const = 0;
  /// Stable identifier used to key coupled randomness and to label events.
  virtual std::uint64_t channel_key(std::size_t c) const { return c; }
};

/// Ad-hoc channel built from closures (tests, custom models).
struct Channel {
  std::function<double(const PhaseState&)> rate;
  std::function<double(const PhaseState&, double)> bound;
  std::function<void(PhaseState&, RandomSource&)> jump;
  bool stochastic = false;
  std::uint64_t key = 0;
};

class ChannelList final : public RateChannels {
 public:
  ChannelList() = default;
  explicit ChannelList(std::vector<Channel> channels) : channels_(std::move(channels)) {}
  void add(Channel c) { channels_.push_back(std::move(c)); }

  std::size_t size() const override { return channels_.size(); }
  void rates(const PhaseState& z, std::span<double> out) const override;
  void bounds(const PhaseState& z, double horizon, std::span<double> out) const override;
  void jump(std::size_t c, PhaseState& z, RandomSource& rng) const override;
  bool stochastic(std::size_t c) const override { return channels_.at(c).stochastic; }
  std::uint64_t channel_key(std::size_t c) const override { return channels_.at(c).key; }

 private:
  std::vector<Channel> channels_;
};

/// Rate of every channel after flowing dt from z.
std::vector<double> rates_along(const RateChannels& channels, const PhaseState& z, double dt, const Flow& flow);

struct Event {
  double t;
  std::uint64_t channel;
  PhaseState after;
};

struct EventSkeleton {
  PhaseState initial;
  std::vector<Event> events;
  double t_end = 0.0;
  /// State at t_end; kept even when events are not recorded.
  PhaseState final_state;
  std::size_t event_count = 0;
};

/// State at time t in [0, t_end], reconstructed from the recorded events.
PhaseState state_at(const EventSkeleton& skeleton, const Flow& flow, double t);

struct EngineStats {
  std::size_t windows = 0;
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  /// Integral of the total majorant over simulated time.
  double bound_mass = 0.0;
  /// Sum of sum_c rate_c / sum_c bound_c over candidates.
  double ratio_sum = 0.0;
  /// Largest per-window total majorant; a proxy for rate mass carried by the truncation.
  double max_window_bound = 0.0;

  double acceptance_rate() const { return candidates ? static_cast<double>(accepted) / candidates : 0.0; }
  double mean_ratio() const { return candidates ? ratio_sum / static_cast<double>(candidates) : 0.0; }
  void merge(const EngineStats& o);
};

inline constexpr double kDefaultHorizon = 1.0;
inline constexpr std::size_t kDefaultMaxEvents = 10'000'000;
/// Relative slack allowed when checking rates against majorants.
inline constexpr double kBoundSlack = 1e-9;

struct RunOptions {
  double horizon = kDefaultHorizon;
  std::size_t max_events = kDefaultMaxEvents;
  bool record = true;
  EngineStats* stats = nullptr;
};

struct ThinnedEvent {
  /// nullopt means no event within the horizon.
  std::optional<double> dt;
  std::size_t channel = 0;
};

/// First arrival of the superposed channel intensities within [0, horizon).
ThinnedEvent first_event_thinned(const PhaseState& z, const RateChannels& channels, const Flow& flow,
                                 double horizon, RandomSource& rng, EngineStats* stats = nullptr);

EventSkeleton run_pdmp(const PhaseState& initial, const RateChannels& channels, const Flow& flow, double t_end,
                       RandomSource& rng, const RunOptions& options = {});

struct CoupledOptions {
  /// Window width; windows are aligned to absolute multiples of it.
  double horizon = kDefaultHorizon;
  /// Height of one band of the Poisson field.
  double band_height = 1.0;
  std::size_t max_events = kDefaultMaxEvents;
  bool record = false;
  EngineStats* stats = nullptr;
};

/// Run driven by a keyed unit-rate Poisson field on (time, height) per
/// channel key. Two runs with the same member key consume identical candidate
/// points and jump randomness wherever their channel keys coincide.
EventSkeleton run_pdmp_coupled(const PhaseState& initial, const RateChannels& channels, const Flow& flow,
                               double t_end, std::uint64_t member_key, const CoupledOptions& options = {});

inline constexpr std::size_t kDefaultArcNodes = 8;

using StateFunction = std::function<double(const PhaseState&)>;

/// (1 / t_end) * integral over [0, t_end] of f along the trajectory.
double arc_integrate(const EventSkeleton& skeleton, const Flow& flow, const StateFunction& f,
                     std::size_t quad_points = kDefaultArcNodes);

/// Integrals of f over consecutive intervals [edges_k, edges_{k+1}].
std::vector<double> interval_integrals(const EventSkeleton& skeleton, const Flow& flow, const StateFunction& f,
                                       std::span<const double> edges, std::size_t quad_points = kDefaultArcNodes);

}  // namespace pdmp
