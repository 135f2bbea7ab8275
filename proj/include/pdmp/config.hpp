#pragma once
// Experiment configuration: a sectioned key=value text format.
//
//   [basis]   kind n_modes s T eigenvalues
//   [target]  name drift theta alpha scale quad_points
//   [sampler] algorithm rate_mode refresh_rate zz_velocities zz_tuning_r bps_zeta
//             approx_level extra_rate extra_value gradient_reflection horizon
//   [run]     t_end seed chains max_events init
//   [study]   type functions function samples nested batches ensemble t_grid
//             fit_from levels t_horizon band_height tuning_r
//
// '#' starts a comment. Lists are comma separated. Unknown sections or keys
// are errors naming the key path ("basis.s", "study.levels").

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pdmp/samplers.hpp"
#include "pdmp/spectral.hpp"
#include "pdmp/targets.hpp"

namespace pdmp {

struct BasisConfig {
  /// power_law | brownian_bridge | wiener | custom
  std::string kind = "power_law";
  std::size_t n_modes = 8;
  double s = 2.0;
  double T = 1.0;
  std::vector<double> eigenvalues;
  bool operator==(const BasisConfig&) const = default;
};

struct TargetConfig {
  /// zero | quadratic | bridge
  std::string name = "quadratic";
  std::string drift = "linear";
  /// Drift parameters actually given (theta, alpha, scale).
  std::map<std::string, double> drift_params;
  std::size_t quad_points = kDefaultBridgeQuadPoints;
  bool operator==(const TargetConfig&) const = default;
};

struct SamplerConfig {
  std::string algorithm = "boomerang";
  std::string rate_mode = "canonical";
  double refresh_rate = 1.0;
  /// Empty: tuned speeds gamma_i^{3-2r} with r = zz_tuning_r.
  std::vector<double> zz_velocities;
  double zz_tuning_r = 0.0;
  double bps_zeta = kDefaultBpsZeta;
  /// 0 means the full truncation.
  std::size_t approx_level = 0;
  /// none | constant | speed
  std::string extra_rate = "none";
  double extra_value = 0.0;
  bool gradient_reflection = false;
  double horizon = kDefaultHorizon;
  bool operator==(const SamplerConfig&) const = default;
};

struct RunConfig {
  double t_end = 10.0;
  std::uint64_t seed = 1;
  std::size_t chains = 1;
  std::size_t max_events = kDefaultMaxEvents;
  /// reference (mu_0 draw) | stationary (importance resampled) | zero
  std::string init = "reference";
  bool operator==(const RunConfig&) const = default;
};

struct StudyConfig {
  /// run | invariance | variance | decay | approx | tuning
  std::string type = "run";
  std::vector<std::string> functions;
  std::string function = "x2:1";
  std::size_t samples = 100000;
  std::size_t nested = 16;
  std::size_t batches = 100;
  std::size_t ensemble = 10000;
  std::vector<double> t_grid;
  double fit_from = 0.0;
  std::vector<std::size_t> levels;
  double t_horizon = 5.0;
  double band_height = 1.0;
  double tuning_r = 0.0;
  bool operator==(const StudyConfig&) const = default;
};

struct ExperimentConfig {
  BasisConfig basis;
  TargetConfig target;
  SamplerConfig sampler;
  RunConfig run;
  StudyConfig study;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws InvalidArgument with the offending key path.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text; parse_config_string(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Semantic checks that need no heavy construction (study keys, enums).
void validate_config(const ExperimentConfig& config);

SpectralBasis build_basis(const ExperimentConfig& config);
TargetPotential build_target(const ExperimentConfig& config, const SpectralBasis& basis);
SamplerSpec build_sampler_spec(const ExperimentConfig& config);

}  // namespace pdmp
