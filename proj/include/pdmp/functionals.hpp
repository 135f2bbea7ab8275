#pragma once
// Cylindrical test functions f(x, v) with analytic gradients, addressable by
// name from configuration files.
//
//   x:i  x2:i  v:i  v2:i  xv:i:j  xx:i:j  cosx:i  cosxv:i:j  sum_cos
//   normr  bridge_point:t  bridge_point2:t  const:c
//
// Indices are 1-based in names and 0-based in code.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pdmp/engine.hpp"
#include "pdmp/spectral.hpp"

namespace pdmp {

struct Functional {
  std::string name;
  std::function<double(const PhaseState&)> value;
  /// Accumulates d f / dx and d f / dv into gx and gv (must be zeroed by caller).
  std::function<void(const PhaseState&, std::span<double> gx, std::span<double> gv)> gradient;
  /// True when f does not depend on v.
  bool position_only = false;

  double operator()(const PhaseState& z) const { return value(z); }
};

/// Throws InvalidArgument (path "study.functions") on an unknown name or an
/// index outside the truncation.
Functional make_functional(const std::string& name, const SpectralBasis& basis);
std::vector<Functional> make_functionals(const std::vector<std::string>& names, const SpectralBasis& basis);

/// The standard eight-function battery on modes 1 and 2.
std::vector<std::string> default_battery();

}  // namespace pdmp
