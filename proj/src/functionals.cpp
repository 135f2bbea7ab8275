#include "pdmp/functionals.hpp"

#include <charconv>
#include <cmath>

#include "pdmp/errors.hpp"
#include "pdmp/targets.hpp"

namespace pdmp {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

[[noreturn]] void bad(const std::string& name, const std::string& why) {
  throw InvalidArgument("functional '" + name + "': " + why, "study.functions");
}

std::size_t index_arg(const std::string& name, const std::string& tok, std::size_t n) {
  std::size_t i = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), i);
  if (ec != std::errc() || p != tok.data() + tok.size()) bad(name, "bad index '" + tok + "'");
  if (i < 1 || i > n) bad(name, "index " + tok + " outside 1.." + std::to_string(n));
  return i - 1;
}

double real_arg(const std::string& name, const std::string& tok) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) bad(name, "bad number '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    bad(name, "bad number '" + tok + "'");
  }
}

}  // namespace

Functional make_functional(const std::string& name, const SpectralBasis& basis) {
  const auto parts = split(name, ':');
  const std::string& head = parts[0];
  const std::size_t n = basis.n_modes();
  auto nargs = [&](std::size_t k) {
    if (parts.size() != k + 1) bad(name, "expects " + std::to_string(k) + " argument(s)");
  };
  Functional f;
  f.name = name;

  if (head == "x" || head == "x2" || head == "v" || head == "v2" || head == "cosx") {
    nargs(1);
    const std::size_t i = index_arg(name, parts[1], n);
    if (head == "x") {
      f.value = [i](const PhaseState& z) { return z.x[i]; };
      f.gradient = [i](const PhaseState&, std::span<double> gx, std::span<double>) { gx[i] += 1.0; };
      f.position_only = true;
    } else if (head == "x2") {
      f.value = [i](const PhaseState& z) { return z.x[i] * z.x[i]; };
      f.gradient = [i](const PhaseState& z, std::span<double> gx, std::span<double>) { gx[i] += 2.0 * z.x[i]; };
      f.position_only = true;
    } else if (head == "v") {
      f.value = [i](const PhaseState& z) { return z.v[i]; };
      f.gradient = [i](const PhaseState&, std::span<double>, std::span<double> gv) { gv[i] += 1.0; };
    } else if (head == "v2") {
      f.value = [i](const PhaseState& z) { return z.v[i] * z.v[i]; };
      f.gradient = [i](const PhaseState& z, std::span<double>, std::span<double> gv) { gv[i] += 2.0 * z.v[i]; };
    } else {
      f.value = [i](const PhaseState& z) { return std::cos(z.x[i]); };
      f.gradient = [i](const PhaseState& z, std::span<double> gx, std::span<double>) { gx[i] -= std::sin(z.x[i]); };
      f.position_only = true;
    }
  } else if (head == "xv" || head == "xx" || head == "cosxv") {
    nargs(2);
    const std::size_t i = index_arg(name, parts[1], n);
    const std::size_t j = index_arg(name, parts[2], n);
    if (head == "xv") {
      f.value = [i, j](const PhaseState& z) { return z.x[i] * z.v[j]; };
      f.gradient = [i, j](const PhaseState& z, std::span<double> gx, std::span<double> gv) {
        gx[i] += z.v[j];
        gv[j] += z.x[i];
      };
    } else if (head == "xx") {
      f.value = [i, j](const PhaseState& z) { return z.x[i] * z.x[j]; };
      f.gradient = [i, j](const PhaseState& z, std::span<double> gx, std::span<double>) {
        gx[i] += z.x[j];
        gx[j] += z.x[i];
      };
      f.position_only = true;
    } else {
      f.value = [i, j](const PhaseState& z) { return std::cos(z.x[i] + z.v[j]); };
      f.gradient = [i, j](const PhaseState& z, std::span<double> gx, std::span<double> gv) {
        const double s = std::sin(z.x[i] + z.v[j]);
        gx[i] -= s;
        gv[j] -= s;
      };
    }
  } else if (head == "sum_cos") {
    nargs(0);
    f.value = [](const PhaseState& z) {
      double s = 0.0;
      for (double xi : z.x) s += xi;
      return std::cos(s);
    };
    f.gradient = [](const PhaseState& z, std::span<double> gx, std::span<double>) {
      double s = 0.0;
      for (double xi : z.x) s += xi;
      const double d = -std::sin(s);
      for (double& g : gx) g += d;
    };
    f.position_only = true;
  } else if (head == "normr") {
    nargs(0);
    f.value = [](const PhaseState& z) { return z.energy(); };
    f.gradient = [](const PhaseState& z, std::span<double> gx, std::span<double> gv) {
      for (std::size_t i = 0; i < z.size(); ++i) {
        gx[i] += 2.0 * z.x[i];
        gv[i] += 2.0 * z.v[i];
      }
    };
  } else if (head == "bridge_point" || head == "bridge_point2") {
    nargs(1);
    if (basis.kind() != BasisKind::BrownianBridge) bad(name, "needs a Brownian bridge basis");
    const double t = real_arg(name, parts[1]);
    if (!(t >= 0.0 && t <= basis.parameter())) bad(name, "time outside [0, T]");
    std::vector<double> e(n);
    for (std::size_t k = 0; k < n; ++k) e[k] = basis.bridge_mode(k + 1, t);
    const bool squared = head == "bridge_point2";
    auto path = [e](const PhaseState& z) {
      double acc = 0.0;
      for (std::size_t k = 0; k < e.size(); ++k) acc += e[k] * z.x[k];
      return acc;
    };
    f.value = [path, squared](const PhaseState& z) {
      const double y = path(z);
      return squared ? y * y : y;
    };
    f.gradient = [e, path, squared](const PhaseState& z, std::span<double> gx, std::span<double>) {
      const double scale = squared ? 2.0 * path(z) : 1.0;
      for (std::size_t k = 0; k < e.size(); ++k) gx[k] += scale * e[k];
    };
    f.position_only = true;
  } else if (head == "const") {
    nargs(1);
    const double c = real_arg(name, parts[1]);
    f.value = [c](const PhaseState&) { return c; };
    f.gradient = [](const PhaseState&, std::span<double>, std::span<double>) {};
    f.position_only = true;
  } else {
    bad(name, "unknown functional");
  }
  return f;
}

std::vector<Functional> make_functionals(const std::vector<std::string>& names, const SpectralBasis& basis) {
  std::vector<Functional> out;
  out.reserve(names.size());
  for (const auto& nm : names) out.push_back(make_functional(nm, basis));
  return out;
}

std::vector<std::string> default_battery() {
  return {"x:1", "x2:1", "xx:1:2", "xv:1:1", "xv:1:2", "v2:1", "cosx:1", "cosxv:1:2"};
}

}  // namespace pdmp
