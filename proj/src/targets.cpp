#include "pdmp/targets.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "pdmp/errors.hpp"
#include "pdmp/kernels.hpp"
#include "pdmp/quadrature.hpp"

namespace pdmp {

CoeffVector TargetPotential::grad(std::span<const double> x) const {
  CoeffVector out(n_modes);
  gradient(x, out);
  return out;
}

double TargetPotential::partial(std::span<const double> x, std::size_t i) const {
  if (i >= active_modes) return 0.0;
  return grad(x)[i];
}

TargetPotential zero_target(const SpectralBasis& basis) {
  TargetPotential t;
  t.name = "zero";
  t.n_modes = basis.n_modes();
  t.evaluate = [](std::span<const double>) { return 0.0; };
  t.gradient = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  t.hessian_bound = 0.0;
  t.lower_bound = 0.0;
  t.active_modes = 0;
  t.is_zero = true;
  return t;
}

TargetPotential quadratic_target(const SpectralBasis& basis) {
  TargetPotential t;
  t.name = "quadratic";
  t.n_modes = basis.n_modes();
  t.evaluate = [](std::span<const double> x) { return 0.5 * kernels::sum_sq(x); };
  t.gradient = [](std::span<const double> x, std::span<double> out) { std::copy(x.begin(), x.end(), out.begin()); };
  t.hessian_bound = 1.0;
  t.m0 = 0.0;
  t.m1 = 1.0;
  t.lower_bound = 0.0;
  t.active_modes = t.n_modes;
  return t;
}

TargetPotential projected_target(const TargetPotential& base, std::size_t n_keep) {
  if (n_keep < 1 || n_keep > base.n_modes)
    throw InvalidArgument("projection level must lie in [1, n_modes]", "sampler.approx_level");
  if (n_keep == base.n_modes) return base;
  TargetPotential t = base;
  t.name = base.name + "|proj" + std::to_string(n_keep);
  t.active_modes = std::min(base.active_modes, n_keep);
  const std::size_t n = base.n_modes;
  auto value = base.evaluate;
  auto gradient = base.gradient;
  t.evaluate = [value, n, n_keep](std::span<const double> x) {
    thread_local std::vector<double> buf;
    buf.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_keep));
    buf.resize(n, 0.0);
    return value(buf);
  };
  t.gradient = [gradient, n, n_keep](std::span<const double> x, std::span<double> out) {
    thread_local std::vector<double> buf;
    buf.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_keep));
    buf.resize(n, 0.0);
    gradient(buf, out);
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(n_keep), out.end(), 0.0);
  };
  return t;
}

TargetPotential custom_target(std::string name, std::size_t n_modes, TargetPotential::Value value,
                              TargetPotential::Gradient gradient, double m0, double m1, double hessian_bound,
                              double lower_bound) {
  if (!value || !gradient) throw InvalidArgument("custom target needs value and gradient");
  if (!(m0 >= 0.0) || !(m1 >= 0.0)) throw InvalidArgument("growth constants must be non-negative");
  TargetPotential t;
  t.name = std::move(name);
  t.n_modes = n_modes;
  t.evaluate = std::move(value);
  t.gradient = std::move(gradient);
  t.m0 = m0;
  t.m1 = m1;
  t.hessian_bound = hessian_bound;
  t.lower_bound = lower_bound;
  t.active_modes = n_modes;
  return t;
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& p, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw InvalidArgument("unknown drift parameter '" + k + "'", "target." + k);
  }
}

}  // namespace

BridgeDrift make_drift(const std::string& name, const std::map<std::string, double>& params) {
  BridgeDrift d;
  d.name = name;
  if (name == "zero") {
    reject_unknown(params, {});
    d.b = d.db = d.d2b = d.d3b = [](double) { return 0.0; };
    d.sup_b = d.sup_db = d.sup_d2b = d.sup_d3b = 0.0;
    d.dg_sup = 0.0;
  } else if (name == "linear") {
    reject_unknown(params, {"theta"});
    const double th = param(params, "theta", 1.0);
    d.b = [th](double y) { return -th * y; };
    d.db = [th](double) { return -th; };
    d.d2b = d.d3b = [](double) { return 0.0; };
    d.sup_db = std::abs(th);
    d.sup_d2b = d.sup_d3b = 0.0;
    d.g1 = th * th;
    d.dg_sup = th * th;
  } else if (name == "sine") {
    reject_unknown(params, {"alpha"});
    const double a = param(params, "alpha", 1.0);
    d.b = [a](double y) { return a * std::sin(y); };
    d.db = [a](double y) { return a * std::cos(y); };
    d.d2b = [a](double y) { return -a * std::sin(y); };
    d.d3b = [a](double y) { return -a * std::cos(y); };
    const double aa = std::abs(a);
    d.sup_b = d.sup_db = d.sup_d2b = d.sup_d3b = aa;
    d.g0 = 0.5 * aa + aa * aa;
    d.dg_sup = 0.5 * aa + 2.0 * aa * aa;
  } else if (name == "tanh") {
    reject_unknown(params, {"alpha", "scale"});
    const double a = param(params, "alpha", 1.0);
    const double s = param(params, "scale", 1.0);
    if (!(s > 0.0)) throw InvalidArgument("tanh drift scale must be positive", "target.scale");
    d.b = [a, s](double y) { return a * std::tanh(y / s); };
    d.db = [a, s](double y) {
      const double c = 1.0 / std::cosh(y / s);
      return a / s * c * c;
    };
    d.d2b = [a, s](double y) {
      const double c = 1.0 / std::cosh(y / s);
      return -2.0 * a / (s * s) * c * c * std::tanh(y / s);
    };
    d.d3b = [a, s](double y) {
      const double c2 = std::pow(1.0 / std::cosh(y / s), 2);
      const double t2 = std::pow(std::tanh(y / s), 2);
      return a / (s * s * s) * (4.0 * c2 * t2 - 2.0 * c2 * c2);
    };
    const double aa = std::abs(a);
    // max sech^2 tanh = 2 / (3 sqrt 3)
    const double k2 = 4.0 / (3.0 * std::sqrt(3.0));
    d.sup_b = aa;
    d.sup_db = aa / s;
    d.sup_d2b = k2 * aa / (s * s);
    d.sup_d3b = 2.0 * aa / (s * s * s);
    d.g0 = 0.5 * d.sup_d2b + d.sup_b * d.sup_db;
    d.dg_sup = 0.5 * d.sup_d3b + d.sup_db * d.sup_db + d.sup_b * d.sup_d2b;
  } else {
    throw InvalidArgument("unknown drift '" + name + "'", "target.drift");
  }
  return d;
}

std::vector<std::string> drift_names() { return {"linear", "sine", "tanh", "zero"}; }

double bridge_path(const SpectralBasis& basis, std::span<const double> x, double t) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * basis.bridge_mode(k + 1, t);
  return acc;
}

namespace {

struct BridgeTables {
  std::size_t n_modes;
  std::size_t n_nodes;
  std::vector<double> weights;  // GL weights mapped to [0, T]
  std::vector<double> modes;    // row j: e_k(t_j), k = 1..n_modes
};

}  // namespace

TargetPotential bridge_target(const SpectralBasis& basis, const BridgeDrift& drift, std::size_t quad_points) {
  if (basis.kind() != BasisKind::BrownianBridge)
    throw InvalidArgument("bridge target needs a Brownian bridge basis", "basis.kind");
  if (quad_points < 16) throw InvalidArgument("bridge quadrature needs at least 16 nodes", "target.quad_points");

  const double T = basis.parameter();
  const std::size_t n = basis.n_modes();
  const GaussLegendre& gl = gauss_legendre(quad_points);
  auto tab = std::make_shared<BridgeTables>();
  tab->n_modes = n;
  tab->n_nodes = quad_points;
  tab->weights.resize(quad_points);
  tab->modes.resize(quad_points * n);
  for (std::size_t j = 0; j < quad_points; ++j) {
    const double t = 0.5 * T * (gl.nodes[j] + 1.0);
    tab->weights[j] = 0.5 * T * gl.weights[j];
    for (std::size_t k = 0; k < n; ++k) tab->modes[j * n + k] = basis.bridge_mode(k + 1, t);
  }

  // Discrete Gram matrix G = E^T W E; its top eigenvalue turns the L2 bounds
  // on the integrand into bounds on the quadrature gradient.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < quad_points; ++j) {
    Eigen::Map<const Eigen::VectorXd> row(&tab->modes[j * n], static_cast<Eigen::Index>(n));
    gram.noalias() += tab->weights[j] * row * row.transpose();
  }
  const double lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();

  TargetPotential t;
  t.name = "bridge:" + drift.name;
  t.n_modes = n;
  t.active_modes = n;
  auto b = drift.b, db = drift.db, d2b = drift.d2b;
  t.evaluate = [tab, b, db](std::span<const double> x) {
    thread_local std::vector<double> path;
    path.resize(tab->n_nodes);
    kernels::active().gemv(tab->modes.data(), tab->n_nodes, tab->n_modes, x.data(), path.data());
    double acc = 0.0;
    for (std::size_t j = 0; j < tab->n_nodes; ++j) {
      const double y = path[j];
      const double by = b(y);
      acc += tab->weights[j] * (0.5 * db(y) + 0.5 * by * by);
    }
    return acc;
  };
  t.gradient = [tab, b, db, d2b](std::span<const double> x, std::span<double> out) {
    thread_local std::vector<double> path;
    path.resize(tab->n_nodes);
    kernels::active().gemv(tab->modes.data(), tab->n_nodes, tab->n_modes, x.data(), path.data());
    for (std::size_t j = 0; j < tab->n_nodes; ++j) {
      const double y = path[j];
      path[j] = tab->weights[j] * (0.5 * d2b(y) + b(y) * db(y));
    }
    kernels::active().gemv_t(tab->modes.data(), tab->n_nodes, tab->n_modes, path.data(), out.data());
  };
  t.m0 = std::sqrt(lam) * drift.g0 * std::sqrt(T);
  t.m1 = lam * drift.g1;
  t.hessian_bound = lam * drift.dg_sup;
  t.lower_bound = std::isfinite(drift.sup_db) ? -0.5 * T * drift.sup_db : -std::numeric_limits<double>::infinity();
  t.is_zero = drift.name == "zero";
  return t;
}

namespace {

CoeffVector ball_point(std::size_t n, double radius, RandomSource& rng) {
  CoeffVector x(n);
  for (auto& xi : x) xi = rng.normal();
  const double nrm = std::sqrt(kernels::sum_sq(x));
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  for (auto& xi : x) xi *= nrm > 0.0 ? r / nrm : 0.0;
  return x;
}

}  // namespace

GradientCheck check_gradient(const TargetPotential& target, std::size_t n_points, double radius,
                             RandomSource& rng, double h) {
  GradientCheck res;
  const std::size_t n = target.n_modes;
  CoeffVector g(n);
  for (std::size_t p = 0; p < n_points; ++p) {
    CoeffVector x = ball_point(n, radius, rng);
    target.gradient(x, g);
    double scale = 1.0;
    for (double gi : g) scale = std::max(scale, std::abs(gi));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = x[i];
      x[i] = xi + h;
      const double fp = target.evaluate(x);
      x[i] = xi - h;
      const double fm = target.evaluate(x);
      x[i] = xi;
      worst = std::max(worst, std::abs((fp - fm) / (2.0 * h) - g[i]) / scale);
    }
    if (worst > res.max_rel_error) {
      res.max_rel_error = worst;
      res.worst_point = p;
    }
  }
  return res;
}

double check_grad_growth(const TargetPotential& target, std::size_t n_points, double radius, RandomSource& rng) {
  double worst = 0.0;
  CoeffVector g(target.n_modes);
  for (std::size_t p = 0; p < n_points; ++p) {
    const CoeffVector x = ball_point(target.n_modes, radius, rng);
    target.gradient(x, g);
    const double gn = std::sqrt(kernels::sum_sq(g));
    const double bound = target.grad_bound(std::sqrt(kernels::sum_sq(x)));
    if (gn == 0.0) continue;
    worst = std::max(worst, bound > 0.0 ? gn / bound : std::numeric_limits<double>::infinity());
  }
  return worst;
}

double check_drift_derivatives(const BridgeDrift& drift, std::size_t n_points, double range, RandomSource& rng,
                               double h) {
  double worst = 0.0;
  const std::function<double(double)>* fs[] = {&drift.b, &drift.db, &drift.d2b, &drift.d3b};
  for (std::size_t p = 0; p < n_points; ++p) {
    const double y = range * (2.0 * rng.uniform() - 1.0);
    for (int k = 0; k < 3; ++k) {
      const double fd = ((*fs[k])(y + h) - (*fs[k])(y - h)) / (2.0 * h);
      const double an = (*fs[k + 1])(y);
      worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
  }
  return worst;
}

}  // namespace pdmp
