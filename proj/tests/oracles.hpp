#pragma once
// Independent reference computations used by the tests. Nothing here calls
// into the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Gauss-Hermite rule for the standard normal weight via Golub-Welsch.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline HermiteRule gauss_hermite(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  HermiteRule r;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(es.eigenvalues()(i));
    const double w0 = es.eigenvectors()(0, i);
    r.weights.push_back(w0 * w0);
  }
  return r;
}

/// sum_{i > n} i^{-s}: direct sum of m terms, then the integral tail with the
/// trapezoid end correction.
inline double hurwitz_brute(double s, std::size_t n, std::size_t m = 2000000) {
  long double acc = 0.0L;
  const std::size_t last = n + m;
  for (std::size_t i = last; i > n; --i) acc += std::pow(static_cast<long double>(i), -static_cast<long double>(s));
  const long double M = static_cast<long double>(last);
  acc += std::pow(M, 1.0L - s) / (s - 1.0L) - 0.5L * std::pow(M, -static_cast<long double>(s)) +
         static_cast<long double>(s) / 12.0L * std::pow(M, -static_cast<long double>(s) - 1.0L);
  return static_cast<double>(acc);
}

/// prod_{n < i <= m} (g_i + 1) / sqrt(2 g_i + 1) - 1 with g_i = i^{-s}, in quad precision.
double mu_product_quad(double s, std::size_t n, std::size_t m);

/// Top eigenvalue of the Brownian-bridge kernel min(s,t) - st / T on [0,T],
/// midpoint Nystrom discretisation and power iteration.
inline double bridge_kernel_top_eigenvalue(double T, std::size_t points, int iters = 400) {
  const double h = T / static_cast<double>(points);
  std::vector<double> t(points);
  for (std::size_t i = 0; i < points; ++i) t[i] = (static_cast<double>(i) + 0.5) * h;
  std::vector<double> v(points, 1.0), w(points);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < points; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < points; ++j) acc += (std::min(t[i], t[j]) - t[i] * t[j] / T) * v[j];
      w[i] = acc * h;
    }
    double nrm = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      nrm += w[i] * w[i];
      dot += w[i] * v[i];
    }
    double vn = 0.0;
    for (double x : v) vn += x * x;
    lambda = dot / vn;
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < points; ++i) v[i] = w[i] / nrm;
  }
  return lambda;
}

/// Variance at time t of the OU bridge dY = -theta Y dt + dW pinned at 0 at
/// both ends of [0, T].
inline double ou_bridge_variance(double t, double theta, double T) {
  return std::sinh(theta * t) * std::sinh(theta * (T - t)) / (theta * std::sinh(theta * T));
}

/// The same law restricted to the first n sine modes on [0, 1].
inline double ou_bridge_variance_modes(double t, double theta, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = n; k >= 1; --k) {
    const double kp = static_cast<double>(k) * kPi;
    const double s = std::sin(kp * t);
    acc += 2.0 * s * s / (kp * kp + theta * theta);
  }
  return acc;
}

struct BridgeMoments {
  std::vector<double> mean, var, mean_se, var_se;
  std::size_t accepted = 0;
};

/// Euler paths from 0, kept when |Y_T| < eps.
inline BridgeMoments ou_bridge_euler(double theta, double T, const std::vector<double>& times, std::size_t steps,
                                     double eps, std::size_t paths, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  const double dt = T / static_cast<double>(steps);
  const double sq = std::sqrt(dt);
  std::vector<std::size_t> idx;
  for (double t : times) idx.push_back(static_cast<std::size_t>(std::llround(t / dt)));
  const std::size_t m = times.size();
  std::vector<double> s1(m, 0.0), s2(m, 0.0), s4(m, 0.0), snap(m);
  BridgeMoments out;
  for (std::size_t p = 0; p < paths; ++p) {
    double y = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 1; k <= steps; ++k) {
      y += -theta * y * dt + sq * nd(gen);
      while (next < m && idx[next] == k) snap[next++] = y;
    }
    if (std::abs(y) >= eps) continue;
    ++out.accepted;
    for (std::size_t j = 0; j < m; ++j) {
      s1[j] += snap[j];
      s2[j] += snap[j] * snap[j];
      s4[j] += snap[j] * snap[j] * snap[j] * snap[j];
    }
  }
  const double n = static_cast<double>(out.accepted);
  for (std::size_t j = 0; j < m; ++j) {
    const double mu = s1[j] / n;
    const double m2 = s2[j] / n;
    out.mean.push_back(mu);
    out.var.push_back(m2 - mu * mu);
    out.mean_se.push_back(std::sqrt((m2 - mu * mu) / n));
    out.var_se.push_back(std::sqrt((s4[j] / n - m2 * m2) / n));
  }
  return out;
}

/// First arrival of an inhomogeneous Poisson clock with rate a + b sin(w t),
/// a >= |b|, by inverting the integrated rate at an Exp(1) level.
inline double sinusoid_integrated_rate(double t, double a, double b, double w) {
  return a * t + b / w * (1.0 - std::cos(w * t));
}

inline double sinusoid_inverse(double e, double a, double b, double w) {
  double lo = 0.0, hi = 1.0;
  while (sinusoid_integrated_rate(hi, a, b, w) < e) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sinusoid_integrated_rate(mid, a, b, w) < e ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// One-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle
