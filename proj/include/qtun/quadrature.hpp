#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

namespace qtun {

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendreTable {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline GaussLegendreTable build_gauss_legendre(int n) {
  GaussLegendreTable t;
  t.nodes.resize(static_cast<size_t>(n));
  t.weights.resize(static_cast<size_t>(n));
  // Newton iteration from the Chebyshev initial guess; standard and plenty
  // accurate for the orders used here (<= 256).
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    t.nodes[static_cast<size_t>(i)] = -x;
    t.weights[static_cast<size_t>(i)] = w;
    t.nodes[static_cast<size_t>(n - 1 - i)] = x;
    t.weights[static_cast<size_t>(n - 1 - i)] = w;
  }
  return t;
}

}  // namespace detail

inline const GaussLegendreTable& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::build_gauss_legendre(n)).first;
  return it->second;
}

/// Fixed-order Gauss-Legendre integral of f over [a, b].
template <typename F>
double integrate_gl(F&& f, double a, double b, int order) {
  const auto& t = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (size_t i = 0; i < t.nodes.size(); ++i) acc += t.weights[i] * f(mid + half * t.nodes[i]);
  return acc * half;
}

/// Integral of f over [a, b] where f may behave like (x-a)^(-1/2) and/or
/// (b-x)^(-1/2) at the endpoints. The substitution x = a + (b-a) sin^2(theta)
/// absorbs inverse-square-root endpoint behavior into a smooth integrand on
/// theta in [0, pi/2]; all evaluation nodes are strictly interior.
template <typename F>
double integrate_endpoint_singular(F&& f, double a, double b, int order) {
  const double width = b - a;
  auto g = [&](double theta) {
    double s = std::sin(theta);
    double x = a + width * s * s;
    return f(x) * width * std::sin(2.0 * theta);
  };
  return integrate_gl(g, 0.0, 0.5 * std::numbers::pi, order);
}

/// Value plus a relative error estimate obtained by doubling the order.
struct QuadratureEstimate {
  double value = 0.0;
  double rel_error = 0.0;
};

template <typename F>
QuadratureEstimate estimate_endpoint_singular(F&& f, double a, double b, int order) {
  double coarse = integrate_endpoint_singular(f, a, b, order);
  double fine = integrate_endpoint_singular(f, a, b, 2 * order);
  double scale = std::max(std::abs(fine), 1e-300);
  return {fine, std::abs(fine - coarse) / scale};
}

}  // namespace qtun
