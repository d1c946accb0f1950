#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "qtun/errors.hpp"

namespace qtun {

// ---------------------------------------------------------------------------
// Discretized operator laboratory for the two momentum representations:
//   wave         p = -i hbar d/dx   with [x, p] = i hbar   (hermitian)
//   corpuscular  p =   -hbar d/dx   with [x, p] =   hbar   (anti-hermitian)
// Stencils: central differences inside, second-order one-sided at the two
// boundary points. Inner products: trapezoidal. The lab certifies operator
// identities in the continuum limit at measured rates; no claim is made of
// exact canonical commutators on a finite grid.
// ---------------------------------------------------------------------------

enum class MomentumRep { wave, corpuscular };

inline const char* rep_name(MomentumRep r) {
  return r == MomentumRep::wave ? "wave" : "corpuscular";
}

using cdouble = std::complex<double>;

struct GridFunction {
  std::vector<double> xs;       // uniform to 1 part in 1e12, length >= 8
  std::vector<cdouble> values;

  double dx() const { return xs[1] - xs[0]; }
};

inline void validate(const GridFunction& f) {
  if (f.xs.size() < 8) fail(errc::domain, "grid needs at least 8 points");
  if (f.values.size() != f.xs.size()) fail(errc::domain, "grid/value size mismatch");
  double d0 = f.xs[1] - f.xs[0];
  if (!(d0 > 0.0)) fail(errc::domain, "grid must be increasing");
  for (size_t i = 1; i + 1 < f.xs.size(); ++i) {
    double d = f.xs[i + 1] - f.xs[i];
    if (std::abs(d - d0) > 1e-12 * std::abs(d0))
      fail(errc::domain, "grid spacing not uniform to 1e-12");
  }
}

template <typename F>
GridFunction make_grid_function(double x0, double x1, size_t n, F&& fn) {
  GridFunction g;
  g.xs.resize(n);
  g.values.resize(n);
  double dx = (x1 - x0) / static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) {
    g.xs[i] = x0 + dx * static_cast<double>(i);
    g.values[i] = fn(g.xs[i]);
  }
  return g;
}

/// p f on the same grid. Central differences on interior points; one-sided
/// second-order stencils at the two boundary points.
inline GridFunction momentum_apply(MomentumRep rep, const GridFunction& f, double hbar) {
  validate(f);
  if (!(hbar > 0.0)) fail(errc::domain, "hbar must be positive");
  const size_t n = f.values.size();
  const double dx = f.dx();
  const cdouble factor =
      (rep == MomentumRep::wave) ? cdouble(0.0, -hbar) : cdouble(-hbar, 0.0);

  GridFunction out;
  out.xs = f.xs;
  out.values.resize(n);
  out.values[0] =
      factor * (-3.0 * f.values[0] + 4.0 * f.values[1] - f.values[2]) / (2.0 * dx);
  for (size_t j = 1; j + 1 < n; ++j)
    out.values[j] = factor * (f.values[j + 1] - f.values[j - 1]) / (2.0 * dx);
  out.values[n - 1] =
      factor * (3.0 * f.values[n - 1] - 4.0 * f.values[n - 2] + f.values[n - 3]) / (2.0 * dx);
  return out;
}

/// Trapezoidal inner product <f, g> = sum conj(f) g dx.
inline cdouble inner_product(const GridFunction& f, const GridFunction& g) {
  if (f.xs.size() != g.xs.size()) fail(errc::domain, "inner product needs one shared grid");
  const size_t n = f.values.size();
  cdouble acc = 0.5 * (std::conj(f.values[0]) * g.values[0] +
                       std::conj(f.values[n - 1]) * g.values[n - 1]);
  for (size_t j = 1; j + 1 < n; ++j) acc += std::conj(f.values[j]) * g.values[j];
  return acc * f.dx();
}

struct DefectReport {
  MomentumRep rep = MomentumRep::wave;
  int grid_n = 0;
  double defect = 0.0;
  double convergence_order_estimate = std::nan("");  // filled by multi-grid runs
};

/// Hermiticity (wave) / anti-hermiticity (corpuscular) defect over a battery
/// of test-function pairs sharing one grid:
///   wave:        max |<f, p g> - <p f, g>|
///   corpuscular: max |<f, p g> + <p f, g>|
/// Test functions must vanish at the grid boundaries (compact-support
/// convention); otherwise the defect would be dominated by surface terms.
///
/// With these stencils and the trapezoidal inner product the combination
/// telescopes exactly for boundary-vanishing functions, so the measured
/// defect sits at the rounding floor on every grid rather than at O(dx^2).
inline DefectReport hermiticity_defect(MomentumRep rep,
                                       const std::vector<std::pair<GridFunction, GridFunction>>& fs,
                                       double hbar) {
  if (fs.empty()) fail(errc::domain, "empty test battery");
  DefectReport report;
  report.rep = rep;
  report.grid_n = static_cast<int>(fs.front().first.xs.size());
  for (const auto& [f, g] : fs) {
    validate(f);
    validate(g);
    if (f.xs.size() != g.xs.size() || std::abs(f.xs.front() - g.xs.front()) > 1e-12)
      fail(errc::domain, "pair must share one grid");
    for (const GridFunction* h : {&f, &g}) {
      double amp = 0.0;
      for (const auto& v : h->values) amp = std::max(amp, std::abs(v));
      if (std::abs(h->values.front()) > 1e-12 * std::max(amp, 1.0) ||
          std::abs(h->values.back()) > 1e-12 * std::max(amp, 1.0))
        fail(errc::boundary_condition, "test function does not vanish at the grid ends");
    }
    auto pf = momentum_apply(rep, f, hbar);
    auto pg = momentum_apply(rep, g, hbar);
    cdouble lhs = inner_product(f, pg);
    cdouble rhs = inner_product(pf, g);
    double defect = (rep == MomentumRep::wave) ? std::abs(lhs - rhs) : std::abs(lhs + rhs);
    report.defect = std::max(report.defect, defect);
  }
  return report;
}

/// Pointwise commutator defect max_j |([x, p] f)(x_j) - kappa f(x_j)| over
/// interior points, kappa = i hbar (wave) or hbar (corpuscular). With the
/// central stencil this equals hbar * |(f_{j+1}+f_{j-1})/2 - f_j| = O(dx^2).
inline DefectReport commutator_defect(MomentumRep rep, const GridFunction& f, double hbar) {
  validate(f);
  if (!(hbar > 0.0)) fail(errc::domain, "hbar must be positive");
  const cdouble kappa =
      (rep == MomentumRep::wave) ? cdouble(0.0, hbar) : cdouble(hbar, 0.0);

  GridFunction xf;
  xf.xs = f.xs;
  xf.values.resize(f.values.size());
  for (size_t j = 0; j < f.values.size(); ++j) xf.values[j] = f.xs[j] * f.values[j];

  auto pf = momentum_apply(rep, f, hbar);
  auto pxf = momentum_apply(rep, xf, hbar);

  DefectReport report;
  report.rep = rep;
  report.grid_n = static_cast<int>(f.xs.size());
  for (size_t j = 1; j + 1 < f.values.size(); ++j) {
    cdouble commutator = f.xs[j] * pf.values[j] - pxf.values[j];
    report.defect = std::max(report.defect, std::abs(commutator - kappa * f.values[j]));
  }
  return report;
}

inline double convergence_order(double defect_coarse, double defect_fine) {
  return std::log2(defect_coarse / defect_fine);
}

/// Interior pointwise eigenvalue estimate of p on f: mean of (p f)_j / f_j.
/// For the flat-barrier eigenfunction exp(-p x / hbar) the corpuscular
/// estimate is real with value p (1 + O(dx^2)); the wave estimate is i p.
inline cdouble eigenvalue_estimate(MomentumRep rep, const GridFunction& f, double hbar) {
  auto pf = momentum_apply(rep, f, hbar);
  cdouble acc = 0.0;
  size_t count = 0;
  double amp = 0.0;
  for (const auto& v : f.values) amp = std::max(amp, std::abs(v));
  for (size_t j = 1; j + 1 < f.values.size(); ++j) {
    if (std::abs(f.values[j]) < 1e-12 * amp) continue;
    acc += pf.values[j] / f.values[j];
    ++count;
  }
  if (count == 0) fail(errc::domain, "function vanishes on the interior");
  return acc / static_cast<double>(count);
}

/// Standard battery: gaussians of three widths (one phase-modulated) plus
/// two sin-bumps, all vanishing at the grid boundaries to 1e-14 or better.
inline std::vector<GridFunction> gaussian_battery(double x0, double x1, size_t n) {
  const double L = x1 - x0;
  const double c = 0.5 * (x0 + x1);
  std::vector<GridFunction> battery;
  for (double div : {26.0, 32.0, 40.0}) {
    double w = L / div;
    battery.push_back(make_grid_function(x0, x1, n, [&](double x) {
      double u = (x - c) / w;
      return cdouble(std::exp(-0.5 * u * u), 0.0);
    }));
  }
  {
    double w = L / 32.0;
    battery.push_back(make_grid_function(x0, x1, n, [&](double x) {
      double u = (x - c) / w;
      return std::exp(-0.5 * u * u) *
             std::exp(cdouble(0.0, 6.0 * std::numbers::pi * (x - x0) / L));
    }));
  }
  battery.push_back(make_grid_function(x0, x1, n, [&](double x) {
    double s = std::sin(std::numbers::pi * (x - x0) / L);
    return cdouble(s * s, 0.0);
  }));
  battery.push_back(make_grid_function(x0, x1, n, [&](double x) {
    double s = std::sin(std::numbers::pi * (x - x0) / L);
    return cdouble(s * s * s, 0.0);
  }));
  // Exact zeros at the endpoints (sin(pi) rounding never exceeds 1e-15).
  for (auto& f : battery) {
    f.values.front() = 0.0;
    f.values.back() = 0.0;
  }
  return battery;
}

inline std::vector<std::pair<GridFunction, GridFunction>> battery_pairs(
    const std::vector<GridFunction>& battery) {
  std::vector<std::pair<GridFunction, GridFunction>> pairs;
  for (size_t i = 0; i < battery.size(); ++i)
    for (size_t j = i; j < battery.size(); ++j) pairs.emplace_back(battery[i], battery[j]);
  return pairs;
}

// ---------------------------------------------------------------------------
// Relativistic mass-transform laws of the two representations.
// ---------------------------------------------------------------------------

struct RepresentationParams {
  double m0 = 1.0;
  double c = 1.0;
  double hbar = 1.0;

  /// Internal clock frequency omega0 = m0 c^2 / hbar (derived, never stored).
  double omega0() const { return m0 * c * c / hbar; }
};

/// Moving-frame mass: m0 / sqrt(1 - v^2/c^2) in the wave representation,
/// m0 * sqrt(1 - v^2/c^2) in the corpuscular one. The two laws agree in the
/// rest frame and their product is m0^2 for every |v| < c.
inline double mass_transform(MomentumRep rep, double m0, double v, double c) {
  if (!(c > 0.0) || !(m0 > 0.0)) fail(errc::domain, "need positive m0 and c");
  if (!(std::abs(v) < c)) fail(errc::domain, "|v| must be below c");
  double gamma_inv = std::sqrt(1.0 - (v / c) * (v / c));
  return rep == MomentumRep::wave ? m0 / gamma_inv : m0 * gamma_inv;
}

}  // namespace qtun
