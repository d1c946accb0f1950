#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qtun/core.hpp"
#include "qtun/errors.hpp"
#include "qtun/potential.hpp"
#include "qtun/quadrature.hpp"

namespace qtun {

// ---------------------------------------------------------------------------
// Semiclassical stationary profiles and the primitive transmission estimate.
//
// Normal region:  psi ~ p^{-1/2} exp( (i/hbar) Int p dx ),  p = sqrt(2 m (E-V))
// Barrier region: psi ~ q^{-1/2} exp( -(1/hbar) Int q dx ),  q = sqrt(2 m (V-E))
// Profiles store |psi| and the accumulated phase relative to a reference
// point; the stationary exp(-iEt/hbar) factor is dropped throughout.
// ---------------------------------------------------------------------------

enum class WkbBranch { decaying, growing };

struct WkbProfile {
  std::vector<double> xs;
  std::vector<double> amplitude;  // |psi(x)| / |psi(x_ref)|
  std::vector<double> phase;      // radians, constant in the barrier region
  RegionKind region = RegionKind::normal;
  double x_ref = 0.0;
  double hbar = 1.0;
  double validity_max = 0.0;  // max |hbar p'/p^2|, the slow-variation measure
};

struct ActionResult {
  double S = 0.0;  // Int_b^c sqrt(2 m (V-E)) dx
  double b = 0.0;
  double c = 0.0;
  double quadrature_error = 0.0;
  bool degenerate = false;  // coincident/tangential turning points
};

namespace detail {

inline double wkb_momentum(RegionKind region, const PotentialSpec& spec, double E, double m0,
                           double x) {
  double f = 2.0 * m0 * region_sign(region) * (E - evaluate(spec, x));
  if (f <= 0.0)
    fail(errc::region_mismatch, "sample outside the stated region kind");
  return std::sqrt(f);
}

// Cumulative integral of p along the sorted grid, shared reference at x_ref.
inline std::vector<double> cumulative_momentum_integral(RegionKind region,
                                                        const PotentialSpec& spec, double E,
                                                        double m0, double x_ref,
                                                        const std::vector<double>& xs) {
  auto p = [&](double x) { return wkb_momentum(region, spec, E, m0, x); };
  std::vector<double> out(xs.size(), 0.0);
  // Integrate segment by segment outward from x_ref in both directions.
  std::vector<double> pts = xs;
  pts.push_back(x_ref);
  std::sort(pts.begin(), pts.end());
  size_t ref_pos = static_cast<size_t>(
      std::lower_bound(pts.begin(), pts.end(), x_ref) - pts.begin());
  std::vector<double> acc(pts.size(), 0.0);
  for (size_t i = ref_pos; i + 1 < pts.size(); ++i)
    acc[i + 1] = acc[i] + integrate_gl(p, pts[i], pts[i + 1], 32);
  for (size_t i = ref_pos; i > 0; --i)
    acc[i - 1] = acc[i] - integrate_gl(p, pts[i - 1], pts[i], 32);
  for (size_t k = 0; k < xs.size(); ++k) {
    size_t pos = static_cast<size_t>(
        std::lower_bound(pts.begin(), pts.end(), xs[k]) - pts.begin());
    out[k] = acc[pos];
  }
  return out;
}

// The region (as an interval) of the requested kind containing x_ref, with
// its turning-point endpoints marked.
struct RegionWindow {
  double lo = 0.0, hi = 0.0;
  bool lo_is_turning = false, hi_is_turning = false;
};

inline RegionWindow locate_region(const PotentialSpec& spec, double E, RegionKind kind,
                                  double x_ref) {
  auto tp = find_turning_points(spec, E);
  for (const auto& r : tp.regions) {
    if (x_ref < r.lo || x_ref > r.hi || r.kind != kind) continue;
    RegionWindow w{r.lo, r.hi, false, false};
    for (const auto& p : tp.points) {
      if (std::abs(p.x - r.lo) <= 1e-9 * spec.domain.width()) w.lo_is_turning = true;
      if (std::abs(p.x - r.hi) <= 1e-9 * spec.domain.width()) w.hi_is_turning = true;
    }
    return w;
  }
  fail(errc::region_mismatch, "x_ref does not lie in a region of the stated kind");
}

}  // namespace detail

/// Sampled WKB wavefunction relative to x_ref. Amplitudes follow the
/// p^{-1/2} law; in the barrier region the decaying branch multiplies by
/// exp(-Int q/hbar) and the growing branch by exp(+Int q/hbar); the normal
/// region accumulates phase instead and ignores `branch`. Samples within
/// 1e-6 of the region width of a turning point are refused (the p^{-1/2}
/// divergence there is an artifact of the approximation).
inline WkbProfile wkb_profile(RegionKind region, const PotentialSpec& spec, double E, double m0,
                              double hbar, double x_ref, const std::vector<double>& xs,
                              WkbBranch branch = WkbBranch::decaying) {
  if (!(m0 > 0.0) || !(hbar > 0.0)) fail(errc::domain, "m0 and hbar must be positive");
  if (xs.empty()) fail(errc::domain, "empty sample grid");
  for (size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) fail(errc::domain, "sample grid must be strictly increasing");

  auto window = detail::locate_region(spec, E, region, x_ref);
  const double dist_min = 1e-6 * (window.hi - window.lo);
  auto check_sample = [&](double x) {
    if (x < window.lo || x > window.hi)
      fail(errc::region_mismatch, "sample outside the region containing x_ref");
    if (window.lo_is_turning && x - window.lo < dist_min)
      fail(errc::turning_point_divergence, "sample too close to the lower turning point");
    if (window.hi_is_turning && window.hi - x < dist_min)
      fail(errc::turning_point_divergence, "sample too close to the upper turning point");
  };
  check_sample(x_ref);
  for (double x : xs) check_sample(x);

  WkbProfile prof;
  prof.xs = xs;
  prof.region = region;
  prof.x_ref = x_ref;
  prof.hbar = hbar;
  prof.amplitude.resize(xs.size());
  prof.phase.resize(xs.size());

  const double p_ref = detail::wkb_momentum(region, spec, E, m0, x_ref);
  auto integrals = detail::cumulative_momentum_integral(region, spec, E, m0, x_ref, xs);
  const double branch_sign = (branch == WkbBranch::growing) ? +1.0 : -1.0;

  for (size_t k = 0; k < xs.size(); ++k) {
    double p = detail::wkb_momentum(region, spec, E, m0, xs[k]);
    double ratio = std::sqrt(p_ref / p);
    if (region == RegionKind::normal) {
      prof.amplitude[k] = ratio;
      prof.phase[k] = integrals[k] / hbar;
    } else {
      prof.amplitude[k] = ratio * std::exp(branch_sign * integrals[k] / hbar);
      prof.phase[k] = 0.0;
    }
    double dV = derivative_nudged(spec, xs[k], 1e-12 * spec.domain.width());
    double validity = hbar * m0 * std::abs(dV) / (p * p * p);
    prof.validity_max = std::max(prof.validity_max, validity);
  }
  return prof;
}

/// Barrier action S = Int_b^c sqrt(2 m (V-E)) dx over the (unique) barrier
/// interval bounded by two turning points; E at the barrier top gives the
/// degenerate S = 0.
inline ActionResult barrier_action(const PotentialSpec& spec, double E, double m0) {
  if (!(m0 > 0.0)) fail(errc::domain, "m0 must be positive");
  auto tp = find_turning_points(spec, E);

  const Region* barrier = nullptr;
  for (const auto& r : tp.regions) {
    if (r.kind != RegionKind::barrier) continue;
    bool lo_tp = false, hi_tp = false;
    for (const auto& p : tp.points) {
      if (std::abs(p.x - r.lo) <= 1e-9 * spec.domain.width()) lo_tp = true;
      if (std::abs(p.x - r.hi) <= 1e-9 * spec.domain.width()) hi_tp = true;
    }
    if (lo_tp && hi_tp) {
      if (barrier) fail(errc::no_barrier, "several barrier intervals; ambiguous");
      barrier = &r;
    }
  }
  if (!barrier) {
    // A tangential contact at the barrier top: coincident turning points.
    for (const auto& p : tp.points)
      if (p.tangential) return {0.0, p.x, p.x, 0.0, true};
    fail(errc::no_barrier, "no barrier interval below E in the domain");
  }

  bool degenerate = false;
  for (const auto& p : tp.points)
    if (p.tangential && (std::abs(p.x - barrier->lo) <= 1e-9 * spec.domain.width() ||
                         std::abs(p.x - barrier->hi) <= 1e-9 * spec.domain.width()))
      degenerate = true;

  auto integrand = [&](double x) {
    double f = 2.0 * m0 * (evaluate(spec, x) - E);
    return std::sqrt(std::max(f, 0.0));
  };
  auto q = estimate_endpoint_singular(integrand, barrier->lo, barrier->hi, 64);
  return {q.value, barrier->lo, barrier->hi, q.rel_error, degenerate};
}

/// Primitive exponential transmission estimate T = exp(-2 S / hbar). No
/// turning-point connection prefactor is applied; comparisons against exact
/// results are meaningful in the log domain.
inline ScatteringResult wkb_transmission(const PotentialSpec& spec, double E, double m0,
                                         double hbar) {
  if (!(hbar > 0.0)) fail(errc::domain, "hbar must be positive");
  auto action = barrier_action(spec, E, m0);
  ScatteringResult res;
  res.E = E;
  res.method = ScatteringMethod::wkb_primitive;
  res.S = action.S;
  res.hbar = hbar;
  res.T = std::exp(-2.0 * action.S / hbar);
  res.R = 1.0 - res.T;
  return res;
}

}  // namespace qtun
