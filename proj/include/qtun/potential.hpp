#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "qtun/core.hpp"
#include "qtun/errors.hpp"

namespace qtun {

// ---------------------------------------------------------------------------
// Potential catalog
//
// Analytic families are defined on the whole real line; the sampled families
// (piecewise_linear, tabulated) only inside their node range. Piecewise
// families evaluate one-sided at breakpoints with the left-closed convention:
// the piece starting at a breakpoint owns it.
// ---------------------------------------------------------------------------

struct SquareBarrier {
  double V0 = 1.0;  // height (sign-free: negative V0 is a square well)
  double width = 1.0;
  double center = 0.0;
};

struct ParabolicBarrier {  // V = V0 - k (x-center)^2 / 2
  double V0 = 1.0;
  double k = 1.0;
  double center = 0.0;
};

struct HarmonicWell {  // V = floor + k (x-center)^2 / 2
  double k = 1.0;
  double center = 0.0;
  double floor = 0.0;
};

struct Eckart {  // V = V0 / cosh^2((x-center)/a)
  double V0 = 1.0;
  double a = 1.0;
  double center = 0.0;
};

struct GaussianBarrier {  // V = V0 exp(-(x-center)^2 / (2 sigma^2))
  double V0 = 1.0;
  double sigma = 1.0;
  double center = 0.0;
};

struct PiecewiseLinear {  // nodes interpolated linearly, strictly increasing x
  std::vector<double> xs;
  std::vector<double> vs;
};

struct Tabulated {  // raw samples, linear interpolation, FD derivative
  std::vector<double> xs;
  std::vector<double> vs;
};

using PotentialProfile = std::variant<SquareBarrier, ParabolicBarrier, HarmonicWell, Eckart,
                                      GaussianBarrier, PiecewiseLinear, Tabulated>;

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
};

struct PotentialSpec {
  PotentialProfile profile;
  Interval domain{-1.0, 1.0};
};

inline const char* family_name(const PotentialProfile& p) {
  struct Visitor {
    const char* operator()(const SquareBarrier&) const { return "square_barrier"; }
    const char* operator()(const ParabolicBarrier&) const { return "parabolic_barrier"; }
    const char* operator()(const HarmonicWell&) const { return "harmonic_well"; }
    const char* operator()(const Eckart&) const { return "eckart"; }
    const char* operator()(const GaussianBarrier&) const { return "gaussian_barrier"; }
    const char* operator()(const PiecewiseLinear&) const { return "piecewise_linear"; }
    const char* operator()(const Tabulated&) const { return "tabulated"; }
  };
  return std::visit(Visitor{}, p);
}

namespace detail {

inline void check_samples(const std::vector<double>& xs, const std::vector<double>& vs,
                          const char* family) {
  if (xs.size() != vs.size() || xs.size() < 2)
    fail(errc::domain, std::string(family) + ": need matching x/V sample arrays of size >= 2");
  for (size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      fail(errc::domain, std::string(family) + ": sample x values must be strictly increasing");
}

// Index of the segment [xs[i], xs[i+1]) containing x (left-closed).
inline size_t segment_index(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin() || (it == xs.end() && x > xs.back()))
    fail(errc::domain, "x outside the sampled range");
  size_t i = static_cast<size_t>(it - xs.begin());
  return std::min(i - 1, xs.size() - 2);
}

inline double lerp_samples(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
  size_t i = segment_index(xs, x);
  double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return vs[i] + t * (vs[i + 1] - vs[i]);
}

}  // namespace detail

/// Throws errc::domain if the spec violates a catalog invariant.
inline void validate(const PotentialSpec& spec) {
  if (!(spec.domain.lo < spec.domain.hi)) fail(errc::domain, "degenerate domain");
  struct Visitor {
    void operator()(const SquareBarrier& p) const {
      if (!(p.width > 0.0)) fail(errc::domain, "square_barrier: width must be positive");
    }
    void operator()(const ParabolicBarrier& p) const {
      if (!(p.k > 0.0)) fail(errc::domain, "parabolic_barrier: k must be positive");
    }
    void operator()(const HarmonicWell& p) const {
      if (!(p.k > 0.0)) fail(errc::domain, "harmonic_well: k must be positive");
    }
    void operator()(const Eckart& p) const {
      if (!(p.a > 0.0)) fail(errc::domain, "eckart: a must be positive");
    }
    void operator()(const GaussianBarrier& p) const {
      if (!(p.sigma > 0.0)) fail(errc::domain, "gaussian_barrier: sigma must be positive");
    }
    void operator()(const PiecewiseLinear& p) const { detail::check_samples(p.xs, p.vs, "piecewise_linear"); }
    void operator()(const Tabulated& p) const { detail::check_samples(p.xs, p.vs, "tabulated"); }
  };
  std::visit(Visitor{}, spec.profile);
}

/// V(x). Analytic families accept any real x; sampled families require x
/// inside their node range.
inline double evaluate(const PotentialSpec& spec, double x) {
  struct Visitor {
    double x;
    double operator()(const SquareBarrier& p) const {
      double lo = p.center - 0.5 * p.width;
      double hi = p.center + 0.5 * p.width;
      return (x >= lo && x < hi) ? p.V0 : 0.0;
    }
    double operator()(const ParabolicBarrier& p) const {
      double d = x - p.center;
      return p.V0 - 0.5 * p.k * d * d;
    }
    double operator()(const HarmonicWell& p) const {
      double d = x - p.center;
      return p.floor + 0.5 * p.k * d * d;
    }
    double operator()(const Eckart& p) const {
      double c = std::cosh((x - p.center) / p.a);
      return p.V0 / (c * c);
    }
    double operator()(const GaussianBarrier& p) const {
      double d = x - p.center;
      return p.V0 * std::exp(-d * d / (2.0 * p.sigma * p.sigma));
    }
    double operator()(const PiecewiseLinear& p) const { return detail::lerp_samples(p.xs, p.vs, x); }
    double operator()(const Tabulated& p) const { return detail::lerp_samples(p.xs, p.vs, x); }
  };
  return std::visit(Visitor{x}, spec.profile);
}

struct DerivativeResult {
  double value = 0.0;
  double fd_step = 0.0;  // nonzero when a finite difference was used
};

/// dV/dx. Analytic families differentiate exactly; tabulated data uses a
/// centered finite difference with the step recorded; piecewise families are
/// non-differentiable at their breakpoints.
inline DerivativeResult derivative_detail(const PotentialSpec& spec, double x) {
  struct Visitor {
    double x;
    DerivativeResult operator()(const SquareBarrier& p) const {
      double lo = p.center - 0.5 * p.width;
      double hi = p.center + 0.5 * p.width;
      if (x == lo || x == hi) fail(errc::non_differentiable, "square_barrier edge");
      return {0.0, 0.0};
    }
    DerivativeResult operator()(const ParabolicBarrier& p) const { return {-p.k * (x - p.center), 0.0}; }
    DerivativeResult operator()(const HarmonicWell& p) const { return {p.k * (x - p.center), 0.0}; }
    DerivativeResult operator()(const Eckart& p) const {
      double u = (x - p.center) / p.a;
      double c = std::cosh(u);
      return {-2.0 * p.V0 * std::tanh(u) / (p.a * c * c), 0.0};
    }
    DerivativeResult operator()(const GaussianBarrier& p) const {
      double d = x - p.center;
      double s2 = p.sigma * p.sigma;
      return {-p.V0 * d / s2 * std::exp(-d * d / (2.0 * s2)), 0.0};
    }
    DerivativeResult operator()(const PiecewiseLinear& p) const {
      for (double node : p.xs)
        if (x == node) fail(errc::non_differentiable, "piecewise_linear breakpoint");
      size_t i = detail::segment_index(p.xs, x);
      return {(p.vs[i + 1] - p.vs[i]) / (p.xs[i + 1] - p.xs[i]), 0.0};
    }
    DerivativeResult operator()(const Tabulated& p) const {
      size_t i = detail::segment_index(p.xs, x);
      double h = p.xs[i + 1] - p.xs[i];
      double xm = std::max(x - h, p.xs.front());
      double xp = std::min(x + h, p.xs.back());
      double d = (detail::lerp_samples(p.xs, p.vs, xp) - detail::lerp_samples(p.xs, p.vs, xm)) / (xp - xm);
      return {d, h};
    }
  };
  return std::visit(Visitor{x}, spec.profile);
}

inline double derivative(const PotentialSpec& spec, double x) { return derivative_detail(spec, x).value; }

/// Like derivative(), but falls back to the one-sided value just past a
/// breakpoint instead of throwing. For samplers that may land exactly on a
/// kink (a measure-zero event along a trajectory).
inline double derivative_nudged(const PotentialSpec& spec, double x, double nudge) {
  try {
    return derivative(spec, x);
  } catch (const error& e) {
    if (e.code() != errc::non_differentiable) throw;
    return derivative(spec, x + nudge);
  }
}

/// Positions where V is discontinuous or kinked, restricted to the open
/// domain. The exact solver aligns its segmentation with these so that
/// piecewise-constant potentials are represented without sampling error.
inline std::vector<double> breakpoints(const PotentialSpec& spec) {
  struct Visitor {
    std::vector<double> operator()(const SquareBarrier& p) const {
      return {p.center - 0.5 * p.width, p.center + 0.5 * p.width};
    }
    std::vector<double> operator()(const ParabolicBarrier&) const { return {}; }
    std::vector<double> operator()(const HarmonicWell&) const { return {}; }
    std::vector<double> operator()(const Eckart&) const { return {}; }
    std::vector<double> operator()(const GaussianBarrier&) const { return {}; }
    std::vector<double> operator()(const PiecewiseLinear& p) const { return p.xs; }
    std::vector<double> operator()(const Tabulated& p) const { return p.xs; }
  };
  std::vector<double> pts = std::visit(Visitor{}, spec.profile);
  std::vector<double> inside;
  for (double p : pts)
    if (p > spec.domain.lo && p < spec.domain.hi) inside.push_back(p);
  std::sort(inside.begin(), inside.end());
  return inside;
}

/// Spec evaluating to exactly -V(x), used by the force-inversion duality
/// between the two region kinds. Exact in floating point: every family maps
/// to a family whose evaluation negates term by term.
inline PotentialSpec negated(const PotentialSpec& spec) {
  struct Visitor {
    PotentialProfile operator()(const SquareBarrier& p) const {
      return SquareBarrier{-p.V0, p.width, p.center};
    }
    PotentialProfile operator()(const ParabolicBarrier& p) const {
      return HarmonicWell{p.k, p.center, -p.V0};
    }
    PotentialProfile operator()(const HarmonicWell& p) const {
      return ParabolicBarrier{-p.floor, p.k, p.center};
    }
    PotentialProfile operator()(const Eckart& p) const { return Eckart{-p.V0, p.a, p.center}; }
    PotentialProfile operator()(const GaussianBarrier& p) const {
      return GaussianBarrier{-p.V0, p.sigma, p.center};
    }
    PotentialProfile operator()(const PiecewiseLinear& p) const {
      PiecewiseLinear q = p;
      for (double& v : q.vs) v = -v;
      return q;
    }
    PotentialProfile operator()(const Tabulated& p) const {
      Tabulated q = p;
      for (double& v : q.vs) v = -v;
      return q;
    }
  };
  return {std::visit(Visitor{}, spec.profile), spec.domain};
}

/// Spec evaluating to V(-x), with the domain mirrored as well.
inline PotentialSpec mirrored(const PotentialSpec& spec) {
  struct Visitor {
    PotentialProfile operator()(SquareBarrier p) const {
      p.center = -p.center;
      return p;
    }
    PotentialProfile operator()(ParabolicBarrier p) const {
      p.center = -p.center;
      return p;
    }
    PotentialProfile operator()(HarmonicWell p) const {
      p.center = -p.center;
      return p;
    }
    PotentialProfile operator()(Eckart p) const {
      p.center = -p.center;
      return p;
    }
    PotentialProfile operator()(GaussianBarrier p) const {
      p.center = -p.center;
      return p;
    }
    PotentialProfile operator()(PiecewiseLinear p) const {
      std::reverse(p.xs.begin(), p.xs.end());
      std::reverse(p.vs.begin(), p.vs.end());
      for (double& x : p.xs) x = -x;
      return p;
    }
    PotentialProfile operator()(Tabulated p) const {
      std::reverse(p.xs.begin(), p.xs.end());
      std::reverse(p.vs.begin(), p.vs.end());
      for (double& x : p.xs) x = -x;
      return p;
    }
  };
  return {std::visit(Visitor{}, spec.profile), Interval{-spec.domain.hi, -spec.domain.lo}};
}

// ---------------------------------------------------------------------------
// Turning points
// ---------------------------------------------------------------------------

struct TurningPoint {
  double x = 0.0;
  bool tangential = false;  // double root or edge of a flat V == E stretch
};

struct Region {
  double lo = 0.0;
  double hi = 0.0;
  RegionKind kind = RegionKind::normal;
};

struct TurningPoints {
  std::vector<TurningPoint> points;  // strictly increasing in x
  std::vector<Region> regions;       // partition of the domain
};

namespace detail {

constexpr int kScanCells = 4096;

inline double bisect_sign_change(const PotentialSpec& spec, double E, double lo, double hi,
                                 double tol) {
  double glo = evaluate(spec, lo) - E;
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = evaluate(spec, mid) - E;
    if ((glo <= 0.0) == (gm <= 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Location of the extremum of g = V - E inside [lo, hi] by golden-section
// search on |g| with the sign fixed by the bracket interior.
inline double extremum_of_abs(const PotentialSpec& spec, double E, double lo, double hi,
                              bool maximize, double tol) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  auto f = [&](double x) {
    double g = evaluate(spec, x) - E;
    return maximize ? g : -g;
  };
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// All solutions of V(x) = E inside the domain, found by a 4096-cell bracket
/// scan plus bisection, with tangential (double) roots and flat V == E
/// stretches reported distinctly. Regions between consecutive points are
/// classified by the sign of V(midpoint) - E; flat stretches count as
/// barrier regions (zero velocity there under either force law).
inline TurningPoints find_turning_points(const PotentialSpec& spec, double E) {
  validate(spec);
  if (!std::isfinite(E)) fail(errc::domain, "E must be finite");
  const double lo = spec.domain.lo, hi = spec.domain.hi;
  const double width = hi - lo;
  const double tol_x = 1e-12 * width;
  const int n = detail::kScanCells;

  std::vector<double> gx(static_cast<size_t>(n) + 1);
  std::vector<double> gv(static_cast<size_t>(n) + 1);
  double scale = std::max(std::abs(E), 1.0);
  for (int i = 0; i <= n; ++i) {
    double x = lo + width * i / n;
    gx[static_cast<size_t>(i)] = x;
    gv[static_cast<size_t>(i)] = evaluate(spec, x) - E;
    scale = std::max(scale, std::abs(gv[static_cast<size_t>(i)] + E));
  }
  const double tol_flat = 1e-13 * scale;
  const double tol_tangent = 1e-11 * scale;

  TurningPoints result;
  std::vector<std::pair<double, double>> flat_runs;  // [start, end] with g == 0

  auto is_zero = [&](size_t i) { return std::abs(gv[i]) <= tol_flat; };

  size_t i = 0;
  while (i <= static_cast<size_t>(n)) {
    if (is_zero(i)) {
      size_t j = i;
      while (j + 1 <= static_cast<size_t>(n) && is_zero(j + 1)) ++j;
      if (j > i) {
        // Flat stretch: endpoints become (degenerate) turning points.
        flat_runs.emplace_back(gx[i], gx[j]);
        result.points.push_back({gx[i], true});
        result.points.push_back({gx[j], true});
      } else {
        // Isolated scan point sitting on the level: the neighbors' signs
        // decide between a simple root and a tangency.
        bool tangent = false;
        if (i > 0 && i < static_cast<size_t>(n))
          tangent = (gv[i - 1] < 0.0) == (gv[i + 1] < 0.0);
        result.points.push_back({gx[i], tangent});
      }
      i = j + 1;
      continue;
    }
    if (i < static_cast<size_t>(n) && !is_zero(i + 1)) {
      double a = gx[i], b = gx[i + 1];
      double ga = gv[i], gb = gv[i + 1];
      if ((ga < 0.0) != (gb < 0.0)) {
        result.points.push_back({detail::bisect_sign_change(spec, E, a, b, tol_x), false});
      } else if (i > 0 && !is_zero(i - 1)) {
        // Same-signed neighbors: look for a tangency or a close root pair
        // at a local extremum of g straddling this cell.
        bool below = ga < 0.0;
        double gprev = gv[i - 1];
        bool toward_zero = below ? (gb > ga && ga > gprev) : (gb < ga && ga < gprev);
        if (toward_zero && i + 1 < static_cast<size_t>(n)) {
          double gnext = gv[i + 2 <= static_cast<size_t>(n) ? i + 2 : i + 1];
          if (below ? (gnext < gb) : (gnext > gb)) {
            double xe = detail::extremum_of_abs(spec, E, gx[i - 1], gx[i + 1], below, tol_x);
            double ge = evaluate(spec, xe) - E;
            if (std::abs(ge) <= tol_tangent) {
              result.points.push_back({xe, true});
            } else if ((ge < 0.0) != below) {
              // Extremum crosses the level: two simple roots in this bracket.
              result.points.push_back({detail::bisect_sign_change(spec, E, gx[i - 1], xe, tol_x), false});
              result.points.push_back({detail::bisect_sign_change(spec, E, xe, gx[i + 1], tol_x), false});
            }
          }
        }
      }
    }
    ++i;
  }

  std::sort(result.points.begin(), result.points.end(),
            [](const TurningPoint& a, const TurningPoint& b) { return a.x < b.x; });
  // Merge near-duplicates from adjacent brackets.
  std::vector<TurningPoint> merged;
  for (const auto& p : result.points) {
    if (!merged.empty() && std::abs(p.x - merged.back().x) <= 4.0 * tol_x)
      merged.back().tangential = merged.back().tangential || p.tangential;
    else
      merged.push_back(p);
  }
  result.points = std::move(merged);

  // Region classification between consecutive points.
  std::vector<double> edges{lo};
  for (const auto& p : result.points) edges.push_back(p.x);
  edges.push_back(hi);
  auto in_flat = [&](double a, double b) {
    for (const auto& run : flat_runs)
      if (a >= run.first - tol_x && b <= run.second + tol_x) return true;
    return false;
  };
  for (size_t e = 0; e + 1 < edges.size(); ++e) {
    double a = edges[e], b = edges[e + 1];
    if (!(b > a + tol_x)) continue;
    Region r;
    r.lo = a;
    r.hi = b;
    if (in_flat(a, b)) {
      r.kind = RegionKind::barrier;
    } else {
      double gm = evaluate(spec, 0.5 * (a + b)) - E;
      r.kind = gm <= 0.0 ? RegionKind::normal : RegionKind::barrier;
    }
    result.regions.push_back(r);
  }
  return result;
}

}  // namespace qtun
