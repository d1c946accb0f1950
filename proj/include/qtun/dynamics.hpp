#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qtun/core.hpp"
#include "qtun/errors.hpp"
#include "qtun/potential.hpp"
#include "qtun/quadrature.hpp"

namespace qtun {

// ---------------------------------------------------------------------------
// Real-time classical dynamics in both representations.
//
// Normal region:  E = +m v^2/2 + V,  m x'' = -dV/dx
// Barrier region: E = -m v^2/2 + V,  m x'' = +dV/dx
// Both force laws run in ordinary real time; the barrier case is Newtonian
// motion in the inverted potential.
// ---------------------------------------------------------------------------

struct ParticleState {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
  double m0 = 1.0;
  double E = 0.0;
};

enum class StopReason { reached_t_end, turning_point };

struct Trajectory {
  std::vector<ParticleState> samples;
  RegionKind region = RegionKind::normal;
  double energy_drift = 0.0;  // max |region energy function - E| over samples
  StopReason stop = StopReason::reached_t_end;
};

/// Velocity-Verlet drift bound: along a trajectory the region energy function
/// stays within kEnergyDriftCoeff * dt^2 of E (empirical constant, frozen by
/// the test suite); integrate_trajectory aborts at 100x that bound.
constexpr double kEnergyDriftCoeff = 1.0;

/// Stopping threshold on the energy-derived speed near a turning point.
constexpr double kTurningSpeedStop = 1e-8;

namespace detail {

// Signed kinetic headroom: the quantity 2*(E - V)/m0 (normal) or
// 2*(V - E)/m0 (barrier) whose square root is the local speed.
inline double kinetic_headroom(RegionKind region, const PotentialSpec& spec, double E, double x,
                               double m0) {
  double diff = E - evaluate(spec, x);
  return 2.0 * region_sign(region) * diff / m0;
}

inline double potential_slope(const PotentialSpec& spec, double x, double nudge) {
  return derivative_nudged(spec, x, nudge);
}

inline double energy_defect(RegionKind region, const PotentialSpec& spec, const ParticleState& s) {
  double kinetic = 0.5 * s.m0 * s.v * s.v;
  return std::abs(region_sign(region) * kinetic + evaluate(spec, s.x) - s.E);
}

}  // namespace detail

/// Speed from the region energy relation, |v| = sqrt(2 (+/-)(E - V)/m0).
/// Throws region-mismatch when the point lies on the wrong side of the
/// turning point for the stated kind.
inline double speed_from_energy(RegionKind region, const PotentialSpec& spec, double E, double x,
                                double m0) {
  if (!(m0 > 0.0)) fail(errc::domain, "m0 must be positive");
  double h2 = detail::kinetic_headroom(region, spec, E, x, m0);
  if (h2 < 0.0)
    fail(errc::region_mismatch, std::string("point classified as ") + region_tag(region) +
                                    "-region but the energy relation gives imaginary speed");
  return std::sqrt(h2);
}

/// Velocity-Verlet integration of the region force law in real time.
/// Halts early (StopReason::turning_point) once the particle brackets a
/// turning point, appending a terminal sample on the point itself with the
/// energy-consistent arrival speed (zero for a smooth turning point, finite
/// for a potential wall).
inline Trajectory integrate_trajectory(RegionKind region, const PotentialSpec& spec,
                                       const ParticleState& state0, double t_end, double dt,
                                       int record_stride = 1) {
  if (!(dt > 0.0)) fail(errc::domain, "dt must be positive");
  if (!(state0.m0 > 0.0)) fail(errc::domain, "m0 must be positive");
  if (record_stride < 1) record_stride = 1;

  const double tol_cons = kEnergyDriftCoeff * dt * dt;
  const double force_sign = -region_sign(region);  // -dV/dx normal, +dV/dx barrier
  const double nudge = 1e-12 * spec.domain.width();

  if (detail::energy_defect(region, spec, state0) > std::max(tol_cons, 1e-12))
    fail(errc::region_mismatch, "initial state violates the region energy relation");

  Trajectory traj;
  traj.region = region;
  traj.samples.push_back(state0);
  traj.energy_drift = detail::energy_defect(region, spec, state0);

  double t = state0.t;
  double x = state0.x;
  double v = state0.v;
  double a = force_sign * detail::potential_slope(spec, x, nudge) / state0.m0;
  const long steps = std::lround(std::ceil((t_end - state0.t) / dt - 1e-9));

  auto record = [&](double ts, double xs, double vs) {
    ParticleState s{ts, xs, vs, state0.m0, state0.E};
    traj.energy_drift = std::max(traj.energy_drift, detail::energy_defect(region, spec, s));
    traj.samples.push_back(s);
    if (traj.energy_drift > 100.0 * tol_cons)
      fail(errc::step_size, "energy drift exceeded 100x the dt^2 bound; reduce dt");
  };

  for (long step = 1; step <= steps; ++step) {
    double v_half = v + 0.5 * dt * a;
    double x_new = x + dt * v_half;
    double a_new = force_sign * detail::potential_slope(spec, x_new, nudge) / state0.m0;
    double v_new = v_half + 0.5 * dt * a_new;
    double t_new = state0.t + dt * static_cast<double>(step);

    double headroom = detail::kinetic_headroom(region, spec, state0.E, x_new, state0.m0);
    if (headroom < 0.0) {
      // Stepped past the region boundary (a potential wall, or a smooth
      // turning point overshot by a hair): bisect the headroom root within
      // [x, x_new], keeping the classically allowed side.
      double in = x, out = x_new;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (in + out);
        if (detail::kinetic_headroom(region, spec, state0.E, mid, state0.m0) >= 0.0)
          in = mid;
        else
          out = mid;
      }
      double x_star = in;
      double d = x_star - x;
      double arrive_speed = std::sqrt(std::max(
          detail::kinetic_headroom(region, spec, state0.E, x_star, state0.m0), 0.0));
      // Arrival time from the local constant-force model. A near-zero
      // energy-consistent speed at x* means a continuous turning point: the
      // arrival event is the velocity zero. A finite speed means a potential
      // wall: the event is the first crossing.
      double tau;
      if (arrive_speed < 0.5 * std::abs(v) && std::abs(a) > 1e-300) {
        tau = std::abs(v) / std::abs(a);
      } else {
        double disc = v * v + 2.0 * a * d;
        if (std::abs(a) < 1e-300 || disc < 0.0)
          tau = (v != 0.0) ? d / v : 0.5 * dt;
        else
          tau = 2.0 * d / (v + std::copysign(std::sqrt(disc), v));
      }
      tau = std::clamp(tau, 0.0, dt);
      if (tau > 0.0) record(t + tau, x_star, std::copysign(arrive_speed, d == 0.0 ? v : d));
      traj.stop = StopReason::turning_point;
      return traj;
    }

    // Smooth turning point: the discrete orbit reverses without leaving the
    // allowed zone, so arrival shows up as a velocity sign flip at a speed
    // consistent with one step of deceleration.
    bool flipped = (v != 0.0) && (v * v_new <= 0.0);
    bool slow = std::abs(v) <= 2.0 * (std::abs(a) + std::abs(a_new)) * dt + kTurningSpeedStop;
    if (flipped && slow) {
      double tau = dt * v / (v - v_new);  // linear-in-time zero of the velocity
      tau = std::clamp(tau, 0.0, dt);
      // Newton refinement of the headroom zero ahead of the reversal point.
      double x_star = x + v * tau + 0.5 * a * tau * tau;
      for (int it = 0; it < 6; ++it) {
        double g = detail::kinetic_headroom(region, spec, state0.E, x_star, state0.m0);
        double gp = 2.0 * force_sign * detail::potential_slope(spec, x_star, nudge) / state0.m0;
        if (std::abs(gp) < 1e-300) break;
        double next = x_star - g / gp;
        if (std::abs(next - x_star) > std::abs(v) * dt + std::abs(a) * dt * dt) break;
        x_star = next;
      }
      if (tau > 0.0) record(t + tau, x_star, 0.0);
      traj.stop = StopReason::turning_point;
      return traj;
    }

    t = t_new;
    x = x_new;
    v = v_new;
    a = a_new;
    if (step % record_stride == 0 || step == steps) record(t, x, v);

    // Asymptotic-approach stop per the v_stop threshold: energy speed
    // negligible and the force pointing back into the region.
    double speed_here = std::sqrt(std::max(headroom, 0.0));
    if (speed_here < kTurningSpeedStop && std::abs(v) < kTurningSpeedStop &&
        step > 1 && a * v <= 0.0) {
      traj.stop = StopReason::turning_point;
      return traj;
    }
  }
  traj.stop = StopReason::reached_t_end;
  return traj;
}

struct HalfPeriodResult {
  double value = 0.0;
  double quadrature_error = 0.0;  // relative, from order doubling
  std::string method = "gauss-legendre-sin2";
};

namespace detail {

// Endpoint behavior of the headroom f at a region boundary: approximately
// f ~ C (x-a)^nu locally. nu ~ 1-> simple turning point, nu >= ~2 ->
// tangential (divergent period); f(endpoint) > 0 means a potential wall and
// no singularity at all. The flat case f == 0 nearby is also divergent.
inline void check_endpoint(RegionKind region, const PotentialSpec& spec, double E, double m0,
                           double endpoint, double inward, double width, double f_scale) {
  double h = 1e-7 * width * inward;
  double f1 = kinetic_headroom(region, spec, E, endpoint + h, m0);
  double f2 = kinetic_headroom(region, spec, E, endpoint + 2.0 * h, m0);
  if (f1 < 0.0 || f2 < 0.0)
    fail(errc::region_mismatch, "integrand sign violation next to an endpoint");
  if (f_scale <= 0.0) fail(errc::divergent_period, "V = E over the whole interval");
  if (f1 >= 1e-3 * f_scale) return;  // regular endpoint (wall-like), no singularity
  if (f1 == 0.0) fail(errc::divergent_period, "flat V = E contact at an endpoint");
  double nu = std::log2(f2 / f1);
  if (nu > 1.5)
    fail(errc::divergent_period, "tangential turning point: the period integral diverges");
}

}  // namespace detail

/// Half-period of the oscillation between consecutive turning points a < b,
/// T = sqrt(m0/2) * Int_a^b dx / sqrt(+/-(E - V)). The inverse-square-root
/// endpoint singularities are absorbed by the sin^2 substitution and the
/// integral evaluated with Gauss-Legendre at orders 64 and 128; the order
/// difference provides the error estimate.
inline HalfPeriodResult half_period(RegionKind region, const PotentialSpec& spec, double E,
                                    double m0, double a, double b) {
  if (!(m0 > 0.0)) fail(errc::domain, "m0 must be positive");
  if (!(a < b)) fail(errc::domain, "need a < b");

  // Coarse interior scan for the scale of f and sign violations.
  double f_scale = 0.0;
  for (int i = 1; i < 64; ++i) {
    double x = a + (b - a) * i / 64.0;
    double f = detail::kinetic_headroom(region, spec, E, x, m0);
    if (f < -1e-12 * std::max(std::abs(E), 1.0))
      fail(errc::region_mismatch, "integrand sign violation inside (a, b)");
    f_scale = std::max(f_scale, f);
  }
  detail::check_endpoint(region, spec, E, m0, a, +1.0, b - a, f_scale);
  detail::check_endpoint(region, spec, E, m0, b, -1.0, b - a, f_scale);

  auto integrand = [&](double x) {
    double f = detail::kinetic_headroom(region, spec, E, x, m0);
    return 1.0 / std::sqrt(std::max(f, 1e-300));
  };
  auto q = estimate_endpoint_singular(integrand, a, b, 64);
  return {q.value, q.rel_error};
}

struct RoundtripReport {
  double ode_time = 0.0;         // Verlet traversal time between the endpoints
  double quadrature_time = 0.0;  // half-period integral
  double relative_difference = 0.0;
  double energy_drift = 0.0;
  double dt = 0.0;
};

namespace detail {

// Tightest classically-allowed point next to a region boundary, bisected to
// machine precision so a traversal started there loses no measurable time.
inline double refine_boundary_inside(RegionKind region, const PotentialSpec& spec, double E,
                                     double m0, double boundary, double inward, double width) {
  double pad = 1e-9 * width;
  double in = boundary + inward * pad;
  double out = boundary - inward * pad;
  if (kinetic_headroom(region, spec, E, in, m0) < 0.0)
    fail(errc::region_mismatch, "no classically allowed side at the reported turning point");
  if (kinetic_headroom(region, spec, E, out, m0) >= 0.0) return out;  // boundary is a wall edge
  for (int it = 0; it < 200 && in != out; ++it) {
    double mid = 0.5 * (in + out);
    if (mid == in || mid == out) break;
    if (kinetic_headroom(region, spec, E, mid, m0) >= 0.0)
      in = mid;
    else
      out = mid;
  }
  return in;
}

}  // namespace detail

/// Cross-validates the trajectory ODE against the half-period quadrature on
/// the (unique) bounded region of the given kind: integrate one traversal
/// from the left turning point and compare the arrival time with the
/// quadrature value.
inline RoundtripReport roundtrip_consistency(RegionKind region, const PotentialSpec& spec,
                                             double E, double m0, double dt = 1e-4) {
  auto tp = find_turning_points(spec, E);
  const Region* target = nullptr;
  for (const auto& r : tp.regions) {
    bool lo_is_tp = false, hi_is_tp = false;
    for (const auto& p : tp.points) {
      if (std::abs(p.x - r.lo) <= 1e-9 * spec.domain.width()) lo_is_tp = true;
      if (std::abs(p.x - r.hi) <= 1e-9 * spec.domain.width()) hi_is_tp = true;
    }
    if (r.kind == region && lo_is_tp && hi_is_tp) {
      if (target) fail(errc::domain, "several bounded regions of this kind; ambiguous");
      target = &r;
    }
  }
  if (!target) fail(errc::domain, "no region of the requested kind bounded by two turning points");

  auto hp = half_period(region, spec, E, m0, target->lo, target->hi);

  double width = spec.domain.width();
  double x0 = detail::refine_boundary_inside(region, spec, E, m0, target->lo, +1.0, width);
  double v0 = speed_from_energy(region, spec, E, x0, m0);
  ParticleState s0{0.0, x0, v0, m0, E};
  double t_max = 4.0 * hp.value;
  auto traj = integrate_trajectory(region, spec, s0, t_max, dt);
  if (traj.stop != StopReason::turning_point)
    fail(errc::numerical_failure, "traversal did not terminate on a turning point");

  RoundtripReport rep;
  rep.ode_time = traj.samples.back().t;
  rep.quadrature_time = hp.value;
  rep.relative_difference = std::abs(rep.ode_time - rep.quadrature_time) /
                            std::max(std::abs(rep.quadrature_time), 1e-300);
  rep.energy_drift = traj.energy_drift;
  rep.dt = dt;
  return rep;
}

}  // namespace qtun
