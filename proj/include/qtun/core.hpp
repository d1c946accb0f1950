#pragma once

#include <cmath>
#include <string>

#include "qtun/errors.hpp"

namespace qtun {

/// Classification of an interval of the real line relative to a particle of
/// total energy E. The two kinds select different energy functions, force
/// laws and quantization rules throughout the toolkit:
///   normal  ("h"): E >= V, kinetic term +m v^2/2, force -dV/dx
///   barrier ("H"): E <= V, kinetic term -m v^2/2, force +dV/dx
enum class RegionKind { normal, barrier };

inline const char* region_tag(RegionKind k) { return k == RegionKind::normal ? "h" : "H"; }

inline RegionKind region_from_tag(const std::string& tag) {
  if (tag == "h" || tag == "normal") return RegionKind::normal;
  if (tag == "H" || tag == "barrier") return RegionKind::barrier;
  fail(errc::bad_config, "unknown region tag '" + tag + "' (expected \"h\" or \"H\")");
}

/// +1 for the normal region (kinetic headroom E - V), -1 for the barrier
/// region (headroom V - E). Multiplying (E - V) by this sign gives the
/// quantity that must stay nonnegative along a classically allowed path.
inline double region_sign(RegionKind k) { return k == RegionKind::normal ? 1.0 : -1.0; }

enum class ScatteringMethod { transfer_matrix, numerov, wkb_primitive };

inline const char* method_name(ScatteringMethod m) {
  switch (m) {
    case ScatteringMethod::transfer_matrix: return "transfer_matrix";
    case ScatteringMethod::numerov: return "numerov";
    case ScatteringMethod::wkb_primitive: return "wkb-primitive";
  }
  return "unknown";
}

/// Transmission/reflection result shared by the exact solvers and the WKB
/// estimate. Fields that a given method does not produce stay NaN/0.
struct ScatteringResult {
  double E = 0.0;
  double T = 0.0;
  double R = 0.0;
  ScatteringMethod method = ScatteringMethod::transfer_matrix;
  int grid_n = 0;                  // segment/sample count (exact methods)
  double richardson_defect = 0.0;  // |T(n) - T(2n)| (exact methods)
  double S = std::nan("");         // barrier action (WKB)
  double hbar = std::nan("");      // hbar used (WKB)
};

}  // namespace qtun
