#pragma once

#include <charconv>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtun/core.hpp"
#include "qtun/dynamics.hpp"
#include "qtun/errors.hpp"
#include "qtun/operators.hpp"
#include "qtun/potential.hpp"
#include "qtun/wkb.hpp"

namespace qtun {

using json = nlohmann::json;

/// Shortest representation that round-trips (never more than 17 significant
/// digits). All CSV output goes through here so reruns are byte-identical.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// PotentialSpec <-> JSON:  {"family": ..., "params": {...}, "domain": [lo, hi]}
// ---------------------------------------------------------------------------

inline json to_json(const PotentialSpec& spec) {
  json params;
  struct Visitor {
    json& params;
    void operator()(const SquareBarrier& p) const {
      params = {{"V0", p.V0}, {"width", p.width}, {"center", p.center}};
    }
    void operator()(const ParabolicBarrier& p) const {
      params = {{"V0", p.V0}, {"k", p.k}, {"center", p.center}};
    }
    void operator()(const HarmonicWell& p) const {
      params = {{"k", p.k}, {"center", p.center}, {"floor", p.floor}};
    }
    void operator()(const Eckart& p) const {
      params = {{"V0", p.V0}, {"a", p.a}, {"center", p.center}};
    }
    void operator()(const GaussianBarrier& p) const {
      params = {{"V0", p.V0}, {"sigma", p.sigma}, {"center", p.center}};
    }
    void operator()(const PiecewiseLinear& p) const {
      params = {{"x", p.xs}, {"V", p.vs}};
    }
    void operator()(const Tabulated& p) const { params = {{"x", p.xs}, {"V", p.vs}}; }
  };
  std::visit(Visitor{params}, spec.profile);
  return json{{"family", family_name(spec.profile)},
              {"params", params},
              {"domain", {spec.domain.lo, spec.domain.hi}}};
}

namespace detail {

inline double require_number(const json& params, const char* key) {
  if (!params.contains(key) || !params[key].is_number())
    fail(errc::bad_config, std::string("missing numeric parameter '") + key + "'");
  return params[key].get<double>();
}

inline double optional_number(const json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number())
    fail(errc::bad_config, std::string("parameter '") + key + "' must be a number");
  return params[key].get<double>();
}

inline std::vector<double> require_array(const json& params, const char* key) {
  if (!params.contains(key) || !params[key].is_array())
    fail(errc::bad_config, std::string("missing array parameter '") + key + "'");
  return params[key].get<std::vector<double>>();
}

}  // namespace detail

inline PotentialSpec potential_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    fail(errc::bad_config, "potential needs a \"family\" string");
  if (!j.contains("domain") || !j["domain"].is_array() || j["domain"].size() != 2)
    fail(errc::bad_config, "potential needs a two-element \"domain\" array");
  const json params = j.value("params", json::object());
  const std::string family = j["family"].get<std::string>();

  PotentialSpec spec;
  spec.domain = {j["domain"][0].get<double>(), j["domain"][1].get<double>()};
  using detail::optional_number;
  using detail::require_array;
  using detail::require_number;
  if (family == "square_barrier") {
    spec.profile = SquareBarrier{require_number(params, "V0"), require_number(params, "width"),
                                 optional_number(params, "center", 0.0)};
  } else if (family == "parabolic_barrier") {
    spec.profile = ParabolicBarrier{require_number(params, "V0"), require_number(params, "k"),
                                    optional_number(params, "center", 0.0)};
  } else if (family == "harmonic_well") {
    spec.profile = HarmonicWell{require_number(params, "k"), optional_number(params, "center", 0.0),
                                optional_number(params, "floor", 0.0)};
  } else if (family == "eckart") {
    spec.profile = Eckart{require_number(params, "V0"), require_number(params, "a"),
                          optional_number(params, "center", 0.0)};
  } else if (family == "gaussian_barrier") {
    spec.profile = GaussianBarrier{require_number(params, "V0"), require_number(params, "sigma"),
                                   optional_number(params, "center", 0.0)};
  } else if (family == "piecewise_linear") {
    spec.profile = PiecewiseLinear{require_array(params, "x"), require_array(params, "V")};
  } else if (family == "tabulated") {
    spec.profile = Tabulated{require_array(params, "x"), require_array(params, "V")};
  } else {
    fail(errc::bad_config, "unknown potential family '" + family + "'");
  }
  try {
    validate(spec);
  } catch (const error& e) {
    fail(errc::bad_config, e.what());
  }
  return spec;
}

// ---------------------------------------------------------------------------
// CSV / JSON exports
// ---------------------------------------------------------------------------

inline std::string csv_row(const std::vector<double>& values) {
  std::string row;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_double(values[i]);
  }
  row += '\n';
  return row;
}

inline std::string trajectory_csv(const Trajectory& traj, const PotentialSpec& spec) {
  std::string out = "t,x,v,energy_defect\n";
  for (const auto& s : traj.samples) {
    double defect = detail::energy_defect(traj.region, spec, s);
    out += csv_row({s.t, s.x, s.v, defect});
  }
  return out;
}

inline std::string wkb_profile_csv(const WkbProfile& prof) {
  std::string out = "x,amplitude,phase\n";
  for (size_t i = 0; i < prof.xs.size(); ++i)
    out += csv_row({prof.xs[i], prof.amplitude[i], prof.phase[i]});
  return out;
}

inline json to_json(const HalfPeriodResult& hp) {
  return json{{"schema", 1},
              {"value", hp.value},
              {"quadrature_error", hp.quadrature_error},
              {"method", hp.method}};
}

inline json to_json(const ScatteringResult& res) {
  json j{{"E", res.E}, {"T", res.T}, {"R", res.R}, {"method", method_name(res.method)}};
  if (res.method == ScatteringMethod::wkb_primitive) {
    j["S"] = res.S;
    j["hbar"] = res.hbar;
  } else {
    j["grid_n"] = res.grid_n;
    j["richardson_defect"] = res.richardson_defect;
  }
  return j;
}

inline json to_json(const DefectReport& rep) {
  json j{{"rep", rep_name(rep.rep)}, {"grid_n", rep.grid_n}, {"defect", rep.defect}};
  if (std::isnan(rep.convergence_order_estimate))
    j["convergence_order_estimate"] = nullptr;
  else
    j["convergence_order_estimate"] = rep.convergence_order_estimate;
  return j;
}

inline json to_json(const TurningPoints& tp) {
  json points = json::array();
  for (const auto& p : tp.points) points.push_back({{"x", p.x}, {"tangential", p.tangential}});
  json regions = json::array();
  for (const auto& r : tp.regions)
    regions.push_back({{"lo", r.lo}, {"hi", r.hi}, {"kind", region_tag(r.kind)}});
  return json{{"points", points}, {"regions", regions}};
}

}  // namespace qtun
