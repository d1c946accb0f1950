// qtun: command-line front end for the tunneling toolkit.
//
// One subcommand per quantity; a JSON config file is the single source of
// truth, with repeatable --set key=value overrides (dotted paths). Scan rows
// are computed concurrently up to --jobs and written in sweep order, so a
// given config always produces byte-identical output.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qtun/qtun.hpp"

namespace {

using qtun::json;

struct CliOptions {
  std::string quantity;
  std::string config_path;
  std::vector<std::string> sets;
  std::string output;  // overrides config output.path
  std::string format;  // overrides config output.format
  int jobs = 1;
};

json parse_set_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return json(text);  // bare strings stay strings
  }
}

void apply_set(json& config, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    qtun::fail(qtun::errc::bad_config, "--set expects key=value, got '" + kv + "'");
  std::string path = kv.substr(0, eq);
  json value = parse_set_value(kv.substr(eq + 1));
  json* node = &config;
  size_t start = 0;
  while (true) {
    size_t dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) qtun::fail(qtun::errc::bad_config, "empty key in --set path '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

// Typed access to the "constants" object.
struct Constants {
  const json& c;

  double number(const char* key, std::optional<double> fallback = {}) const {
    if (!c.contains(key)) {
      if (fallback) return *fallback;
      qtun::fail(qtun::errc::bad_config, std::string("missing constant '") + key + "'");
    }
    if (!c[key].is_number())
      qtun::fail(qtun::errc::bad_config, std::string("constant '") + key + "' must be a number");
    return c[key].get<double>();
  }
  std::string text(const char* key, const std::string& fallback) const {
    if (!c.contains(key)) return fallback;
    if (!c[key].is_string())
      qtun::fail(qtun::errc::bad_config, std::string("constant '") + key + "' must be a string");
    return c[key].get<std::string>();
  }
};

struct Sweep {
  std::string parameter = "E";
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  bool log_spacing = false;

  double value(int i) const {
    if (count == 1) return start;
    double t = static_cast<double>(i) / (count - 1);
    if (log_spacing) return start * std::pow(stop / start, t);
    return start + (stop - start) * t;
  }
};

Sweep parse_sweep(const json& config, const std::string& default_param) {
  Sweep s;
  s.parameter = default_param;
  if (!config.contains("sweep")) {
    qtun::fail(qtun::errc::bad_config, "config needs a \"sweep\" object");
  }
  const json& j = config["sweep"];
  if (!j.is_object()) qtun::fail(qtun::errc::bad_config, "\"sweep\" must be an object");
  if (j.contains("parameter")) s.parameter = j["parameter"].get<std::string>();
  if (!j.contains("start") || !j["start"].is_number())
    qtun::fail(qtun::errc::bad_config, "sweep needs a numeric \"start\"");
  s.start = j["start"].get<double>();
  s.stop = j.value("stop", s.start);
  s.count = j.value("count", 1);
  // hbar sweeps span decades; they default to log spacing.
  std::string spacing = j.value("spacing", s.parameter == "hbar" ? std::string("log")
                                                                 : std::string("linear"));
  if (spacing == "log")
    s.log_spacing = true;
  else if (spacing != "linear")
    qtun::fail(qtun::errc::bad_config, "sweep spacing must be \"linear\" or \"log\"");
  if (s.count < 1) qtun::fail(qtun::errc::bad_config, "sweep count must be >= 1");
  if (s.count > 1 && !(s.start < s.stop))
    qtun::fail(qtun::errc::bad_config, "sweep needs start < stop when count > 1");
  if (s.log_spacing && !(s.start > 0.0))
    qtun::fail(qtun::errc::bad_config, "log spacing needs start > 0");
  return s;
}

json constants_with(const json& config, const std::string& key, double value) {
  json c = config.value("constants", json::object());
  c[key] = value;
  return c;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; output order is fixed
// by the caller indexing, so parallel and serial runs emit identical bytes.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Output {
  std::string csv;       // full file body
  json body;             // JSON alternative
};

qtun::RegionKind region_constant(const Constants& k, const char* key = "region") {
  return qtun::region_from_tag(k.text(key, "h"));
}

// ---------------------------------------------------------------------------
// Quantity runners
// ---------------------------------------------------------------------------

Output run_turning_points(const json& config, const qtun::PotentialSpec& spec, const Sweep& sweep,
                          int jobs) {
  std::vector<qtun::TurningPoints> results(static_cast<size_t>(sweep.count));
  std::vector<double> energies(static_cast<size_t>(sweep.count));
  parallel_for(sweep.count, jobs, [&](int i) {
    Constants k{constants_with(config, sweep.parameter, sweep.value(i))};
    energies[static_cast<size_t>(i)] = k.number("E");
    results[static_cast<size_t>(i)] = qtun::find_turning_points(spec, k.number("E"));
  });

  Output out;
  out.csv = "E,x,tangential\n";
  json rows = json::array();
  for (int i = 0; i < sweep.count; ++i) {
    const auto& tp = results[static_cast<size_t>(i)];
    for (const auto& p : tp.points)
      out.csv += qtun::csv_row({energies[static_cast<size_t>(i)], p.x, p.tangential ? 1.0 : 0.0});
    json entry = qtun::to_json(tp);
    entry["E"] = energies[static_cast<size_t>(i)];
    rows.push_back(entry);
  }
  out.body = json{{"schema", 1}, {"quantity", "turning_points"}, {"rows", rows}};
  if (sweep.count == 1) {
    out.body = rows[0];
    out.body["schema"] = 1;
  }
  return out;
}

Output run_trajectory(const json& config, const qtun::PotentialSpec& spec, const Sweep& sweep) {
  if (sweep.count != 1)
    qtun::fail(qtun::errc::bad_config, "trajectory supports only single-point sweeps");
  Constants k{constants_with(config, sweep.parameter, sweep.value(0))};
  auto region = region_constant(k);
  double m0 = k.number("m0", 1.0);
  double x0 = k.number("x0");
  double v0 = k.number("v0");
  double dt = k.number("dt", 1e-4);
  double t_end = k.number("t_end");
  int stride = static_cast<int>(k.number("stride", 1.0));
  double E = qtun::region_sign(region) * 0.5 * m0 * v0 * v0 + qtun::evaluate(spec, x0);

  qtun::ParticleState s0{0.0, x0, v0, m0, E};
  auto traj = qtun::integrate_trajectory(region, spec, s0, t_end, dt, stride);

  Output out;
  out.csv = qtun::trajectory_csv(traj, spec);
  json rows = json::array();
  for (const auto& s : traj.samples)
    rows.push_back({{"t", s.t},
                    {"x", s.x},
                    {"v", s.v},
                    {"energy_defect", qtun::detail::energy_defect(region, spec, s)}});
  out.body = json{{"schema", 1},
                  {"quantity", "trajectory"},
                  {"region", qtun::region_tag(region)},
                  {"E", E},
                  {"energy_drift", traj.energy_drift},
                  {"stopped_on_turning_point", traj.stop == qtun::StopReason::turning_point},
                  {"rows", rows}};
  return out;
}

qtun::HalfPeriodResult period_at(const qtun::PotentialSpec& spec, qtun::RegionKind region,
                                 double E, double m0) {
  auto tp = qtun::find_turning_points(spec, E);
  const qtun::Region* target = nullptr;
  for (const auto& r : tp.regions) {
    bool lo_tp = false, hi_tp = false;
    for (const auto& p : tp.points) {
      if (std::abs(p.x - r.lo) <= 1e-9 * spec.domain.width()) lo_tp = true;
      if (std::abs(p.x - r.hi) <= 1e-9 * spec.domain.width()) hi_tp = true;
    }
    if (r.kind == region && lo_tp && hi_tp) {
      if (target)
        qtun::fail(qtun::errc::bad_config, "several bounded regions of this kind; ambiguous");
      target = &r;
    }
  }
  if (!target)
    qtun::fail(qtun::errc::bad_config, "no bounded region of the requested kind at this energy");
  return qtun::half_period(region, spec, E, m0, target->lo, target->hi);
}

Output run_period(const json& config, const qtun::PotentialSpec& spec, const Sweep& sweep,
                  int jobs) {
  std::vector<qtun::HalfPeriodResult> results(static_cast<size_t>(sweep.count));
  std::vector<double> values(static_cast<size_t>(sweep.count));
  parallel_for(sweep.count, jobs, [&](int i) {
    Constants k{constants_with(config, sweep.parameter, sweep.value(i))};
    values[static_cast<size_t>(i)] = sweep.value(i);
    results[static_cast<size_t>(i)] =
        period_at(spec, region_constant(k), k.number("E"), k.number("m0", 1.0));
  });

  Output out;
  out.csv = sweep.parameter + ",value,quadrature_error\n";
  json rows = json::array();
  for (int i = 0; i < sweep.count; ++i) {
    const auto& hp = results[static_cast<size_t>(i)];
    out.csv += qtun::csv_row({values[static_cast<size_t>(i)], hp.value, hp.quadrature_error});
    json entry = qtun::to_json(hp);
    entry.erase("schema");
    entry[sweep.parameter] = values[static_cast<size_t>(i)];
    rows.push_back(entry);
  }
  if (sweep.count == 1)
    out.body = qtun::to_json(results[0]);
  else
    out.body = json{{"schema", 1}, {"quantity", "period"}, {"rows", rows}};
  return out;
}

Output run_wkb_profile(const json& config, const qtun::PotentialSpec& spec, const Sweep& sweep) {
  if (sweep.count != 1)
    qtun::fail(qtun::errc::bad_config, "wkb-profile supports only single-point sweeps");
  Constants k{constants_with(config, sweep.parameter, sweep.value(0))};
  auto region = region_constant(k);
  double E = k.number("E");
  double m0 = k.number("m0", 1.0);
  double hbar = k.number("hbar", 1.0);
  std::string branch_name = k.text("branch", "decaying");
  if (branch_name != "decaying" && branch_name != "growing")
    qtun::fail(qtun::errc::bad_config, "branch must be \"decaying\" or \"growing\"");
  auto branch = branch_name == "growing" ? qtun::WkbBranch::growing : qtun::WkbBranch::decaying;
  int n = static_cast<int>(k.number("n", 257.0));
  if (n < 2) qtun::fail(qtun::errc::bad_config, "n must be >= 2");

  // Default window: the region containing x_ref, inset by a 1e-3 margin.
  auto tp = qtun::find_turning_points(spec, E);
  const qtun::Region* target = nullptr;
  for (const auto& r : tp.regions)
    if (r.kind == region && !target) target = &r;
  if (k.c.contains("x_ref")) {
    double x_ref = k.number("x_ref");
    for (const auto& r : tp.regions)
      if (r.kind == region && x_ref >= r.lo && x_ref <= r.hi) target = &r;
  }
  if (!target)
    qtun::fail(qtun::errc::bad_config, "no region of the requested kind at this energy");
  double margin = k.number("margin", 1e-3) * (target->hi - target->lo);
  double x_lo = k.number("x_lo", target->lo + margin);
  double x_hi = k.number("x_hi", target->hi - margin);
  double x_ref = k.number("x_ref", 0.5 * (x_lo + x_hi));
  std::vector<double> xs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    xs[static_cast<size_t>(i)] = x_lo + (x_hi - x_lo) * static_cast<double>(i) / (n - 1);

  auto prof = qtun::wkb_profile(region, spec, E, m0, hbar, x_ref, xs, branch);

  Output out;
  out.csv = qtun::wkb_profile_csv(prof);
  json rows = json::array();
  for (size_t i = 0; i < prof.xs.size(); ++i)
    rows.push_back({{"x", prof.xs[i]}, {"amplitude", prof.amplitude[i]}, {"phase", prof.phase[i]}});
  out.body = json{{"schema", 1},
                  {"quantity", "wkb_profile"},
                  {"region", qtun::region_tag(region)},
                  {"branch", branch_name},
                  {"x_ref", prof.x_ref},
                  {"hbar", prof.hbar},
                  {"validity_max", prof.validity_max},
                  {"rows", rows}};
  return out;
}

Output run_transmission_scan(const json& config, const qtun::PotentialSpec& spec,
                             const Sweep& sweep, int jobs) {
  if (sweep.parameter != "E")
    qtun::fail(qtun::errc::bad_config, "transmission-scan sweeps over E");
  struct Row {
    double E, T_exact, R, T_wkb, S, two_S_over_hbar, richardson;
  };
  std::vector<Row> rows(static_cast<size_t>(sweep.count));
  parallel_for(sweep.count, jobs, [&](int i) {
    Constants k{constants_with(config, "E", sweep.value(i))};
    double E = sweep.value(i);
    double m0 = k.number("m0", 1.0);
    double hbar = k.number("hbar", 1.0);
    int grid_n = static_cast<int>(k.number("grid_n", 2048.0));
    auto exact = qtun::exact_transmission(spec, E, m0, hbar, grid_n);
    Row row{E, exact.T, exact.R, std::nan(""), std::nan(""), std::nan(""),
            exact.richardson_defect};
    try {
      auto wkb = qtun::wkb_transmission(spec, E, m0, hbar);
      row.T_wkb = wkb.T;
      row.S = wkb.S;
      row.two_S_over_hbar = 2.0 * wkb.S / hbar;
    } catch (const qtun::error& e) {
      if (e.code() != qtun::errc::no_barrier) throw;  // above the barrier: leave NaNs
    }
    rows[static_cast<size_t>(i)] = row;
  });

  Output out;
  out.csv = "E,T_exact,R,T_wkb,S,2S_over_hbar,richardson_defect\n";
  json jrows = json::array();
  for (const auto& r : rows) {
    out.csv += qtun::csv_row({r.E, r.T_exact, r.R, r.T_wkb, r.S, r.two_S_over_hbar, r.richardson});
    jrows.push_back({{"E", r.E},
                     {"T_exact", r.T_exact},
                     {"R", r.R},
                     {"T_wkb", r.T_wkb},
                     {"S", r.S},
                     {"2S_over_hbar", r.two_S_over_hbar},
                     {"richardson_defect", r.richardson}});
  }
  out.body = json{{"schema", 1}, {"quantity", "transmission_scan"}, {"rows", jrows}};
  return out;
}

Output run_operator_check(const json& config, const Sweep& sweep, int jobs) {
  Constants base{config.value("constants", json::object())};
  std::string rep_name = base.text("rep", "corpuscular");
  if (rep_name != "wave" && rep_name != "corpuscular")
    qtun::fail(qtun::errc::bad_config, "rep must be \"wave\" or \"corpuscular\"");
  auto rep = rep_name == "wave" ? qtun::MomentumRep::wave : qtun::MomentumRep::corpuscular;
  std::string check = base.text("check", "hermiticity");
  if (check != "hermiticity" && check != "commutator")
    qtun::fail(qtun::errc::bad_config, "check must be \"hermiticity\" or \"commutator\"");
  double hbar = base.number("hbar", 1.0);
  double x_lo = base.number("x_lo", -5.0);
  double x_hi = base.number("x_hi", 5.0);
  if (sweep.parameter != "grid_n")
    qtun::fail(qtun::errc::bad_config, "operator-check sweeps over grid_n");

  std::vector<qtun::DefectReport> reports(static_cast<size_t>(sweep.count));
  parallel_for(sweep.count, jobs, [&](int i) {
    size_t n = static_cast<size_t>(std::llround(sweep.value(i)));
    if (n < 8) qtun::fail(qtun::errc::bad_config, "grid_n must be >= 8");
    auto battery = qtun::gaussian_battery(x_lo, x_hi, n);
    if (check == "hermiticity") {
      reports[static_cast<size_t>(i)] =
          qtun::hermiticity_defect(rep, qtun::battery_pairs(battery), hbar);
    } else {
      qtun::DefectReport worst;
      worst.rep = rep;
      worst.grid_n = static_cast<int>(n);
      for (const auto& f : battery) {
        auto r = qtun::commutator_defect(rep, f, hbar);
        worst.defect = std::max(worst.defect, r.defect);
      }
      reports[static_cast<size_t>(i)] = worst;
    }
  });
  for (size_t i = 1; i < reports.size(); ++i)
    reports[i].convergence_order_estimate =
        qtun::convergence_order(reports[i - 1].defect, reports[i].defect);

  Output out;
  out.csv = "grid_n,defect,convergence_order_estimate\n";
  json jrows = json::array();
  for (const auto& r : reports) {
    out.csv += qtun::csv_row({static_cast<double>(r.grid_n), r.defect,
                              r.convergence_order_estimate});
    jrows.push_back(qtun::to_json(r));
  }
  out.body = json{{"schema", 1},
                  {"quantity", "operator_check"},
                  {"rep", rep_name},
                  {"check", check},
                  {"rows", jrows}};
  return out;
}

Output run_mass_transform(const json& config, const Sweep& sweep, int jobs) {
  if (sweep.parameter != "v")
    qtun::fail(qtun::errc::bad_config, "mass-transform sweeps over v");
  struct Row {
    double v, m_wave, m_corp;
  };
  std::vector<Row> rows(static_cast<size_t>(sweep.count));
  parallel_for(sweep.count, jobs, [&](int i) {
    Constants k{constants_with(config, "v", sweep.value(i))};
    double m0 = k.number("m0", 1.0);
    double c = k.number("c", 1.0);
    double v = sweep.value(i);
    rows[static_cast<size_t>(i)] = {v, qtun::mass_transform(qtun::MomentumRep::wave, m0, v, c),
                                    qtun::mass_transform(qtun::MomentumRep::corpuscular, m0, v, c)};
  });

  Output out;
  out.csv = "v,m_wave,m_corpuscular\n";
  json jrows = json::array();
  for (const auto& r : rows) {
    out.csv += qtun::csv_row({r.v, r.m_wave, r.m_corp});
    jrows.push_back({{"v", r.v}, {"m_wave", r.m_wave}, {"m_corpuscular", r.m_corp}});
  }
  out.body = json{{"schema", 1}, {"quantity", "mass_transform"}, {"rows", jrows}};
  return out;
}

int run(const CliOptions& opts) {
  std::ifstream in(opts.config_path);
  if (!in) qtun::fail(qtun::errc::bad_config, "cannot open config '" + opts.config_path + "'");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    qtun::fail(qtun::errc::bad_config, std::string("config is not valid JSON: ") + e.what());
  }
  for (const auto& kv : opts.sets) apply_set(config, kv);

  if (config.contains("quantity") && config["quantity"].get<std::string>() != opts.quantity)
    qtun::fail(qtun::errc::bad_config, "config quantity does not match the subcommand");

  const bool needs_potential = opts.quantity != "operator_check" && opts.quantity != "mass_transform";
  qtun::PotentialSpec spec;
  if (needs_potential) {
    if (!config.contains("potential"))
      qtun::fail(qtun::errc::bad_config, "config needs a \"potential\" object");
    spec = qtun::potential_from_json(config["potential"]);
  }

  std::string default_param = "E";
  if (opts.quantity == "mass_transform") default_param = "v";
  if (opts.quantity == "operator_check") default_param = "grid_n";
  Sweep sweep = parse_sweep(config, default_param);

  Output result;
  if (opts.quantity == "turning_points")
    result = run_turning_points(config, spec, sweep, opts.jobs);
  else if (opts.quantity == "trajectory")
    result = run_trajectory(config, spec, sweep);
  else if (opts.quantity == "period")
    result = run_period(config, spec, sweep, opts.jobs);
  else if (opts.quantity == "wkb_profile")
    result = run_wkb_profile(config, spec, sweep);
  else if (opts.quantity == "transmission_scan")
    result = run_transmission_scan(config, spec, sweep, opts.jobs);
  else if (opts.quantity == "operator_check")
    result = run_operator_check(config, sweep, opts.jobs);
  else if (opts.quantity == "mass_transform")
    result = run_mass_transform(config, sweep, opts.jobs);
  else
    qtun::fail(qtun::errc::bad_config, "unknown quantity '" + opts.quantity + "'");

  std::string format = opts.format;
  if (format.empty() && config.contains("output"))
    format = config["output"].value("format", "csv");
  if (format.empty()) format = "csv";
  if (format != "csv" && format != "json")
    qtun::fail(qtun::errc::bad_config, "format must be csv or json");

  std::string path = opts.output;
  if (path.empty() && config.contains("output")) path = config["output"].value("path", "");

  std::string payload = format == "csv" ? result.csv : result.body.dump(2) + "\n";
  if (path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream outf(path, std::ios::binary);
    if (!outf) qtun::fail(qtun::errc::bad_config, "cannot open output '" + path + "'");
    outf << payload;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D quantum tunneling toolkit"};
  app.require_subcommand(1);

  CliOptions opts;
  struct Sub {
    const char* name;
    const char* quantity;
    const char* help;
  };
  const Sub subs[] = {
      {"turning-points", "turning_points", "locate V(x) = E roots and classify regions"},
      {"trajectory", "trajectory", "integrate a real-time classical trajectory"},
      {"period", "period", "half-period between consecutive turning points"},
      {"wkb-profile", "wkb_profile", "sampled WKB amplitude/phase profile"},
      {"transmission-scan", "transmission_scan", "exact and WKB transmission over an E sweep"},
      {"operator-check", "operator_check", "momentum operator defect battery"},
      {"mass-transform", "mass_transform", "relativistic mass laws of both representations"},
  };
  for (const auto& sub : subs) {
    auto* s = app.add_subcommand(sub.name, sub.help);
    s->add_option("--config", opts.config_path, "JSON config file")->required();
    s->add_option("--set", opts.sets, "override config keys, e.g. --set constants.E=0.5");
    s->add_option("--output", opts.output, "output file (default: config output.path or stdout)");
    s->add_option("--format", opts.format, "csv or json");
    s->add_option("--jobs", opts.jobs, "max concurrent scan rows")->check(CLI::PositiveNumber);
    s->callback([&opts, &sub] { opts.quantity = sub.quantity; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(opts);
  } catch (const qtun::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == qtun::errc::bad_config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
