#pragma once

#include <stdexcept>
#include <string>

namespace qtun {

/// Error categories surfaced by the toolkit. The CLI prints the name on
/// stderr and maps the category to its exit status.
enum class errc {
  domain,                    // argument outside the valid domain
  non_differentiable,        // derivative requested at a breakpoint
  region_mismatch,           // point/state inconsistent with the stated region
  step_size,                 // integrator energy drift exceeded the bound
  divergent_period,          // tangential turning point, infinite period
  turning_point_divergence,  // WKB sample too close to a turning point
  no_barrier,                // no classically forbidden interval at this E
  no_propagating_channel,    // E below an asymptotic potential level
  numerical_failure,         // internal consistency check failed
  boundary_condition,        // test function does not vanish at the grid ends
  bad_config                 // malformed CLI/scan configuration
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::domain: return "domain";
    case errc::non_differentiable: return "non-differentiable";
    case errc::region_mismatch: return "region-mismatch";
    case errc::step_size: return "step-size";
    case errc::divergent_period: return "divergent-period";
    case errc::turning_point_divergence: return "turning-point-divergence";
    case errc::no_barrier: return "no-barrier";
    case errc::no_propagating_channel: return "no-propagating-channel";
    case errc::numerical_failure: return "numerical-failure";
    case errc::boundary_condition: return "boundary-condition";
    case errc::bad_config: return "bad-config";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace qtun
