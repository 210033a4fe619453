#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spinbath/bath_model.hpp"
#include "spinbath/exact_propagator.hpp"

namespace spinbath {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg)
      : std::runtime_error("config line " + std::to_string(line_) + ": " + msg),
        line(line_) {}
};

// Everything a run needs: the physical model plus solver/estimator knobs.
struct RunConfig {
  ModelConfig model;
  int grid_n = 100;
  MomentMethod moment_method = MomentMethod::stochastic;
  int moment_probes = 2000;
  double moment_max_stderr = 0.0;  // 0 = no check
  CConvention c_convention = CConvention::centered;
  int sample_every = 10;
  int threads = 0;
  bool allow_large = false;  // CLI flag, not a file key

  RunOptions run_options() const;
  MomentOptions moment_options() const;
};

// Plain-text `key = value` lines, `#` comments, UTF-8. Unknown or duplicate
// keys are rejected with the offending line number; missing keys keep the
// model defaults. pulse_width and omega_laser, when not given, derive from
// the resolved values (.325 a^2 and omega_eg - omega_p).
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config_file(const std::string& path);

// Ordered key/value snapshot sufficient to reproduce the run; written as the
// commented CSV preamble.
std::vector<std::pair<std::string, std::string>> manifest_entries(
    const RunConfig& cfg, const std::string& engine);

}  // namespace spinbath
