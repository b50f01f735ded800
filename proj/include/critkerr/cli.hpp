#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critkerr/correlations.hpp"
#include "critkerr/model.hpp"

namespace critkerr::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 1,
  kNumericalFailure = 2,
  kPartial = 3,
};

/// Frequency string "<value>[unit]" to natural units. Units: Hz, kHz, MHz
/// (ordinary frequency, divided by omega_b_hz) or wb / none (already natural).
/// Any other suffix is rejected as ambiguous.
double parse_frequency(std::string_view text, double omega_b_hz);

/// Mechanical reference omega_b / 2 pi in Hz; a unit is mandatory.
double parse_reference(std::string_view text);

/// Phase in radians from "pi/2", "2pi/3", "3*pi/4", "1.5708", ...
double parse_phase(std::string_view text);

/// Hz per emitted unit for "Hz", "kHz", "MHz"; 0 for natural units "wb".
double unit_hz(std::string_view unit);

struct SweepAxis {
  std::string variable;  // G, delta-c, dG (G_cp - G), kappa-minus
  double start = 0.0;
  double stop = 1.0;
  int steps = 2;
  bool log = false;

  std::vector<double> values() const;
};

/// Fully resolved run description, all frequencies in natural units.
struct RunConfig {
  std::string command;
  SystemParams params;
  double omega_b_hz = 1.0e7;
  double G = 0.5;
  double Delta_c = 1.251;
  std::optional<double> Delta_a;  // empty: resonant with the Kerr shift, Delta_a = eta
  double epsilon_a = 1.0e-3;
  double kappa_minus = 0.05;
  double kappa_plus = 0.05;
  double divergence_floor = 1e-8;
  double weak_threshold = 1e-2;
  double linearize_tol = 1e-12;
  QuadratureConfig quad;

  double upsilon = 2.0;
  int n_period = 1;
  int n_trunc = 40;
  int q_max = 12;
  std::optional<double> theta_K;
  bool include_zeta_plus = false;
  double regime_tolerance = 1e-3;

  double extent = 0.0;  // 0: |Upsilon| sqrt 2 + 4
  int grid_steps = 161;

  std::string sweep_mode = "kerr";
  SweepAxis axis;
  std::optional<SweepAxis> axis2;

  std::string out_dir = ".";
  bool write_files = true;
  std::string emit_units = "wb";
  unsigned workers = 1;

  std::string provenance;  // resolved configuration, config-file syntax
  std::string replay_file;
};

/// Validates cross-field constraints; throws Error(ConfigError).
void validate(const RunConfig& cfg);

/// Executes one resolved command and returns its exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses arguments (without the program name) and runs them.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lines of an emitted data file with its first (timestamp) line removed.
std::string strip_timestamp(const std::string& content);

}  // namespace critkerr::cli
