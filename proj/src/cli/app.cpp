#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "critkerr/cli.hpp"
#include "critkerr/error.hpp"

namespace critkerr::cli {

namespace {

/// Option values as typed; frequencies stay strings until the reference is known.
struct RawOptions {
  std::string omega_b = "10MHz";
  std::string omega_a = "1e6", omega_c = "100", omega_ci = "98.749", epsilon_c = "0";
  std::string g_a = "1e-3", g_c = "1e-3";
  std::string kappa_a = "0.1", kappa_b = "1kHz", kappa_c = "0.127";
  std::string kappa_minus = "500kHz", kappa_plus = "500kHz";
  std::string G = "0.5", delta_c = "1.251", delta_a = "eta", epsilon_a = "1e-3";

  double divergence_floor = 1e-8, weak_threshold = 1e-2, linearize_tol = 1e-12;
  double truncation_c = 12.0, panel_phase = 6.0, rel_tol = 1e-3, abs_tol = 1e-10;
  int quad_order = 12, max_levels = 3;

  double upsilon = 2.0;
  int n_period = 1, n_trunc = 40, q_max = 12;
  std::string theta_k;
  bool include_zeta_plus = false;
  double regime_tolerance = 1e-3;

  double extent = 0.0;
  int grid_steps = 161;

  std::string mode = "kerr", var = "G", from = "0", to = "0.559", scale = "lin";
  int steps = 50;
  std::string var2, from2 = "0", to2 = "1", scale2 = "lin";
  int steps2 = 0;

  std::string out = ".", units = "wb";
  bool no_write = false;
  unsigned workers = 1;
  std::string replay;
};

const std::vector<std::string> kCommands = {"critical", "spectrum", "kerr",   "g2",       "cat",
                                            "wigner",   "sweep",    "oracle", "linearize"};

void add_options(CLI::App& app, RawOptions& r) {
  const char* phys = "Physical parameters (numbers in omega_b units, or with Hz/kHz/MHz)";
  app.add_option("--omega-b", r.omega_b, "mechanical reference omega_b/2pi, with unit")->group(phys);
  app.add_option("--omega-a", r.omega_a, "bare optical frequency")->group(phys);
  app.add_option("--omega-c", r.omega_c, "bare microwave frequency")->group(phys);
  app.add_option("--omega-ci", r.omega_ci, "microwave drive frequency")->group(phys);
  app.add_option("--epsilon-c", r.epsilon_c, "microwave drive amplitude")->group(phys);
  app.add_option("--g-a", r.g_a, "optomechanical coupling")->group(phys);
  app.add_option("--g-c", r.g_c, "electromechanical coupling")->group(phys);
  app.add_option("--kappa-a", r.kappa_a, "optical decay rate")->group(phys);
  app.add_option("--kappa-b", r.kappa_b, "mechanical decay rate")->group(phys);
  app.add_option("--kappa-c", r.kappa_c, "microwave decay rate")->group(phys);
  app.add_option("--kappa-minus", r.kappa_minus, "lower normal-mode decay rate")->group(phys);
  app.add_option("--kappa-plus", r.kappa_plus, "upper normal-mode decay rate")->group(phys);
  app.add_option("--G", r.G, "linearized electromechanical coupling")->group(phys);
  app.add_option("--delta-c", r.delta_c, "effective microwave detuning")->group(phys);
  app.add_option("--delta-a", r.delta_a, "laser detuning, or 'eta' for Delta_a = eta")->group(phys);
  app.add_option("--epsilon-a", r.epsilon_a, "weak optical drive amplitude")->group(phys);

  const char* num = "Numerics";
  app.add_option("--divergence-floor", r.divergence_floor, "minimum (omega_b - 4G^2/Delta_c)/omega_b")->group(num);
  app.add_option("--weak-threshold", r.weak_threshold, "weak-drive warning threshold")->group(num);
  app.add_option("--linearize-tol", r.linearize_tol, "fixed-point residual tolerance")->group(num);
  app.add_option("--truncation-c", r.truncation_c, "g2 domain length in units of 1/kappa_a")->group(num);
  app.add_option("--quad-order", r.quad_order, "Gauss-Legendre points per panel")->group(num);
  app.add_option("--panel-phase", r.panel_phase, "largest phase advance per panel")->group(num);
  app.add_option("--rel-tol", r.rel_tol, "g2 relative tolerance")->group(num);
  app.add_option("--abs-tol", r.abs_tol, "g2 absolute tolerance")->group(num);
  app.add_option("--max-levels", r.max_levels, "panel halvings")->group(num);

  const char* cat = "Cat states and Wigner";
  app.add_option("--upsilon", r.upsilon, "initial coherent amplitude")->group(cat);
  app.add_option("--n-period", r.n_period, "stroboscopic period count n")->group(cat);
  app.add_option("--n-trunc", r.n_trunc, "Fock truncation")->group(cat);
  app.add_option("--q-max", r.q_max, "largest rational denominator")->group(cat);
  app.add_option("--theta-k", r.theta_k, "Kerr phase override, e.g. pi/2 (empty: from G, Delta_c)")->group(cat);
  app.add_flag("--include-zeta-plus", r.include_zeta_plus, "include the fast normal-mode branch")->group(cat);
  app.add_option("--regime-tolerance", r.regime_tolerance, "accepted |n eta/omega_- - p/q| in regime maps")
      ->group(cat);
  app.add_option("--extent", r.extent, "Wigner half-width (0: |Upsilon| sqrt2 + 4)")->group(cat);
  app.add_option("--grid-steps", r.grid_steps, "Wigner points per axis")->group(cat);

  const char* sw = "Sweeps";
  app.add_option("--mode", r.mode, "sweep quantity")->check(CLI::IsMember({"spectrum", "kerr", "g2", "cat"}))->group(sw);
  app.add_option("--var", r.var, "swept variable")->check(CLI::IsMember({"G", "delta-c", "dG", "kappa-minus"}))->group(sw);
  app.add_option("--from", r.from, "start value")->group(sw);
  app.add_option("--to", r.to, "stop value")->group(sw);
  app.add_option("--steps", r.steps, "number of points")->group(sw);
  app.add_option("--scale", r.scale, "lin or log")->check(CLI::IsMember({"lin", "log"}))->group(sw);
  app.add_option("--var2", r.var2, "second swept variable (2-D map)")
      ->check(CLI::IsMember({"", "G", "delta-c", "dG", "kappa-minus"}))
      ->group(sw);
  app.add_option("--from2", r.from2, "second axis start")->group(sw);
  app.add_option("--to2", r.to2, "second axis stop")->group(sw);
  app.add_option("--steps2", r.steps2, "second axis points")->group(sw);
  app.add_option("--scale2", r.scale2, "lin or log")->check(CLI::IsMember({"lin", "log"}))->group(sw);

  const char* io = "Output";
  app.add_option("--units", r.units, "emitted frequency unit: wb, Hz, kHz, MHz")
      ->check(CLI::IsMember({"wb", "Hz", "kHz", "MHz"}))
      ->group(io);
  app.add_option("--out", r.out, "output directory")->configurable(false)->group(io);
  app.add_flag("--no-write", r.no_write, "print results without writing files")->configurable(false)->group(io);
  app.add_option("--workers", r.workers, "worker threads")->configurable(false)->check(CLI::PositiveNumber)->group(io);
}

RunConfig resolve(const RawOptions& r, const std::string& command) {
  RunConfig c;
  c.command = command;
  c.omega_b_hz = parse_reference(r.omega_b);
  auto f = [&](const std::string& s) { return parse_frequency(s, c.omega_b_hz); };
  c.params.omega_b = 1.0;
  c.params.omega_a = f(r.omega_a);
  c.params.omega_c = f(r.omega_c);
  c.params.omega_ci = f(r.omega_ci);
  c.params.epsilon_c = f(r.epsilon_c);
  c.params.g_a = f(r.g_a);
  c.params.g_c = f(r.g_c);
  c.params.kappa_a = f(r.kappa_a);
  c.params.kappa_b = f(r.kappa_b);
  c.params.kappa_c = f(r.kappa_c);
  c.kappa_minus = f(r.kappa_minus);
  c.kappa_plus = f(r.kappa_plus);
  c.G = f(r.G);
  c.Delta_c = f(r.delta_c);
  if (r.delta_a != "eta") c.Delta_a = f(r.delta_a);
  c.epsilon_a = f(r.epsilon_a);

  c.divergence_floor = r.divergence_floor;
  c.weak_threshold = r.weak_threshold;
  c.linearize_tol = r.linearize_tol;
  c.quad.truncation_c = r.truncation_c;
  c.quad.order = r.quad_order;
  c.quad.panel_phase = r.panel_phase;
  c.quad.rel_tol = r.rel_tol;
  c.quad.abs_tol = r.abs_tol;
  c.quad.max_levels = r.max_levels;

  c.upsilon = r.upsilon;
  c.n_period = r.n_period;
  c.n_trunc = r.n_trunc;
  c.q_max = r.q_max;
  if (!r.theta_k.empty()) c.theta_K = parse_phase(r.theta_k);
  c.include_zeta_plus = r.include_zeta_plus;
  c.regime_tolerance = r.regime_tolerance;
  c.extent = r.extent;
  c.grid_steps = r.grid_steps;

  c.sweep_mode = r.mode;
  c.axis = {r.var, f(r.from), f(r.to), r.steps, r.scale == "log"};
  if (!r.var2.empty()) c.axis2 = SweepAxis{r.var2, f(r.from2), f(r.to2), r.steps2, r.scale2 == "log"};

  c.out_dir = r.out;
  c.write_files = !r.no_write;
  c.emit_units = r.units;
  c.workers = r.workers;
  c.replay_file = r.replay;
  return c;
}

/// Config text and command recorded in an emitted artifact.
std::pair<std::string, std::string> read_provenance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path);
  std::string command, config, line;
  while (std::getline(in, line)) {
    if (line.rfind("# command: ", 0) == 0) command = line.substr(11);
    else if (line.rfind("#> ", 0) == 0) config += line.substr(3) + "\n";
    else if (!line.empty() && line[0] != '#') break;
  }
  if (command.empty()) throw Error(ErrorKind::ConfigError, path + " has no provenance header");
  return {command, config};
}

}  // namespace

void validate(const RunConfig& cfg) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::ConfigError, m); };
  try {
    cfg.params.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!(cfg.G >= 0.0)) fail("G must be >= 0");
  if (!(cfg.Delta_c > 0.0)) fail("delta-c must be > 0");
  if (!(cfg.kappa_minus > 0.0) || !(cfg.kappa_plus > 0.0)) fail("normal-mode decay rates must be > 0");
  if (!(cfg.epsilon_a > 0.0)) fail("epsilon-a must be > 0");
  if (cfg.n_trunc < 1 || cfg.n_period < 1 || cfg.q_max < 1) fail("n-trunc, n-period and q-max must be >= 1");
  if (cfg.grid_steps < 2) fail("grid-steps must be >= 2");
  if (cfg.quad.order < 2 || cfg.quad.max_levels < 0) fail("quad-order >= 2 and max-levels >= 0 required");
  if (cfg.command == "sweep") {
    auto check_axis = [&](const SweepAxis& a, const std::string& name) {
      if (a.steps < 2) fail(name + ": steps must be >= 2");
      if (!(a.start < a.stop)) fail(name + ": start must be < stop");
      if (a.log && !(a.start > 0.0)) fail(name + ": log scale needs a positive start");
    };
    check_axis(cfg.axis, "var");
    if (cfg.axis2) {
      check_axis(*cfg.axis2, "var2");
      if (cfg.axis2->variable == cfg.axis.variable) fail("var2 must differ from var");
      const bool g1 = cfg.axis.variable == "G" || cfg.axis.variable == "dG";
      const bool g2 = cfg.axis2->variable == "G" || cfg.axis2->variable == "dG";
      if (g1 && g2) fail("G and dG cannot both be swept");
    }
  }
  if (cfg.workers < 1) fail("workers must be >= 1");
}

std::string strip_timestamp(const std::string& content) {
  const std::size_t nl = content.find('\n');
  return nl == std::string::npos ? std::string() : content.substr(nl + 1);
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical electro-optomechanical Kerr simulations", "critkerr"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "parameter file (TOML or INI keys = long option names)");
  app.allow_config_extras(CLI::config_extras_mode::capture);
  app.require_subcommand(1, 1);
  RawOptions raw;
  add_options(app, raw);
  const std::map<std::string, std::string> about = {
      {"critical", "critical coupling and detuning, eta > kappa_a windows"},
      {"spectrum", "normal modes at (G, Delta_c)"},
      {"kerr", "polaron-frame Kerr strength"},
      {"g2", "steady-state g2(0) of the weakly driven cavity"},
      {"cat", "stroboscopic cat state and its coherent components"},
      {"wigner", "Wigner raster of the cat state (CSV + SVG)"},
      {"sweep", "1-D or 2-D parameter sweep (CSV, SVG for 2-D)"},
      {"oracle", "truncated-Fock validation report (JSON)"},
      {"linearize", "mean-field linearization of the driven model"}};
  app.allow_extras();
  for (const auto& name : kCommands) app.add_subcommand(name, about.at(name))->fallthrough()->allow_extras();
  CLI::App* replay = app.add_subcommand("replay", "rerun the configuration recorded in an emitted file");
  replay->fallthrough()->allow_extras();
  replay->add_option("file", raw.replay, "emitted CSV file")->required()->configurable(false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  std::vector<std::string> extras = app.remaining();
  for (const CLI::App* sub : app.get_subcommands())
    for (const auto& e : sub->remaining()) extras.push_back(e);
  if (!extras.empty()) {
    err << "config error: unknown keys or arguments:";
    for (const auto& e : extras) err << " " << e;
    err << "\n";
    return kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (command == "replay") {
    std::string recorded, config;
    try {
      std::tie(recorded, config) = read_provenance(raw.replay);
    } catch (const Error& e) {
      err << e.what() << "\n";
      return kConfigError;
    }
    const auto tmp = std::filesystem::temp_directory_path() /
                     ("critkerr-replay-" + std::to_string(std::hash<std::string>{}(raw.replay + config)) + ".toml");
    {
      std::ofstream f(tmp);
      f << config;
    }
    std::vector<std::string> again = {recorded, "--config", tmp.string(), "--out", raw.out,
                                      "--workers", std::to_string(raw.workers)};
    if (raw.no_write) again.push_back("--no-write");
    const int code = main_entry(again, out, err);
    std::filesystem::remove(tmp);
    return code;
  }

  RunConfig cfg;
  try {
    cfg = resolve(raw, command);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  cfg.provenance = app.config_to_str(true, false);
  return run(cfg, out, err);
}

}  // namespace critkerr::cli
