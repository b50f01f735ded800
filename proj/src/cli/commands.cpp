#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "critkerr/catstate.hpp"
#include "critkerr/cli.hpp"
#include "critkerr/correlations.hpp"
#include "critkerr/error.hpp"
#include "critkerr/oracle.hpp"
#include "critkerr/spectrum.hpp"
#include "output.hpp"
#include "pool.hpp"

namespace critkerr::cli {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Conversion of natural-unit frequencies to the emitted unit.
struct Emit {
  double factor = 1.0;
  std::string suffix;

  explicit Emit(const RunConfig& cfg) {
    const double hz = unit_hz(cfg.emit_units);
    if (hz > 0.0) {
      factor = cfg.omega_b_hz / hz;
      suffix = "[" + cfg.emit_units + "]";
    }
  }
  double operator()(double v) const { return v * factor; }
  std::string col(const std::string& name) const { return name + suffix; }
  std::string text(double v) const {
    return suffix.empty() ? fmt::format("{:.7f}", v) : fmt::format("{:.7g} {}", v * factor, suffix.substr(1, suffix.size() - 2));
  }
};

struct Point {
  double G = 0.0;
  double Delta_c = 0.0;
  double kappa_minus = 0.0;
};

Point base_point(const RunConfig& cfg) { return {cfg.G, cfg.Delta_c, cfg.kappa_minus}; }

void apply(Point& p, const std::string& var, double v) {
  if (var == "G") p.G = v;
  else if (var == "delta-c") p.Delta_c = v;
  else if (var == "kappa-minus") p.kappa_minus = v;
  else if (var == "dG") p.G = critical_point(p.Delta_c) - v;
}

/// Assignment order makes dG relative to the point's own Delta_c.
Point make_point(const RunConfig& cfg, const std::vector<std::pair<std::string, double>>& assigns) {
  Point p = base_point(cfg);
  for (const char* pass : {"delta-c", "kappa-minus", "G", "dG"})
    for (const auto& [var, v] : assigns)
      if (var == pass) apply(p, var, v);
  return p;
}

struct PointResult {
  std::vector<std::string> cells;
  double heat = kNaN;
  bool flagged = false;
};

struct Evaluated {
  NormalModes nm;
  PolaronFrame frame;
};

Evaluated frame_at(const RunConfig& cfg, const Point& p) {
  Evaluated e;
  e.nm = diagonalize(p.G, p.Delta_c, cfg.params.omega_b, cfg.params.g_a);
  KerrOptions ko;
  ko.divergence_floor = cfg.divergence_floor;
  ko.kappa_minus = p.kappa_minus;
  ko.kappa_plus = cfg.kappa_plus;
  e.frame = kerr_strength(e.nm, cfg.params.g_a, p.G, p.Delta_c, cfg.params.omega_b, ko);
  return e;
}

DriveConfig drive_for(const RunConfig& cfg, double eta) {
  DriveConfig d;
  d.Delta_a = cfg.Delta_a.value_or(eta);
  d.epsilon_a = cfg.epsilon_a;
  d.kappa_a = cfg.params.kappa_a;
  d.weak_threshold = cfg.weak_threshold;
  return d;
}

std::string flag_of(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::BeyondCriticalPoint: return "unstable";
    case ErrorKind::CriticalDivergence: return "critical divergence";
    case ErrorKind::QuadratureNotConverged: return "not converged";
    default: return std::string(to_string(e.kind()));
  }
}

// ---- sweep point evaluators -------------------------------------------------

std::vector<std::string> sweep_columns(const std::string& mode, const Emit& u) {
  if (mode == "spectrum")
    return {u.col("G"), u.col("Delta_c"), u.col("omega_minus"), u.col("omega_plus"), u.col("eta"), "stable"};
  if (mode == "kerr")
    return {u.col("G"), u.col("Delta_c"), u.col("omega_minus"), u.col("eta"), "eta_over_kappa_a", "zeta_minus",
            "zeta_plus", "flag"};
  if (mode == "g2")
    return {u.col("G"), u.col("Delta_c"), u.col("kappa_minus"), u.col("eta"), "g2", "error_bound", "flag"};
  return {u.col("G"), u.col("Delta_c"), "eta_over_omega_minus", "fraction", "count", "flag"};
}

PointResult eval_point(const RunConfig& cfg, const Point& p, const Emit& u) {
  PointResult r;
  const std::string& mode = cfg.sweep_mode;
  auto num = [](double v) { return format_number(v); };
  if (mode == "spectrum") {
    const NormalModes nm = diagonalize(p.G, p.Delta_c, cfg.params.omega_b, cfg.params.g_a);
    const double eta = nm.stable ? kerr_eta(cfg.params.g_a, p.G, p.Delta_c, cfg.params.omega_b) : kNaN;
    r.cells = {num(u(p.G)), num(u(p.Delta_c)), num(nm.stable ? u(nm.omega_minus) : kNaN), num(u(nm.omega_plus)),
               num(u(eta)), nm.stable ? "1" : "0"};
    r.heat = nm.stable ? nm.omega_minus : kNaN;
    return r;
  }
  if (mode == "kerr") {
    try {
      const Evaluated e = frame_at(cfg, p);
      r.cells = {num(u(p.G)), num(u(p.Delta_c)), num(u(e.nm.omega_minus)), num(u(e.frame.eta)),
                 num(e.frame.eta / cfg.params.kappa_a), num(e.frame.zeta_minus), num(e.frame.zeta_plus), ""};
      r.heat = std::log10(e.frame.eta / cfg.params.kappa_a);
    } catch (const Error& e) {
      r.cells = {num(u(p.G)), num(u(p.Delta_c)), "nan", "nan", "nan", "nan", "nan", flag_of(e)};
      r.flagged = true;
    }
    return r;
  }
  if (mode == "g2") {
    double eta = kNaN;
    try {
      const Evaluated e = frame_at(cfg, p);
      eta = e.frame.eta;
      QuadratureConfig quad = cfg.quad;
      quad.workers = 1;
      std::string flag;
      G2Result g;
      try {
        g = g2_zero(e.nm, e.frame, drive_for(cfg, eta), quad);
      } catch (const QuadratureNotConverged& nc) {
        g = nc.partial();
        flag = "not converged";
        r.flagged = true;
      }
      r.cells = {num(u(p.G)), num(u(p.Delta_c)), num(u(p.kappa_minus)), num(u(eta)), num(g.g2), num(g.error_bound),
                 flag};
      r.heat = g.g2;
    } catch (const Error& e) {
      r.cells = {num(u(p.G)), num(u(p.Delta_c)), num(u(p.kappa_minus)), num(u(eta)), "nan", "nan", flag_of(e)};
      r.flagged = true;
    }
    return r;
  }
  RegimeMapOptions ro;
  ro.n = cfg.n_period;
  ro.q_max = cfg.q_max;
  ro.tolerance = cfg.regime_tolerance;
  ro.divergence_floor = cfg.divergence_floor;
  const RegimeCell c = cat_regime_map({p.G}, {p.Delta_c}, cfg.params, ro).front();
  r.cells = {num(u(c.G)), num(u(c.Delta_c)), num(c.eta_over_omega),
             c.fraction ? fmt::format("{}/{}", c.fraction->p, c.fraction->q) : "",
             c.count ? std::to_string(*c.count) : "", c.flag};
  r.heat = c.count ? static_cast<double>(*c.count) : kNaN;
  r.flagged = !c.flag.empty();
  return r;
}

// ---- artifacts --------------------------------------------------------------

std::string emit_file(const RunConfig& cfg, const std::string& stem, const std::string& ext, const std::string& body) {
  if (!cfg.write_files) return {};
  const auto path = artifact_path(cfg.out_dir, stem, ext);
  write_text(path, body);
  return path.string();
}

std::string emit_json(const RunConfig& cfg, const json& result, std::ostream& out) {
  json doc;
  doc["provenance"] = {{"command", cfg.command},
                       {"written", timestamp_iso()},
                       {"workers", cfg.workers},
                       {"config", cfg.provenance}};
  doc["result"] = result;
  const std::string path = emit_file(cfg, cfg.command, ".json", doc.dump(2) + "\n");
  if (!path.empty()) out << "wrote " << path << "\n";
  return path;
}

std::string header(const RunConfig& cfg) { return provenance_header(cfg.command, cfg.provenance, cfg.workers); }

// ---- commands ---------------------------------------------------------------

int cmd_critical(const RunConfig& cfg, std::ostream& out) {
  const Emit u(cfg);
  const double Gcp = critical_point(cfg.Delta_c, cfg.params.omega_b);
  const double Dcp = critical_detuning(cfg.G, cfg.params.omega_b);
  const KerrWindow w = kerr_window(cfg.Delta_c, cfg.G, cfg.params.g_a, cfg.params.kappa_a, cfg.params.omega_b);
  out << "G_cp = " << u.text(Gcp) << "  (Delta_c = " << u.text(cfg.Delta_c) << ")\n";
  out << "Delta_cp = " << u.text(Dcp) << "  (G = " << u.text(cfg.G) << ")\n";
  out << fmt::format("eta > kappa_a window: G width {}, Delta_c width {}\n", format_number(u(w.G_width)),
                     format_number(u(w.Delta_width)));
  emit_json(cfg,
            {{"G_cp", u(Gcp)},
             {"Delta_cp", u(Dcp)},
             {"G_window_threshold", u(w.G_threshold)},
             {"G_window_width", u(w.G_width)},
             {"Delta_window_threshold", u(w.Delta_threshold)},
             {"Delta_window_width", u(w.Delta_width)},
             {"units", cfg.emit_units}},
            out);
  return kSuccess;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const Emit u(cfg);
  const NormalModes nm = diagonalize(cfg.G, cfg.Delta_c, cfg.params.omega_b, cfg.params.g_a);
  out << "omega_minus = " << u.text(nm.omega_minus) << (nm.stable ? "" : " (imaginary: unstable)") << "\n";
  out << "omega_plus = " << u.text(nm.omega_plus) << "\n";
  out << fmt::format("g_minus = {}  g_plus = {}  theta = {}\n", format_number(u(nm.g_minus)),
                     format_number(u(nm.g_plus)), format_number(nm.theta));
  out << "stable = " << (nm.stable ? "true" : "false") << "\n";
  std::vector<std::vector<double>> M(4, std::vector<double>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) M[i][j] = nm.transform(i, j);
  emit_json(cfg,
            {{"G", u(cfg.G)},
             {"Delta_c", u(cfg.Delta_c)},
             {"omega_minus", u(nm.omega_minus)},
             {"omega_plus", u(nm.omega_plus)},
             {"g_minus", u(nm.g_minus)},
             {"g_plus", u(nm.g_plus)},
             {"theta", nm.theta},
             {"stable", nm.stable},
             {"transform", M},
             {"units", cfg.emit_units}},
            out);
  return kSuccess;
}

int cmd_kerr(const RunConfig& cfg, std::ostream& out) {
  const Emit u(cfg);
  const Evaluated e = frame_at(cfg, base_point(cfg));
  out << "eta = " << format_number(u(e.frame.eta)) << u.suffix << "  eta/kappa_a = "
      << format_number(e.frame.eta / cfg.params.kappa_a) << "\n";
  out << fmt::format("zeta_minus = {}  zeta_plus = {}  sum-rule residual = {:.3e}\n", format_number(e.frame.zeta_minus),
                     format_number(e.frame.zeta_plus), e.frame.sum_rule_residual);
  emit_json(cfg,
            {{"G", u(cfg.G)},
             {"Delta_c", u(cfg.Delta_c)},
             {"eta", u(e.frame.eta)},
             {"eta_over_kappa_a", e.frame.eta / cfg.params.kappa_a},
             {"zeta_minus", e.frame.zeta_minus},
             {"zeta_plus", e.frame.zeta_plus},
             {"kappa_minus", u(e.frame.kappa_minus)},
             {"kappa_plus", u(e.frame.kappa_plus)},
             {"sum_rule_residual", e.frame.sum_rule_residual},
             {"critical_margin", e.frame.critical_margin},
             {"units", cfg.emit_units}},
            out);
  return kSuccess;
}

int cmd_g2(const RunConfig& cfg, std::ostream& out) {
  const Emit u(cfg);
  const Evaluated e = frame_at(cfg, base_point(cfg));
  QuadratureConfig quad = cfg.quad;
  quad.workers = cfg.workers;
  G2Result g;
  int code = kSuccess;
  try {
    g = g2_zero(e.nm, e.frame, drive_for(cfg, e.frame.eta), quad);
  } catch (const QuadratureNotConverged& nc) {
    g = nc.partial();
    code = kPartial;
    out << "warning: " << nc.what() << "\n";
  }
  for (const auto& w : g.warnings) out << "warning: " << w << "\n";
  out << fmt::format("g2(0) = {} +- {}  (eta = {}, levels {}, nodes {}, {:.2f} s)\n", format_number(g.g2),
                     format_number(g.error_bound), format_number(u(e.frame.eta)), g.levels, g.nodes, g.wallclock_s);
  emit_json(cfg,
            {{"G", u(cfg.G)},
             {"Delta_c", u(cfg.Delta_c)},
             {"kappa_minus", u(cfg.kappa_minus)},
             {"eta", u(e.frame.eta)},
             {"g2", g.g2},
             {"error_bound", g.error_bound},
             {"converged", code == kSuccess},
             {"levels", g.levels},
             {"nodes", g.nodes},
             {"wallclock", g.wallclock_s},
             {"warnings", g.warnings},
             {"units", cfg.emit_units}},
            out);
  return code;
}

CatState make_cat(const RunConfig& cfg) {
  if (cfg.theta_K) return cat_from_phase(cfg.upsilon, *cfg.theta_K, cfg.n_trunc);
  const Evaluated e = frame_at(cfg, base_point(cfg));
  CatContext ctx;
  ctx.omega_minus = e.nm.omega_minus;
  ctx.kappa_max = std::max({cfg.params.kappa_a, cfg.params.kappa_b, cfg.params.kappa_c});
  ctx.include_zeta_plus = cfg.include_zeta_plus;
  ctx.zeta_plus = e.frame.zeta_plus;
  ctx.omega_plus = e.nm.omega_plus;
  ctx.eta_plus = e.nm.g_plus * e.nm.g_plus / e.nm.omega_plus;
  return evolve_cat(cfg.upsilon, e.frame.eta / e.nm.omega_minus, cfg.n_period, cfg.n_trunc, ctx);
}

int cmd_cat(const RunConfig& cfg, std::ostream& out) {
  const CatState s = make_cat(cfg);
  json result = {{"upsilon", cfg.upsilon},
                 {"theta_K", s.theta_K},
                 {"n_period", s.n_period},
                 {"n_trunc", cfg.n_trunc},
                 {"truncation_loss", s.truncation_loss},
                 {"validity_margin", s.validity_margin},
                 {"zeta_plus_fidelity", s.zeta_plus_fidelity},
                 {"warnings", s.warnings}};
  out << fmt::format("theta_K = {} rad ({} x 2pi)\n", format_number(s.theta_K),
                     format_number(s.theta_K / (2.0 * std::numbers::pi)));
  for (const auto& w : s.warnings) out << "warning: " << w << "\n";
  int code = kSuccess;
  try {
    const Decomposition d = decompose_cat(s, cfg.q_max);
    out << fmt::format("components = {} (basis {}, theta_K/2pi = {}/{}), residual {:.2e}, fidelity {:.12f}\n", d.count,
                       d.basis_size, d.phase_fraction.p, d.phase_fraction.q, d.residual, d.fidelity);
    json comps = json::array();
    for (const auto& c : d.components) {
      if (std::abs(c.weight) > 1e-3)
        out << fmt::format("  phase {:>9.6f}  weight {:+.6f}{:+.6f}i\n", c.phase, c.weight.real(), c.weight.imag());
      comps.push_back({{"phase", c.phase}, {"weight_re", c.weight.real()}, {"weight_im", c.weight.imag()}});
    }
    result["components"] = comps;
    result["count"] = d.count;
    result["residual"] = d.residual;
    result["fidelity"] = d.fidelity;
    result["gram_condition"] = d.gram_condition;
    result["phase_fraction"] = fmt::format("{}/{}", d.phase_fraction.p, d.phase_fraction.q);
  } catch (const Error& e) {
    out << "flagged: " << e.what() << "\n";
    result["flag"] = flag_of(e);
    code = kPartial;
  }
  emit_json(cfg, result, out);
  return code;
}

int cmd_wigner(const RunConfig& cfg, std::ostream& out) {
  const CatState s = make_cat(cfg);
  const double extent = cfg.extent > 0.0 ? cfg.extent : std::abs(cfg.upsilon) * std::numbers::sqrt2 + 4.0;
  const AxisSpec ax{-extent, extent, cfg.grid_steps};
  const WignerGrid w = wigner(s, ax, ax, cfg.workers);
  double parity = 0.0;
  for (std::size_t m = 0; m < s.amplitudes.size(); ++m) parity += (m % 2 ? -1.0 : 1.0) * std::norm(s.amplitudes[m]);
  for (const auto& msg : w.warnings) out << "warning: " << msg << "\n";
  out << fmt::format("normalization = {:.8f}  min W = {:.6f}  max W = {:.6f}  parity/pi = {:.8f}\n",
                     w.normalization, w.min_value, w.max_value, parity / std::numbers::pi);

  Table t;
  t.columns.push_back("y\\x");
  for (double x : w.x_axis) t.columns.push_back(format_number(x));
  for (std::size_t iy = 0; iy < w.y_axis.size(); ++iy) {
    std::vector<std::string> row{format_number(w.y_axis[iy])};
    for (std::size_t ix = 0; ix < w.x_axis.size(); ++ix) row.push_back(format_number(w.at(ix, iy)));
    t.rows.push_back(std::move(row));
  }
  const std::string csv = emit_file(cfg, "wigner", ".csv", header(cfg) + render_csv(t));
  Heatmap h{w.x_axis, w.y_axis, w.values,
            fmt::format("Wigner function, theta_K = {:.6f}", s.theta_K), "x", "y", "W(x, y)", true};
  const std::string svg = emit_file(cfg, "wigner", ".svg", render_svg(h));
  if (!csv.empty()) out << "wrote " << csv << "\nwrote " << svg << "\n";
  return kSuccess;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const Emit u(cfg);
  const std::vector<double> v1 = cfg.axis.values();
  const std::vector<double> v2 = cfg.axis2 ? cfg.axis2->values() : std::vector<double>{kNaN};
  const std::size_t n1 = v1.size(), n2 = v2.size(), n = n1 * n2;
  std::vector<PointResult> results(n);
  parallel_for(n, cfg.workers, [&](std::size_t k) {
    const std::size_t i1 = k / n2, i2 = k % n2;
    std::vector<std::pair<std::string, double>> assigns{{cfg.axis.variable, v1[i1]}};
    if (cfg.axis2) assigns.emplace_back(cfg.axis2->variable, v2[i2]);
    const Point p = make_point(cfg, assigns);
    try {
      results[k] = eval_point(cfg, p, u);
    } catch (const std::exception& e) {
      results[k].cells.assign(sweep_columns(cfg.sweep_mode, u).size(), "nan");
      results[k].cells.back() = e.what();
      results[k].flagged = true;
    }
  });

  Table t;
  t.columns = sweep_columns(cfg.sweep_mode, u);
  std::size_t flagged = 0;
  for (auto& r : results) {
    flagged += r.flagged ? 1 : 0;
    t.rows.push_back(r.cells);
  }
  const std::string stem = "sweep-" + cfg.sweep_mode;
  const std::string csv = emit_file(cfg, stem, ".csv", header(cfg) + render_csv(t));
  if (!csv.empty()) out << "wrote " << csv << "\n";
  if (cfg.axis2) {
    Heatmap h;
    h.x = v1;
    h.y = v2;
    h.values.resize(n);
    for (std::size_t i1 = 0; i1 < n1; ++i1)
      for (std::size_t i2 = 0; i2 < n2; ++i2) h.values[i2 * n1 + i1] = results[i1 * n2 + i2].heat;
    const std::map<std::string, std::string> label = {{"spectrum", "omega_minus"},
                                                      {"kerr", "log10(eta / kappa_a)"},
                                                      {"g2", "g2(0)"},
                                                      {"cat", "component count"}};
    h.value_label = label.at(cfg.sweep_mode);
    h.title = "sweep " + cfg.sweep_mode;
    h.x_label = cfg.axis.variable;
    h.y_label = cfg.axis2->variable;
    const std::string svg = emit_file(cfg, stem, ".svg", render_svg(h));
    if (!svg.empty()) out << "wrote " << svg << "\n";
  }
  out << fmt::format("{} points, {} flagged\n", n, flagged);
  if (flagged == n) return kNumericalFailure;
  return flagged ? kPartial : kSuccess;
}

int cmd_linearize(const RunConfig& cfg, std::ostream& out) {
  const Emit u(cfg);
  LinearizeOptions lo;
  lo.tol = cfg.linearize_tol;
  const LinearizedModel lin = linearize(cfg.params, lo);
  const DriveSetting target = target_drive(cfg.params, cfg.G, cfg.Delta_c);
  out << fmt::format("G = {}  Delta_c = {}  omega_a_tilde = {}  |alpha| = {}\n", format_number(u(lin.G)),
                     format_number(u(lin.Delta_c)), format_number(u(lin.omega_a_tilde)),
                     format_number(std::abs(lin.alpha)));
  out << fmt::format("drive for (G, Delta_c) = ({}, {}): epsilon_c = {}  delta_c = {}\n", format_number(u(cfg.G)),
                     format_number(u(cfg.Delta_c)), format_number(u(target.epsilon_c)),
                     format_number(u(target.delta_c)));
  json roots = json::array();
  for (double r : lin.real_roots) roots.push_back(u(r));
  emit_json(cfg,
            {{"G", u(lin.G)},
             {"Delta_c", u(lin.Delta_c)},
             {"omega_a_tilde", u(lin.omega_a_tilde)},
             {"alpha_re", lin.alpha.real()},
             {"alpha_im", lin.alpha.imag()},
             {"beta_re", lin.beta.real()},
             {"beta_im", lin.beta.imag()},
             {"real_roots", roots},
             {"residual", lin.residual},
             {"target_epsilon_c", u(target.epsilon_c)},
             {"target_delta_c", u(target.delta_c)},
             {"units", cfg.emit_units}},
            out);
  return kSuccess;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  oracle::ValidationConfig vc;
  vc.G = cfg.G;
  vc.Delta_c = cfg.Delta_c;
  vc.g_a = cfg.params.g_a;
  vc.omega_b = cfg.params.omega_b;
  vc.kappa_a = cfg.params.kappa_a;
  const oracle::ValidationReport r = oracle::run_validation(vc);
  for (const auto& c : r.checks)
    out << fmt::format("{} {}: {} vs {} ({})\n", c.pass ? "PASS" : "FAIL", c.name, format_number(c.value),
                       format_number(c.reference), c.detail);
  const std::string path = emit_file(cfg, "oracle", ".json", r.to_json() + "\n");
  if (!path.empty()) out << "wrote " << path << "\n";
  return r.all_pass() ? kSuccess : kNumericalFailure;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  try {
    const std::string& c = cfg.command;
    if (c == "critical") return cmd_critical(cfg, out);
    if (c == "spectrum") return cmd_spectrum(cfg, out);
    if (c == "kerr") return cmd_kerr(cfg, out);
    if (c == "g2") return cmd_g2(cfg, out);
    if (c == "cat") return cmd_cat(cfg, out);
    if (c == "wigner") return cmd_wigner(cfg, out);
    if (c == "sweep") return cmd_sweep(cfg, out);
    if (c == "linearize") return cmd_linearize(cfg, out);
    if (c == "oracle") return cmd_oracle(cfg, out);
    err << "unknown command " << c << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::InvalidParameter ? kConfigError
                                                                                          : kNumericalFailure;
  }
}

}  // namespace critkerr::cli
