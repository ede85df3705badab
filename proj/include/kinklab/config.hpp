#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "kinklab/kgsim.hpp"
#include "kinklab/potential.hpp"

namespace kinklab {

using nlohmann::json;

struct GridConfig {
  double L = 0.0;  // 0 = auto (40/omega for analysis, 200/omega for runs)
  int n = 0;       // 0 = auto
};

struct SpectralConfig {
  double upper = 0.0;  // 0 = auto (continuum edge)
  double near_threshold_factor = 10.0;
};

struct VirialConfig {
  double A = 0.0;  // 0 = auto (64/omega)
  double B = 0.0;  // 0 = auto (16/omega)
  std::vector<double> gamma_grid{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
};

struct FgrConfig {
  double tol_rel = 1e-6;  // |Gamma| threshold relative to the quadrature scale
};

struct ScanConfig {
  std::string parameter;  // m | eta0 | delta | A | epsilon
  std::vector<double> values;
};

struct RunConfig {
  json potential_spec = {{"kind", "phi4"}};
  GridConfig grid;
  SpectralConfig spectral;
  double epsilon = 1e-2;
  VirialConfig virial;
  FgrConfig fgr;
  SimConfig simulation;
  GridConfig sim_grid;
  ScanConfig scan;
  std::string output_dir = ".";
  std::uint64_t seed = 20240101;
};

inline Potential potential_from_spec(const json& spec) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw std::invalid_argument("potential spec: object with a \"kind\" key required");
  const std::string kind = spec.at("kind").get<std::string>();
  for (const auto& [key, val] : spec.items()) {
    (void)val;
    if (key != "kind" && key != "m" && key != "coeffs" && key != "base" && key != "eta_coeffs")
      throw std::invalid_argument("potential spec: unknown key \"" + key + "\"");
  }
  if (kind == "phi4") return make_phi4();
  if (kind == "phi8") {
    if (!spec.contains("m")) throw std::invalid_argument("phi8 potential: missing \"m\"");
    return make_phi8_scaled(spec.at("m").get<double>());
  }
  if (kind == "poly") {
    if (!spec.contains("coeffs")) throw std::invalid_argument("poly potential: missing \"coeffs\"");
    return make_poly(spec.at("coeffs").get<std::vector<double>>());
  }
  if (kind == "perturbed") {
    if (!spec.contains("base") || !spec.contains("eta_coeffs"))
      throw std::invalid_argument("perturbed potential: need \"base\" and \"eta_coeffs\"");
    const Potential base = potential_from_spec(spec.at("base"));
    const EtaPerturbation eta =
        EtaPerturbation::from_coeffs(spec.at("eta_coeffs").get<std::vector<double>>());
    return perturb(base, eta);
  }
  throw std::invalid_argument("potential spec: unknown kind \"" + kind + "\"");
}

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& [key, val] : j.items()) {
    (void)val;
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw std::invalid_argument("config: unknown key \"" + key + "\" in " + where);
  }
}

inline GridConfig grid_from_json(const json& j, const std::string& where) {
  reject_unknown_keys(j, {"L", "n"}, where);
  GridConfig g;
  g.L = j.value("L", 0.0);
  g.n = j.value("n", 0);
  if (g.L < 0.0) throw std::invalid_argument("config: " + where + ".L must be nonnegative");
  if (g.n != 0 && g.n < 3) throw std::invalid_argument("config: " + where + ".n must be >= 3");
  if (g.n != 0 && (g.n - 1) % 2 != 0)
    throw std::invalid_argument("config: " + where + ".n must be odd (refinement by two)");
  return g;
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  detail::reject_unknown_keys(j,
                              {"potential", "grid", "spectral", "darboux", "virial", "fgr",
                               "simulation", "scan", "output_dir", "seed"},
                              "top level");
  RunConfig c;
  if (j.contains("potential")) {
    c.potential_spec = j.at("potential");
    potential_from_spec(c.potential_spec);  // validate early
  }
  if (j.contains("grid")) c.grid = detail::grid_from_json(j.at("grid"), "grid");
  if (j.contains("spectral")) {
    detail::reject_unknown_keys(j.at("spectral"), {"upper", "near_threshold_factor"}, "spectral");
    c.spectral.upper = j.at("spectral").value("upper", 0.0);
    c.spectral.near_threshold_factor = j.at("spectral").value("near_threshold_factor", 10.0);
  }
  if (j.contains("darboux")) {
    detail::reject_unknown_keys(j.at("darboux"), {"epsilon"}, "darboux");
    c.epsilon = j.at("darboux").value("epsilon", 1e-2);
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0))
      throw std::invalid_argument("config: darboux.epsilon must lie in (0, 1)");
  }
  if (j.contains("virial")) {
    detail::reject_unknown_keys(j.at("virial"), {"A", "B", "gamma_grid"}, "virial");
    c.virial.A = j.at("virial").value("A", 0.0);
    c.virial.B = j.at("virial").value("B", 0.0);
    if (j.at("virial").contains("gamma_grid"))
      c.virial.gamma_grid = j.at("virial").at("gamma_grid").get<std::vector<double>>();
    for (double g : c.virial.gamma_grid)
      if (!(g > 0.0 && g < 1.0))
        throw std::invalid_argument("config: virial.gamma_grid values must lie in (0, 1)");
  }
  if (j.contains("fgr")) {
    detail::reject_unknown_keys(j.at("fgr"), {"tol_rel"}, "fgr");
    c.fgr.tol_rel = j.at("fgr").value("tol_rel", 1e-6);
    if (!(c.fgr.tol_rel > 0.0)) throw std::invalid_argument("config: fgr.tol_rel must be positive");
  }
  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    detail::reject_unknown_keys(s,
                                {"mode", "delta", "bump_width", "bump_center", "file", "T",
                                 "dt_factor", "cadence", "window_half", "delta_max", "sponge",
                                 "grid"},
                                "simulation");
    c.simulation.mode = s.value("mode", std::string("pure-Y"));
    c.simulation.delta = s.value("delta", 0.05);
    c.simulation.bump_width = s.value("bump_width", 2.0);
    c.simulation.bump_center = s.value("bump_center", 5.0);
    c.simulation.file = s.value("file", std::string());
    c.simulation.T = s.value("T", 400.0);
    c.simulation.dt_factor = s.value("dt_factor", 0.4);
    c.simulation.cadence = s.value("cadence", 0.5);
    c.simulation.window_half = s.value("window_half", 8.0);
    c.simulation.delta_max = s.value("delta_max", 0.5);
    if (s.contains("sponge")) {
      detail::reject_unknown_keys(s.at("sponge"), {"enabled", "strength", "width_frac"},
                                  "simulation.sponge");
      c.simulation.sponge.enabled = s.at("sponge").value("enabled", true);
      c.simulation.sponge.strength = s.at("sponge").value("strength", 1.0);
      c.simulation.sponge.width_frac = s.at("sponge").value("width_frac", 0.2);
      if (!(c.simulation.sponge.width_frac > 0.0 && c.simulation.sponge.width_frac < 0.9))
        throw std::invalid_argument("config: sponge.width_frac must lie in (0, 0.9)");
    }
    if (s.contains("grid")) c.sim_grid = detail::grid_from_json(s.at("grid"), "simulation.grid");
    if (!(c.simulation.T > 0.0)) throw std::invalid_argument("config: simulation.T must be positive");
    if (!(c.simulation.dt_factor > 0.0 && c.simulation.dt_factor <= 0.5))
      throw std::invalid_argument("config: simulation.dt_factor must lie in (0, 0.5]");
    if (!(c.simulation.cadence > 0.0))
      throw std::invalid_argument("config: simulation.cadence must be positive");
    if (!(c.simulation.delta >= 0.0))
      throw std::invalid_argument("config: simulation.delta must be nonnegative");
  }
  if (j.contains("scan")) {
    detail::reject_unknown_keys(j.at("scan"), {"parameter", "values"}, "scan");
    c.scan.parameter = j.at("scan").value("parameter", std::string());
    if (j.at("scan").contains("values"))
      c.scan.values = j.at("scan").at("values").get<std::vector<double>>();
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

// Effective configuration with defaults filled in; re-parsing it reproduces
// the same RunConfig.
inline json config_to_json(const RunConfig& c) {
  json j;
  j["potential"] = c.potential_spec;
  j["grid"] = {{"L", c.grid.L}, {"n", c.grid.n}};
  j["spectral"] = {{"upper", c.spectral.upper},
                   {"near_threshold_factor", c.spectral.near_threshold_factor}};
  j["darboux"] = {{"epsilon", c.epsilon}};
  j["virial"] = {{"A", c.virial.A}, {"B", c.virial.B}, {"gamma_grid", c.virial.gamma_grid}};
  j["fgr"] = {{"tol_rel", c.fgr.tol_rel}};
  j["simulation"] = {{"mode", c.simulation.mode},
                     {"delta", c.simulation.delta},
                     {"bump_width", c.simulation.bump_width},
                     {"bump_center", c.simulation.bump_center},
                     {"file", c.simulation.file},
                     {"T", c.simulation.T},
                     {"dt_factor", c.simulation.dt_factor},
                     {"cadence", c.simulation.cadence},
                     {"window_half", c.simulation.window_half},
                     {"delta_max", c.simulation.delta_max},
                     {"sponge",
                      {{"enabled", c.simulation.sponge.enabled},
                       {"strength", c.simulation.sponge.strength},
                       {"width_frac", c.simulation.sponge.width_frac}}},
                     {"grid", {{"L", c.sim_grid.L}, {"n", c.sim_grid.n}}}};
  j["scan"] = {{"parameter", c.scan.parameter}, {"values", c.scan.values}};
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j;
}

inline Grid resolve_grid(const GridConfig& gc, double omega, double auto_L_over_omega,
                         int auto_n) {
  const double L = (gc.L > 0.0) ? gc.L : auto_L_over_omega / omega;
  const int n = (gc.n != 0) ? gc.n : auto_n;
  return Grid(L, n);
}

}  // namespace kinklab
