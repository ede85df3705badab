#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "kinklab/config.hpp"
#include "kinklab/darboux.hpp"
#include "kinklab/io.hpp"
#include "kinklab/kgsim.hpp"
#include "kinklab/kink.hpp"
#include "kinklab/potential.hpp"
#include "kinklab/resonance.hpp"
#include "kinklab/spectral.hpp"
#include "kinklab/virial.hpp"

namespace kinklab {

// Everything the analysis pipeline produces, stage by stage. Later stages are
// absent when an earlier one failed; `report` always carries the full story.
struct AnalysisResult {
  json report;
  int exit_code = 1;  // 0 all-pass, 2 scientific fail, 1 internal error
  std::optional<Potential> W;
  std::optional<KinkProfile> K;
  std::optional<Hypothesis1Report> h1;
  std::optional<DarbouxData> D;
  std::optional<ResonanceSolution> res;
  std::optional<FermiReport> fermi;
  std::optional<Weights> weights;
  std::optional<Hypothesis3Report> h3;
};

namespace detail {

inline json validation_to_json(const ValidationReport& rep) {
  json out;
  out["pass"] = rep.pass;
  out["omega_sq"] = rep.omega_sq;
  out["clauses"] = json::array();
  for (const auto& c : rep.clauses)
    out["clauses"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return out;
}

}  // namespace detail

// Runs potential -> kink -> spectrum -> factorization -> golden rule ->
// repulsivity in order, short-circuiting on failure, and assembles the
// machine-readable hypothesis report.
inline AnalysisResult analyze(const RunConfig& cfg) {
  AnalysisResult out;
  json& rep = out.report;
  rep["schema_version"] = 1;
  rep["config"] = config_to_json(cfg);
  std::vector<std::string> failed;
  std::vector<std::string> stages;

  try {
    out.W = potential_from_spec(cfg.potential_spec);
    const Potential& W = *out.W;
    stages.push_back("validate");
    const ValidationReport vrep = validate(W);
    rep["validation"] = detail::validation_to_json(vrep);
    if (!vrep.pass) {
      failed.push_back("validation");
    } else {
      const double omega = W.omega();
      const Grid grid = resolve_grid(cfg.grid, omega, 40.0, 4001);
      stages.push_back("kink");
      out.K = solve_kink(W, grid);
      const DecayConstants dc = decay_constants(*out.K);
      rep["kink"] = {{"L", grid.L},        {"n", grid.n},        {"C0", dc.C0},
                     {"C1", dc.C1},        {"C2", dc.C2},        {"C3", dc.C3},
                     {"warnings", dc.warnings}};

      stages.push_back("spectrum");
      Hypothesis1Report h1 = check_hypothesis1(W, grid);
      out.h1 = h1;
      rep["hypothesis1"] = {{"pass", h1.pass},
                            {"lambda_sq", h1.lambda_sq},
                            {"omega_sq", W.omega_sq()},
                            {"convergence", h1.convergence},
                            {"multiplicity", h1.multiplicity},
                            {"window_ok", h1.window_ok},
                            {"near_threshold", h1.near_threshold},
                            {"odd_eigenvalues", h1.odd_eigenvalues},
                            {"note", h1.note}};
      if (!h1.pass) {
        failed.push_back("hypothesis1");
      } else {
        stages.push_back("darboux");
        out.D = build_darboux(W, *out.K, h1.lambda_sq, std::max(h1.convergence, 1e-10));
        const DarbouxData& D = *out.D;
        rep["darboux"] = {{"lambda_sq", D.lambda_sq},
                          {"P1_tail", D.P1.back()},
                          {"P2_tail", D.P2.back()},
                          {"match_x", D.match_x},
                          {"match_mismatch", D.match_mismatch}};

        stages.push_back("fgr");
        try {
          out.res = solve_resonance(W, *out.K, D.lambda_sq);
          FermiReport fr = compute_gamma(W, *out.K, D.lambda_sq, h1.Y, out.res->g);
          fr.tol = cfg.fgr.tol_rel * fr.scale;
          fr.hypothesis2 = fr.converged && std::abs(fr.gamma) > fr.tol;
          out.fermi = fr;
          rep["hypothesis2"] = {{"pass", fr.hypothesis2},
                                {"gamma", fr.gamma},
                                {"gamma_h2", fr.gamma_h2},
                                {"gamma_L15", fr.gamma_L15},
                                {"converged", fr.converged},
                                {"tol", fr.tol},
                                {"scale", fr.scale},
                                {"Yg_inner", fr.Yg_inner},
                                {"k", out.res->k},
                                {"tail_amplitude", out.res->tail_amplitude},
                                {"note", fr.note}};
          if (!fr.hypothesis2) failed.push_back("hypothesis2");
        } catch (const std::exception& e) {
          rep["hypothesis2"] = {{"pass", false}, {"note", e.what()}};
          failed.push_back("hypothesis2");
        }

        stages.push_back("hyp3");
        const double A = (cfg.virial.A > 0.0) ? cfg.virial.A : 64.0 / omega;
        const double B = (cfg.virial.B > 0.0) ? cfg.virial.B : 16.0 / omega;
        out.weights = make_weights(grid, W.omega_sq(), D.lambda_sq, A, B);
        const Hypothesis3Report h3 = check_hypothesis3(D, cfg.virial.gamma_grid);
        out.h3 = h3;
        rep["hypothesis3"] = {{"pass", h3.pass},
                              {"witness_gamma", h3.witness_gamma},
                              {"gammas", h3.gammas},
                              {"negative_counts", h3.negative_counts},
                              {"A", A},
                              {"B", B},
                              {"note", h3.note}};
        if (!h3.pass) failed.push_back("hypothesis3");

        // seeded diagnostic probes (coercivity and weighted positivity)
        const RegularizedTransform T = make_regularized(grid, cfg.epsilon);
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 32; ++s)
          worst = std::max(worst, coercivity_ratio(T, D, h1.Y, out.weights->rho,
                                                   random_odd_function(grid, cfg.seed + s)));
        rep["diagnostics"] = {{"coercivity_max_ratio", worst}, {"epsilon", cfg.epsilon}};
      }
    }
    rep["stages_run"] = stages;
    rep["verdict"] = failed.empty() ? "all-pass" : "fail";
    rep["failed"] = failed;
    out.exit_code = failed.empty() ? 0 : 2;
  } catch (const std::exception& e) {
    rep["stages_run"] = stages;
    rep["error"] = e.what();
    rep["verdict"] = "error";
    out.exit_code = 1;
  }
  return out;
}

// ---- per-subcommand runners -------------------------------------------------

inline int run_validate(const RunConfig& cfg, const std::string& outdir) {
  const Potential W = potential_from_spec(cfg.potential_spec);
  const ValidationReport rep = validate(W);
  ensure_dir(outdir);
  write_text(outdir + "/validate.json", detail::validation_to_json(rep).dump(2) + "\n");
  return rep.pass ? 0 : 2;
}

inline int run_kink(const RunConfig& cfg, const std::string& outdir) {
  const Potential W = potential_from_spec(cfg.potential_spec);
  const Grid grid = resolve_grid(cfg.grid, W.omega(), 40.0, 4001);
  const KinkProfile K = solve_kink(W, grid);
  ensure_dir(outdir);
  const std::vector<double> xs = grid.nodes();
  write_csv(outdir + "/kink.csv",
            {{"x", &xs}, {"H", &K.H}, {"Hp", &K.Hp}, {"Hpp", &K.Hpp}, {"Hppp", &K.Hppp}});
  return 0;
}

inline int run_spectrum(const RunConfig& cfg, const std::string& outdir) {
  const AnalysisResult r = analyze(cfg);
  ensure_dir(outdir);
  json rep;
  rep["schema_version"] = 1;
  rep["sector"] = "odd";
  if (r.report.contains("hypothesis1")) {
    rep["eigenvalues"] = r.report["hypothesis1"]["odd_eigenvalues"];
    rep["convergence"] = r.report["hypothesis1"]["convergence"];
    rep["hypothesis1"] = r.report["hypothesis1"]["pass"];
    rep["lambda_sq"] = r.report["hypothesis1"]["lambda_sq"];
  } else {
    rep["hypothesis1"] = false;
    rep["error"] = r.report.value("error", "upstream failure");
  }
  write_text(outdir + "/spectrum.json", rep.dump(2) + "\n");
  if (r.h1 && r.h1->pass && r.K) {
    const std::vector<double> xs = r.K->grid.nodes();
    write_csv(outdir + "/eigenfunction.csv", {{"x", &xs}, {"Y", &r.h1->Y}});
  }
  return r.exit_code;
}

inline int run_darboux(const RunConfig& cfg, const std::string& outdir) {
  const AnalysisResult r = analyze(cfg);
  ensure_dir(outdir);
  if (!r.D) {
    write_text(outdir + "/darboux.json",
               json({{"error", r.report.value("error", "upstream failure")}}).dump(2) + "\n");
    return r.exit_code == 0 ? 1 : r.exit_code;
  }
  const DarbouxData& D = *r.D;
  const std::vector<double> xs = D.grid.nodes();
  write_csv(outdir + "/darboux.csv", {{"x", &xs},
                                      {"P1", &D.P1},
                                      {"P2", &D.P2},
                                      {"Z", &D.Z},
                                      {"q0", &D.q0},
                                      {"q1", &D.q1}});
  json rep;
  rep["schema_version"] = 1;
  rep["lambda_sq"] = D.lambda_sq;
  rep["P1_tail"] = D.P1.back();
  rep["P2_tail"] = D.P2.back();
  rep["tail_target"] = D.omega_sq;
  rep["match_x"] = D.match_x;
  rep["match_mismatch"] = D.match_mismatch;
  write_text(outdir + "/darboux.json", rep.dump(2) + "\n");
  return r.exit_code;
}

inline int run_fgr(const RunConfig& cfg, const std::string& outdir) {
  const AnalysisResult r = analyze(cfg);
  ensure_dir(outdir);
  json rep;
  rep["schema_version"] = 1;
  if (r.report.contains("hypothesis2")) rep.update(r.report["hypothesis2"]);
  rep["hypothesis2"] = r.report.contains("hypothesis2") && r.report["hypothesis2"]["pass"].get<bool>();
  write_text(outdir + "/fgr.json", rep.dump(2) + "\n");
  if (r.res && r.K) {
    const std::vector<double> xs = r.K->grid.nodes();
    write_csv(outdir + "/resonance.csv", {{"x", &xs}, {"g", &r.res->g}});
  }
  return r.exit_code;
}

inline int run_hyp3(const RunConfig& cfg, const std::string& outdir) {
  const AnalysisResult r = analyze(cfg);
  ensure_dir(outdir);
  json rep;
  rep["schema_version"] = 1;
  if (r.report.contains("hypothesis3")) rep.update(r.report["hypothesis3"]);
  write_text(outdir + "/hyp3.json", rep.dump(2) + "\n");
  if (r.weights && r.K) {
    const Weights& w = *r.weights;
    const std::vector<double> xs = r.K->grid.nodes();
    write_csv(outdir + "/weights.csv",
              {{"x", &xs},
               {"rho", &w.rho},
               {"sigma_A", &w.sigma_A},
               {"chi_A", &w.chi_A},
               {"zeta_A2", &w.zeta_A2},
               {"Phi_A", &w.Phi_A},
               {"zeta_B2", &w.zeta_B2},
               {"Phi_B", &w.Phi_B},
               {"Psi_AB", &w.Psi_AB}});
  }
  return r.exit_code;
}

inline int run_analyze(const RunConfig& cfg, const std::string& outdir) {
  const AnalysisResult r = analyze(cfg);
  ensure_dir(outdir);
  write_text(outdir + "/analysis.json", r.report.dump(2) + "\n");
  return r.exit_code;
}

struct SimulateResult {
  RunSummary summary;
  json report;
  int exit_code = 1;
};

inline SimulateResult simulate(const RunConfig& cfg, const std::string& outdir,
                               ModalTrajectory* traj_out = nullptr) {
  SimulateResult out;
  const Potential W = potential_from_spec(cfg.potential_spec);
  const double omega = W.omega();
  // default long-run resolution: h = 0.05/omega on [0, 200/omega]
  const Grid grid = resolve_grid(cfg.sim_grid, omega, 200.0, 4001);
  SimContext ctx = prepare_sim(W, grid, cfg.epsilon,
                               (cfg.virial.A > 0.0) ? cfg.virial.A : 64.0 / omega,
                               (cfg.virial.B > 0.0) ? cfg.virial.B : 16.0 / omega);
  configure_sponge(ctx, cfg.simulation.sponge);
  ModalTrajectory local;
  ModalTrajectory& traj = traj_out ? *traj_out : local;
  out.summary = run_experiment(ctx, cfg.simulation, &traj);

  ensure_dir(outdir);
  write_csv(outdir + "/trajectory.csv", {{"t", &traj.t},
                                         {"z1", &traj.z1},
                                         {"z2", &traj.z2},
                                         {"abs_z", &traj.abs_z},
                                         {"I", &traj.I},
                                         {"Hfun", &traj.Hfun},
                                         {"J", &traj.J},
                                         {"Zfun", &traj.Zfun},
                                         {"K", &traj.K},
                                         {"M", &traj.M},
                                         {"E", &traj.E},
                                         {"local_norm", &traj.local_norm}});
  json rep;
  rep["schema_version"] = 1;
  rep["config"] = config_to_json(cfg);
  rep["grid"] = {{"L", grid.L}, {"n", grid.n}};
  rep["lambda_sq"] = ctx.lambda_sq;
  rep["gamma"] = ctx.Gamma;
  rep["z0"] = out.summary.z0;
  rep["zT"] = out.summary.zT;
  rep["z_ratio"] = out.summary.z_ratio;
  rep["local_norm_max"] = out.summary.local_norm_max;
  rep["local_norm_T"] = out.summary.local_norm_T;
  rep["int_z4"] = out.summary.int_z4;
  rep["int_z4_tail_frac"] = out.summary.int_z4_tail_frac;
  rep["int_rho2u1"] = out.summary.int_rho2u1;
  rep["int_rho2u1_tail_frac"] = out.summary.int_rho2u1_tail_frac;
  rep["stability_const"] = out.summary.stability_const;
  rep["energy_drift"] = out.summary.energy_drift;
  rep["sponge_reflection_warning"] = out.summary.sponge_reflection_warning;
  out.report = rep;
  write_text(outdir + "/summary.json", rep.dump(2) + "\n");
  out.exit_code = 0;
  return out;
}

// ---- parameter scan ---------------------------------------------------------

inline RunConfig scan_instance(const RunConfig& base, const std::string& parameter, double value) {
  RunConfig c = base;
  if (parameter == "m") {
    c.potential_spec = {{"kind", "phi8"}, {"m", value}};
  } else if (parameter == "eta0") {
    json basespec = base.potential_spec;
    if (basespec.value("kind", "") == "perturbed") basespec = basespec.at("base");
    c.potential_spec = {{"kind", "perturbed"},
                        {"base", basespec},
                        {"eta_coeffs", {0.0, 0.0, value}}};
  } else if (parameter == "delta") {
    c.simulation.delta = value;
  } else if (parameter == "A") {
    c.virial.A = value;
  } else if (parameter == "epsilon") {
    c.epsilon = value;
  } else {
    throw std::invalid_argument("scan: parameter must be one of m, eta0, delta, A, epsilon");
  }
  return c;
}

inline int run_scan(const RunConfig& cfg, const std::string& outdir, int jobs) {
  const std::string& param = cfg.scan.parameter;
  const std::vector<double>& values = cfg.scan.values;
  if (values.empty() && param.empty()) {
    // nothing to scan: emit an empty table
    ensure_dir(outdir);
    write_text(outdir + "/scan.csv", "parameter,value,verdict,lambda_sq,gamma,witness_gamma,note\n");
    return 0;
  }
  if (param.empty()) throw std::invalid_argument("scan: missing parameter name");
  struct Row {
    double value = 0.0;
    std::string verdict, note;
    double lambda_sq = std::nan(""), gamma = std::nan(""), witness = std::nan("");
  };
  std::vector<Row> rows(values.size());
  const bool is_sim_scan = (param == "delta");
  auto work = [&](std::size_t i) {
    Row& row = rows[i];
    row.value = values[i];
    try {
      const RunConfig c = scan_instance(cfg, param, values[i]);
      if (is_sim_scan) {
        const std::string sub = outdir + "/" + param + "_" + fmt_double(values[i]);
        const SimulateResult r = simulate(c, sub);
        row.verdict = "ok";
        row.lambda_sq = r.report["lambda_sq"].get<double>();
        row.gamma = r.report["gamma"].get<double>();
        row.note = "z_ratio=" + fmt_double(r.summary.z_ratio) +
                   ";stability=" + fmt_double(r.summary.stability_const);
      } else {
        const AnalysisResult r = analyze(c);
        row.verdict = r.report["verdict"].get<std::string>();
        if (r.h1 && r.h1->pass) row.lambda_sq = r.h1->lambda_sq;
        if (r.fermi) row.gamma = r.fermi->gamma;
        if (r.h3 && r.h3->pass) row.witness = r.h3->witness_gamma;
        if (r.report.contains("error")) row.note = r.report["error"].get<std::string>();
      }
    } catch (const std::exception& e) {
      row.verdict = "error";
      row.note = e.what();
    }
  };
  jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  std::size_t next = 0;
  while (next < values.size()) {
    const std::size_t batch = std::min<std::size_t>(jobs, values.size() - next);
    pool.clear();
    for (std::size_t b = 0; b < batch; ++b) pool.emplace_back(work, next + b);
    for (auto& t : pool) t.join();
    next += batch;
  }
  ensure_dir(outdir);
  std::string csv = "parameter,value,verdict,lambda_sq,gamma,witness_gamma,note\n";
  for (const Row& r : rows) {
    csv += param + "," + fmt_double(r.value) + "," + r.verdict + "," +
           (std::isnan(r.lambda_sq) ? "" : fmt_double(r.lambda_sq)) + "," +
           (std::isnan(r.gamma) ? "" : fmt_double(r.gamma)) + "," +
           (std::isnan(r.witness) ? "" : fmt_double(r.witness)) + "," + r.note + "\n";
  }
  write_text(outdir + "/scan.csv", csv);
  return 0;
}

// ---- built-in golden suite ----------------------------------------------------

struct SelftestItem {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct SelftestReport {
  bool pass = false;
  std::vector<SelftestItem> items;
  json to_json() const {
    json j;
    j["schema_version"] = 1;
    j["pass"] = pass;
    j["items"] = json::array();
    for (const auto& it : items)
      j["items"].push_back({{"name", it.name},
                            {"pass", it.pass},
                            {"measured", it.measured},
                            {"tolerance", it.tolerance}});
    return j;
  }
};

// Golden checks of the quartic model against its closed forms. tol_scale
// loosens every tolerance multiplicatively (monotone: anything passing at 1
// passes at larger values).
inline SelftestReport selftest(const std::string& outdir, double tol_scale = 1.0,
                               std::uint64_t seed = 20240101) {
  SelftestReport rep;
  auto item = [&](const std::string& name, double measured, double tol) {
    rep.items.push_back({name, measured <= tol, measured, tol});
  };
  (void)seed;

  const Potential W = make_phi4();
  const Grid grid(40.0 / W.omega(), 4001);
  const KinkProfile K = solve_kink(W, grid);
  {
    double sup = 0.0;
    for (int i = 0; i < grid.n && grid.x(i) <= 10.0; ++i)
      sup = std::max(sup, std::abs(K.H[i] - std::tanh(grid.x(i) / std::sqrt(2.0))));
    item("kink matches tanh(x/sqrt(2)) on [0,10]", sup, 1e-10 * tol_scale);
  }
  const SchrodingerOperator op = build_L0(W, K, Sector::odd);
  const SpectralData sd = discrete_spectrum(op, W.omega_sq());
  item("odd spectrum holds exactly one mode below the edge",
       std::abs(static_cast<double>(sd.eigenvalues.size()) - 1.0), 0.5);
  const Hypothesis1Report h1 = check_hypothesis1(W, grid);
  item("internal mode eigenvalue 3/2", std::abs(h1.lambda_sq - 1.5), 1e-6 * tol_scale);
  {
    const SchrodingerOperator ope = build_L0(W, K, Sector::even);
    const SpectralData sde = discrete_spectrum(ope, 1.0);
    item("even zero mode", sde.eigenvalues.empty() ? 1.0 : std::abs(sde.eigenvalues[0]),
         1e-6 * tol_scale);
  }
  item("frequency window", h1.window_ok ? 0.0 : 1.0, 0.5);

  const DarbouxData D = build_darboux(W, K, h1.lambda_sq, std::max(h1.convergence, 1e-10));
  {
    double sup = 0.0;
    for (int i = 0; i < grid.n && grid.x(i) <= 10.0; ++i)
      sup = std::max(sup, std::abs(D.P2[i] - 2.0));
    item("transformed potential is flat", sup, 1e-6 * tol_scale);
    item("first transformed tail limit", std::abs(D.P1.back() - 2.0), 1e-6 * tol_scale);
    item("second transformed tail limit", std::abs(D.P2.back() - 2.0), 1e-6 * tol_scale);
  }

  const ResonanceSolution R = solve_resonance(W, K, D.lambda_sq);
  {
    double sup = 0.0;
    for (int i = 0; i < grid.n && grid.x(i) <= 15.0; ++i) {
      const double x = grid.x(i);
      const double u = x / std::sqrt(2.0);
      const double sech = 1.0 / std::cosh(u);
      const double gref = 0.25 * (std::sin(2.0 * x) * (1.0 + 0.5 * sech * sech) +
                                  std::sqrt(2.0) * std::cos(2.0 * x) * std::tanh(u));
      sup = std::max(sup, std::abs(R.g[i] - gref));
    }
    item("doubled-frequency solution matches the closed form on [0,15]", sup, 1e-6 * tol_scale);
    item("tail wavenumber 2", std::abs(fitted_wavenumber(R) - 2.0), 1e-4 * tol_scale);
  }
  const FermiReport fr = compute_gamma(W, K, D.lambda_sq, h1.Y, R.g);
  item("golden-rule constant nonzero and converged",
       (fr.hypothesis2 ? 0.0 : 1.0), 0.5);
  item("mode-orthogonality of the generalized solution", std::abs(fr.Yg_inner), 1e-8 * tol_scale);
  item("quadratic-source route consistency", std::abs(fr.R0g_minus_2gamma),
       1e-8 * std::max(1.0, fr.scale) * tol_scale);

  const Hypothesis3Report h3 =
      check_hypothesis3(D, {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5});
  int worst_count = 0;
  for (int c : h3.negative_counts) worst_count = std::max(worst_count, c);
  item("repulsivity holds at every scanned gamma", static_cast<double>(worst_count), 0.5);

  rep.pass = true;
  for (const auto& it : rep.items) rep.pass = rep.pass && it.pass;
  ensure_dir(outdir);
  write_text(outdir + "/selftest_report.json", rep.to_json().dump(2) + "\n");
  return rep;
}

}  // namespace kinklab
