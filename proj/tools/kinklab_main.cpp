// Command-line front end: analysis, simulation, and parameter scans for
// front stability in double-well scalar field models.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "kinklab/pipeline.hpp"

namespace {

kinklab::RunConfig load_config(const std::string& path, std::uint64_t seed_override,
                               bool seed_set, const std::string& out_override) {
  kinklab::json j = kinklab::json::object();
  if (!path.empty()) j = kinklab::json::parse(kinklab::read_text(path));
  kinklab::RunConfig cfg = kinklab::config_from_json(j);
  if (seed_set) cfg.seed = seed_override;
  if (!out_override.empty()) cfg.output_dir = out_override;
  return cfg;
}

void print_selftest(const kinklab::SelftestReport& rep) {
  for (const auto& it : rep.items)
    std::printf("[%s] %s: measured %.3e (tol %.3e)\n", it.pass ? "PASS" : "FAIL",
                it.name.c_str(), it.measured, it.tolerance);
  std::printf("%s\n", rep.pass ? "selftest: all items passed" : "selftest: FAILURES above");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"front stability analysis and simulation for double-well scalar fields"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand name too

  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON configuration file")->expected(1);
  app.add_option("--out", out_dir, "output directory (overrides config)")->expected(1);
  app.add_option("--jobs", jobs, "parallel jobs for scans")->expected(1);
  app.add_option("--seed", seed, "seed for randomized probes (overrides config)")
      ->expected(1)
      ->each([&](const std::string&) { seed_set = true; });

  auto* c_validate = app.add_subcommand("validate", "check the potential's admissibility clauses");
  auto* c_kink = app.add_subcommand("kink", "solve the static front profile and emit CSV");
  auto* c_spectrum = app.add_subcommand("spectrum", "discrete spectrum and mode-existence report");
  auto* c_darboux = app.add_subcommand("darboux", "two-step factorization fields and summary");
  auto* c_fgr = app.add_subcommand("fgr", "golden-rule constant and the bounded solution");
  auto* c_hyp3 = app.add_subcommand("hyp3", "odd-sector repulsivity scan");
  auto* c_analyze = app.add_subcommand("analyze", "run the whole hypothesis pipeline");
  auto* c_simulate = app.add_subcommand("simulate", "evolve an odd perturbation and record diagnostics");
  auto* c_scan = app.add_subcommand("scan", "run the pipeline across a parameter sweep");
  auto* c_selftest = app.add_subcommand("selftest", "golden checks of the quartic model");

  double selftest_tol_scale = 1.0;
  c_selftest->add_option("--tol-scale", selftest_tol_scale,
                         "multiply every selftest tolerance (>= 1 loosens)");

  CLI11_PARSE(app, argc, argv);

  try {
    const kinklab::RunConfig cfg = load_config(config_path, seed, seed_set, out_dir);
    const std::string& out = cfg.output_dir;
    if (c_validate->parsed()) return kinklab::run_validate(cfg, out);
    if (c_kink->parsed()) return kinklab::run_kink(cfg, out);
    if (c_spectrum->parsed()) return kinklab::run_spectrum(cfg, out);
    if (c_darboux->parsed()) return kinklab::run_darboux(cfg, out);
    if (c_fgr->parsed()) return kinklab::run_fgr(cfg, out);
    if (c_hyp3->parsed()) return kinklab::run_hyp3(cfg, out);
    if (c_analyze->parsed()) {
      const int code = kinklab::run_analyze(cfg, out);
      std::printf("analysis verdict: %s (report in %s/analysis.json)\n",
                  code == 0 ? "all-pass" : (code == 2 ? "fail" : "error"), out.c_str());
      return code;
    }
    if (c_simulate->parsed()) {
      const kinklab::SimulateResult r = kinklab::simulate(cfg, out);
      std::printf("simulate: T=%g |z| ratio %.4f, stability const %.3f, outputs in %s\n",
                  r.summary.T, r.summary.z_ratio, r.summary.stability_const, out.c_str());
      return r.exit_code;
    }
    if (c_scan->parsed()) return kinklab::run_scan(cfg, out, jobs);
    if (c_selftest->parsed()) {
      const kinklab::SelftestReport rep = kinklab::selftest(out, selftest_tol_scale, cfg.seed);
      print_selftest(rep);
      return rep.pass ? 0 : 2;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
