#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinklab/darboux.hpp"
#include "kinklab/grid.hpp"
#include "kinklab/kink.hpp"
#include "kinklab/potential.hpp"
#include "kinklab/resonance.hpp"
#include "kinklab/spectral.hpp"
#include "kinklab/virial.hpp"

namespace kinklab {

struct SpongeConfig {
  bool enabled = true;
  double strength = 1.0;    // peak damping rate, in units of omega
  double width_frac = 0.2;  // fraction of the domain occupied by the layer
};

struct SimConfig {
  std::string mode = "pure-Y";  // pure-Y | bump | file
  double delta = 0.05;
  double bump_width = 2.0;
  double bump_center = 5.0;
  std::string file;
  double T = 400.0;
  double dt_factor = 0.4;   // dt = dt_factor * h
  double cadence = 0.5;     // time between recorded snapshots
  double window_half = 8.0; // half width of the local-norm window
  double delta_max = 0.5;
  SpongeConfig sponge;
};

// Everything the evolution and its diagnostics need, prepared once.
// The background profile `Hd` is the stationary state of the *discrete*
// system (Newton on the finite-difference force), so zero initial data stays
// static to round-off rather than oscillating at the truncation level.
struct SimContext {
  Potential W;
  KinkProfile K;
  std::vector<double> Hd;
  std::vector<double> F0;  // residual discrete force of the background (round-off level)
  double lambda_sq = 0.0, lambda = 0.0;
  std::vector<double> Y;
  DarbouxData D;
  RegularizedTransform T_eps;
  Weights weights;
  std::vector<double> g;
  double Gamma = 0.0;
  std::vector<double> sponge_rate;  // damping profile on the outer layer
  SpongeConfig sponge;

  FunctionalContext functional_context() const {
    FunctionalContext ctx;
    ctx.kink = &K;
    ctx.darboux = &D;
    ctx.transform = &T_eps;
    ctx.weights = &weights;
    ctx.potential = &W;
    ctx.Y = Y;
    ctx.g = g;
    ctx.lambda = lambda;
    ctx.Gamma = Gamma;
    return ctx;
  }
};

// The state is kept relative to the discrete background: p1 = phi1 - Hd.
// Evolving the perturbation keeps the round-off of the update proportional
// to the perturbation itself instead of to the order-one background.
struct FieldState {
  double t = 0.0;
  Grid grid;
  std::vector<double> p1, phi2;
};

namespace detail {

// Newton solve of the discrete stationary problem D2 H - W'(H) = 0 with
// H(0) = 0 and H(L) pinned to the sampled profile.
inline std::vector<double> discrete_kink(const Potential& W, const KinkProfile& K) {
  const Grid& g = K.grid;
  const int n = g.n;
  const double invh2 = 1.0 / (g.h() * g.h());  // force rounded exactly as in step()
  std::vector<double> H = K.H;
  std::vector<double> best = H;
  double best_fmax = 1e300;
  for (int it = 0; it < 50; ++it) {
    std::vector<double> F(n, 0.0);
    double fmax = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      F[i] = (H[i - 1] - 2.0 * H[i] + H[i + 1]) * invh2 - W.deriv(1, H[i]);
      fmax = std::max(fmax, std::abs(F[i]));
    }
    if (fmax < best_fmax) {
      best_fmax = fmax;
      best = H;
    }
    // the attainable floor is the rounding of the discrete force itself
    if (fmax <= 2.0 * std::numeric_limits<double>::epsilon() * invh2) break;
    if (it > 3 && fmax > 0.5 * best_fmax) break;  // stalled at the floor
    Tridiag J;
    const int m = n - 2;
    J.lower.assign(m, invh2);
    J.upper.assign(m, invh2);
    J.diag.resize(m);
    for (int i = 0; i < m; ++i) J.diag[i] = -2.0 * invh2 - W.deriv(2, H[i + 1]);
    std::vector<double> rhs(m);
    for (int i = 0; i < m; ++i) rhs[i] = -F[i + 1];
    const std::vector<double> delta = thomas_solve(J, rhs);
    for (int i = 0; i < m; ++i) H[i + 1] += delta[i];
  }
  if (!(best_fmax < 1e-9)) throw std::runtime_error("discrete_kink: Newton did not converge");
  return best;
}

}  // namespace detail

inline SimContext prepare_sim(const Potential& W, const Grid& grid, double epsilon, double A, double B) {
  SimContext ctx{W, solve_kink(W, grid), {}, {}, 0, 0, {}, {}, {}, {}, {}, 0.0, {}, {}};
  const SchrodingerOperator op = build_L0(W, ctx.K, Sector::odd);
  const SpectralData sd = discrete_spectrum(op, W.omega_sq());
  Hypothesis1Report h1 = hypothesis1_from_spectrum(sd, W.omega_sq());
  if (!h1.pass) throw std::runtime_error("prepare_sim: no odd internal mode");
  const double width = std::max(10.0 * h1.convergence, 1e-6);
  const ShootingEigenpair pair = shooting_eigenpair(
      op, {std::max(1e-12, h1.lambda_sq - width), std::min(W.omega_sq() - 1e-12, h1.lambda_sq + width)});
  ctx.lambda_sq = pair.eigenvalue;
  ctx.lambda = std::sqrt(pair.eigenvalue);
  ctx.Y = pair.Y;
  ctx.Hd = detail::discrete_kink(W, ctx.K);
  ctx.D = build_darboux(W, ctx.K, ctx.lambda_sq, 1e-9);
  ctx.T_eps = make_regularized(grid, epsilon);
  ctx.weights = make_weights(grid, W.omega_sq(), ctx.lambda_sq, A, B);
  const ResonanceSolution R = solve_resonance(W, ctx.K, ctx.lambda_sq);
  ctx.g = R.g;
  std::vector<double> f(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double w3 = (ctx.K.H[i] < 0.5) ? W.deriv(3, ctx.K.H[i]) : W.at_well(3, -ctx.K.sigma[i]);
    f[i] = w3 * ctx.Y[i] * ctx.Y[i] * ctx.g[i];
  }
  ctx.Gamma = 0.25 * integral_even(f, grid);
  ctx.F0.assign(grid.n, 0.0);
  {
    const double invh2 = 1.0 / (grid.h() * grid.h());
    for (int i = 1; i + 1 < grid.n; ++i)
      ctx.F0[i] = (ctx.Hd[i - 1] - 2.0 * ctx.Hd[i] + ctx.Hd[i + 1]) * invh2 - W.deriv(1, ctx.Hd[i]);
  }
  ctx.sponge.enabled = false;  // off until configure_sponge is called
  ctx.sponge_rate.assign(grid.n, 0.0);
  return ctx;
}

inline void configure_sponge(SimContext& ctx, const SpongeConfig& sc) {
  ctx.sponge = sc;
  const Grid& g = ctx.K.grid;
  ctx.sponge_rate.assign(g.n, 0.0);
  if (!sc.enabled) return;
  const double x0 = g.L * (1.0 - sc.width_frac);
  const double omega = ctx.K.omega;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    if (x <= x0) continue;
    const double s = (x - x0) / (g.L - x0);
    ctx.sponge_rate[i] = sc.strength * omega * s * s;  // smooth ramp into the layer
  }
}

// H1 x L2 norm of a perturbation pair.
inline double norm_h1l2(const std::vector<double>& p1, const std::vector<double>& p2, const Grid& g) {
  const std::vector<double> d = fd_derivative(p1, g, Sector::odd);
  return std::sqrt(norm_sq(d, g) + norm_sq(p1, g) + norm_sq(p2, g));
}

inline FieldState initialize(const SimContext& ctx, const SimConfig& cfg) {
  const Grid& g = ctx.K.grid;
  FieldState st;
  st.t = 0.0;
  st.grid = g;
  std::vector<double> p1(g.n, 0.0), p2(g.n, 0.0);
  if (cfg.mode == "pure-Y") {
    for (int i = 0; i < g.n; ++i) p1[i] = cfg.delta * ctx.Y[i];
  } else if (cfg.mode == "bump") {
    std::vector<double> raw(g.n);
    for (int i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      const double up = std::exp(-((x - cfg.bump_center) * (x - cfg.bump_center)) /
                                 (cfg.bump_width * cfg.bump_width));
      const double dn = std::exp(-((x + cfg.bump_center) * (x + cfg.bump_center)) /
                                 (cfg.bump_width * cfg.bump_width));
      raw[i] = up - dn;  // odd
    }
    raw[0] = 0.0;
    const double nrm = norm_h1l2(raw, std::vector<double>(g.n, 0.0), g);
    if (nrm == 0.0) throw std::invalid_argument("initialize: degenerate bump");
    for (int i = 0; i < g.n; ++i) p1[i] = cfg.delta * raw[i] / nrm;
  } else if (cfg.mode == "file") {
    FILE* fp = std::fopen(cfg.file.c_str(), "r");
    if (!fp) throw std::invalid_argument("initialize: cannot open state file " + cfg.file);
    char header[512];
    if (!std::fgets(header, sizeof(header), fp)) {
      std::fclose(fp);
      throw std::invalid_argument("initialize: empty state file");
    }
    for (int i = 0; i < g.n; ++i) {
      double x, a, b;
      if (std::fscanf(fp, "%lf,%lf,%lf", &x, &a, &b) != 3) {
        std::fclose(fp);
        throw std::invalid_argument("initialize: state file truncated");
      }
      if (std::abs(x - g.x(i)) > 1e-9 * (1.0 + g.L)) {
        std::fclose(fp);
        throw std::invalid_argument("initialize: state file grid mismatch");
      }
      p1[i] = a - ctx.Hd[i];
      p2[i] = b;
    }
    std::fclose(fp);
    if (p1[0] != 0.0) throw std::invalid_argument("initialize: phi1(0) must vanish (odd sector)");
  } else {
    throw std::invalid_argument("initialize: unknown mode " + cfg.mode);
  }
  const double nrm = norm_h1l2(p1, p2, g);
  if (nrm > cfg.delta_max)
    throw std::invalid_argument("initialize: perturbation norm exceeds delta_max");
  p1[0] = 0.0;
  st.p1 = std::move(p1);
  st.phi2 = std::move(p2);
  return st;
}

// One leapfrog (kick-drift-kick) step of phi_tt = dxx phi - W'(phi) on the
// odd sector: phi1(0) = 0 and phi1(L) held at the background value. The
// sponge damps phi2 multiplicatively on the outer layer.
inline void step(FieldState& st, const SimContext& ctx, double dt) {
  const Grid& g = st.grid;
  const double h = g.h();
  if (!(dt > 0.0) || dt > 0.5 * h)
    throw std::invalid_argument("step: CFL requires 0 < dt <= 0.5 h");
  const int n = g.n;
  const double invh2 = 1.0 / (h * h);
  const Potential& W = ctx.W;
  auto half_kick = [&]() {
    for (int i = 1; i + 1 < n; ++i) {
      const double force =
          (st.phi1[i - 1] - 2.0 * st.phi1[i] + st.phi1[i + 1]) * invh2 - W.deriv(1, st.phi1[i]);
      st.phi2[i] += 0.5 * dt * force;
    }
  };
  half_kick();
  for (int i = 1; i + 1 < n; ++i) st.phi1[i] += dt * st.phi2[i];
  half_kick();
  if (ctx.sponge.enabled) {
    for (int i = 1; i + 1 < n; ++i)
      if (ctx.sponge_rate[i] > 0.0) st.phi2[i] *= std::exp(-ctx.sponge_rate[i] * dt);
  }
  st.t += dt;
}

struct Decomposition {
  double z1 = 0.0, z2 = 0.0;
  std::vector<double> u1, u2;
};

inline Decomposition decompose(const FieldState& st, const SimContext& ctx) {
  const Grid& g = st.grid;
  Decomposition d;
  std::vector<double> pert(g.n);
  for (int i = 0; i < g.n; ++i) pert[i] = st.phi1[i] - ctx.Hd[i];
  d.z1 = inner(pert, ctx.Y, g);
  d.z2 = inner(st.phi2, ctx.Y, g) / ctx.lambda;
  d.u1.resize(g.n);
  d.u2.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    d.u1[i] = pert[i] - d.z1 * ctx.Y[i];
    d.u2[i] = st.phi2[i] - ctx.lambda * d.z2 * ctx.Y[i];
  }
  return d;
}

// <N, Y> with N = W'(H + p) - W'(H) - W''(H) p, the nonlinear source that
// drives the mode equation.
inline double nonlinear_projection(const FieldState& st, const SimContext& ctx) {
  const Grid& g = st.grid;
  std::vector<double> N(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double p = st.phi1[i] - ctx.Hd[i];
    N[i] = ctx.W.deriv(1, ctx.Hd[i] + p) - ctx.W.deriv(1, ctx.Hd[i]) - ctx.W.deriv(2, ctx.Hd[i]) * p;
  }
  return inner(N, ctx.Y, g);
}

struct ModalTrajectory {
  std::vector<double> t, z1, z2, abs_z, I, Hfun, J, Zfun, K, M, E, local_norm;
  std::vector<double> NY;  // recorded alongside, used by the modal residual check
};

struct RunSummary {
  double T = 0.0;
  double z0 = 0.0, zT = 0.0, z_ratio = 0.0;
  double local_norm_max = 0.0, local_norm_T = 0.0;
  double int_z4 = 0.0, int_z4_tail_frac = 0.0;
  double int_rho2u1 = 0.0, int_rho2u1_tail_frac = 0.0;
  double stability_const = 0.0;
  double energy_first = 0.0, energy_last = 0.0, energy_drift = 0.0;
  bool sponge_reflection_warning = false;
  bool aborted = false;
  std::string abort_reason;
};

inline double local_window_norm(const FieldState& st, const SimContext& ctx, double window_half) {
  const Grid& g = st.grid;
  std::vector<double> pert(g.n), dp;
  for (int i = 0; i < g.n; ++i) pert[i] = st.phi1[i] - ctx.Hd[i];
  dp = fd_derivative(pert, g, Sector::odd);
  double s = 0.0;
  const int iw = std::min(g.n - 1, static_cast<int>(window_half / g.h()));
  for (int i = 0; i <= iw; ++i) {
    const double wgt = (i == 0 || i == iw) ? 0.5 : 1.0;
    s += wgt * (dp[i] * dp[i] + pert[i] * pert[i] + st.phi2[i] * st.phi2[i]);
  }
  return std::sqrt(2.0 * s * g.h());
}

inline RunSummary run_experiment(const SimContext& ctx, const SimConfig& cfg,
                                 ModalTrajectory* trajectory = nullptr) {
  const Grid& g = ctx.K.grid;
  const double dt = cfg.dt_factor * g.h();
  if (!(cfg.T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("run_experiment: bad time setup");
  FieldState st = initialize(ctx, cfg);
  const int steps_per_snap = std::max(1, static_cast<int>(std::lround(cfg.cadence / dt)));
  const long total_steps = static_cast<long>(std::ceil(cfg.T / dt));
  const FunctionalContext fctx = ctx.functional_context();

  ModalTrajectory local;
  ModalTrajectory& traj = trajectory ? *trajectory : local;
  RunSummary sum;
  sum.T = cfg.T;

  std::vector<double> rho2u1(g.n);
  double pert0 = 0.0;
  const double sponge_x0 = g.L * (1.0 - ctx.sponge.width_frac);

  auto record = [&](const FieldState& s) {
    const Decomposition d = decompose(s, ctx);
    const FunctionalSample F = functionals(d.z1, d.z2, d.u1, d.u2, fctx);
    traj.t.push_back(s.t);
    traj.z1.push_back(d.z1);
    traj.z2.push_back(d.z2);
    traj.abs_z.push_back(F.abs_z);
    traj.I.push_back(F.I);
    traj.Hfun.push_back(F.Hfun);
    traj.J.push_back(F.J);
    traj.Zfun.push_back(F.Zfun);
    traj.K.push_back(F.K);
    traj.M.push_back(F.M);
    traj.E.push_back(F.E);
    traj.local_norm.push_back(local_window_norm(s, ctx, cfg.window_half));
    traj.NY.push_back(nonlinear_projection(s, ctx));

    for (int i = 0; i < g.n; ++i)
      rho2u1[i] = ctx.weights.rho[i] * ctx.weights.rho[i] * d.u1[i];
    const double r2 = norm_sq(rho2u1, g);

    std::vector<double> pert(g.n);
    for (int i = 0; i < g.n; ++i) pert[i] = s.phi1[i] - ctx.Hd[i];
    const double pn = norm_h1l2(pert, s.phi2, g);
    if (traj.t.size() == 1) pert0 = pn;
    if (pert0 > 0.0) sum.stability_const = std::max(sum.stability_const, pn / pert0);

    // reflection monitor: perturbation energy fraction parked in the sponge layer
    if (ctx.sponge.enabled) {
      double e_in = 0.0, e_tot = 0.0;
      const std::vector<double> dp = fd_derivative(pert, g, Sector::odd);
      for (int i = 0; i < g.n; ++i) {
        const double e = dp[i] * dp[i] + pert[i] * pert[i] + s.phi2[i] * s.phi2[i];
        e_tot += e;
        if (g.x(i) > sponge_x0) e_in += e;
      }
      if (e_tot > 0.0 && e_in / e_tot > 0.5) sum.sponge_reflection_warning = true;
    }
    return r2;
  };

  std::vector<double> rho2_series;
  rho2_series.push_back(record(st));

  long done = 0;
  while (done < total_steps) {
    for (int s = 0; s < steps_per_snap && done < total_steps; ++s, ++done) {
      step(st, ctx, dt);
      if ((done & 1023) == 0) {
        double mx = 0.0;
        for (double v : st.phi1) mx = std::max(mx, std::abs(v));
        if (!std::isfinite(mx) || mx > 1e6) {
          char buf[128];
          std::snprintf(buf, sizeof(buf), "instability detected at t = %.6g", st.t);
          throw std::runtime_error(buf);
        }
      }
    }
    rho2_series.push_back(record(st));
  }

  const std::size_t N = traj.t.size();
  sum.z0 = traj.abs_z.front();
  sum.zT = traj.abs_z.back();
  sum.z_ratio = (sum.z0 > 0.0) ? sum.zT / sum.z0 : 0.0;
  for (double v : traj.local_norm) sum.local_norm_max = std::max(sum.local_norm_max, v);
  sum.local_norm_T = traj.local_norm.back();
  sum.energy_first = traj.E.front();
  sum.energy_last = traj.E.back();
  for (double e : traj.E)
    sum.energy_drift = std::max(sum.energy_drift, std::abs(e - sum.energy_first) /
                                                      std::max(1e-300, std::abs(sum.energy_first)));
  // time integrals and their Cauchy tails
  double z4 = 0.0, z4_tail = 0.0, r2 = 0.0, r2_tail = 0.0;
  for (std::size_t i = 1; i < N; ++i) {
    const double w = 0.5 * (traj.t[i] - traj.t[i - 1]);
    const double a4 = std::pow(traj.abs_z[i - 1], 4) + std::pow(traj.abs_z[i], 4);
    const double b2 = rho2_series[i - 1] + rho2_series[i];
    z4 += w * a4;
    r2 += w * b2;
    if (traj.t[i] >= 0.5 * cfg.T) {
      z4_tail += w * a4;
      r2_tail += w * b2;
    }
  }
  sum.int_z4 = z4;
  sum.int_rho2u1 = r2;
  sum.int_z4_tail_frac = (z4 > 0.0) ? z4_tail / z4 : 0.0;
  sum.int_rho2u1_tail_frac = (r2 > 0.0) ? r2_tail / r2 : 0.0;
  return sum;
}

struct ModalResidual {
  double r_z1 = 0.0;  // max |dz1/dt - lambda z2|
  double r_z2 = 0.0;  // max |dz2/dt + lambda z1 + <N,Y>/lambda|
};

inline ModalResidual modal_ode_residual(const ModalTrajectory& traj, double lambda) {
  ModalResidual r;
  const std::size_t N = traj.t.size();
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double dt2 = traj.t[i + 1] - traj.t[i - 1];
    const double dz1 = (traj.z1[i + 1] - traj.z1[i - 1]) / dt2;
    const double dz2 = (traj.z2[i + 1] - traj.z2[i - 1]) / dt2;
    r.r_z1 = std::max(r.r_z1, std::abs(dz1 - lambda * traj.z2[i]));
    r.r_z2 = std::max(r.r_z2, std::abs(dz2 + lambda * traj.z1[i] + traj.NY[i] / lambda));
  }
  return r;
}

}  // namespace kinklab
