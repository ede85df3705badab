#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinklab/grid.hpp"
#include "kinklab/kink.hpp"
#include "kinklab/potential.hpp"
#include "kinklab/spectral.hpp"

namespace kinklab {

// Bounded odd solution of -g'' + W''(H) g = 4 lambda^2 g with g(0) = 0 and
// g'(0) = 1. Boundedness is automatic in the oscillatory regime
// 4 lambda^2 > omega^2; the tail behaves like a sin(k x + theta) with
// k = sqrt(4 lambda^2 - omega^2).
struct ResonanceSolution {
  Grid grid;
  double lambda_sq = 0.0;
  double k = 0.0;
  std::vector<double> g, gp;
  double tail_amplitude = 0.0;
  double tail_phase = 0.0;
  double residual_sup = 0.0;  // FD residual of the defining equation, relative to sup|g|
};

namespace detail {

// RK4 on the joint system (sigma, g, g'), with W''(H) evaluated from sigma.
inline void resonance_march(const Potential& W, const Grid& grid, double freq_sq,
                            std::vector<double>& g, std::vector<double>& gp, int substeps) {
  struct S {
    double sigma, g, gp;
  };
  auto rhs = [&](const S& y) {
    const double wpp = W.at_well(2, -y.sigma);
    return S{-y.sigma * std::sqrt(2.0 * W.tail_A(-y.sigma)), y.gp, (wpp - freq_sq) * y.g};
  };
  auto add = [](const S& a, double c, const S& b) {
    return S{a.sigma + c * b.sigma, a.g + c * b.g, a.gp + c * b.gp};
  };
  const double dx = grid.h() / substeps;
  S y{1.0, 0.0, 1.0};
  g.assign(grid.n, 0.0);
  gp.assign(grid.n, 0.0);
  gp[0] = 1.0;
  for (int i = 0; i + 1 < grid.n; ++i) {
    for (int s = 0; s < substeps; ++s) {
      const S k1 = rhs(y);
      const S k2 = rhs(add(y, 0.5 * dx, k1));
      const S k3 = rhs(add(y, 0.5 * dx, k2));
      const S k4 = rhs(add(y, dx, k3));
      y.sigma += dx / 6.0 * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
      y.g += dx / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g);
      y.gp += dx / 6.0 * (k1.gp + 2.0 * k2.gp + 2.0 * k3.gp + k4.gp);
    }
    g[i + 1] = y.g;
    gp[i + 1] = y.gp;
  }
}

}  // namespace detail

inline ResonanceSolution solve_resonance(const Potential& W, const KinkProfile& K, double lambda_sq) {
  const double omega_sq = W.omega_sq();
  const double freq_sq = 4.0 * lambda_sq;
  if (!(freq_sq > omega_sq))
    throw std::invalid_argument(
        "solve_resonance: resonance frequency below the continuum edge (4 lambda^2 <= omega^2); "
        "the golden-rule condition is ill-posed in this regime");
  ResonanceSolution R;
  R.grid = K.grid;
  R.lambda_sq = lambda_sq;
  R.k = std::sqrt(freq_sq - omega_sq);
  detail::resonance_march(W, K.grid, freq_sq, R.g, R.gp, 4);

  // tail fit on the last quarter: least-squares wavenumber from g'' = -k^2 g,
  // then amplitude from the oscillator invariant g^2 + (g'/k)^2
  const Grid& g = K.grid;
  const int i0 = std::max(2, static_cast<int>(0.75 * (g.n - 1)));
  const std::vector<double> gpp = fd_second(R.g, g, Sector::odd);
  double num = 0.0, den = 0.0;
  for (int i = i0; i + 2 < g.n; ++i) {
    num -= gpp[i] * R.g[i];
    den += R.g[i] * R.g[i];
  }
  const double k_fit = (den > 0.0) ? std::sqrt(std::max(num / den, 0.0)) : 0.0;
  double amp = 0.0;
  int cnt = 0;
  for (int i = i0; i < g.n; ++i) {
    amp += std::sqrt(R.g[i] * R.g[i] + (R.gp[i] / R.k) * (R.gp[i] / R.k));
    ++cnt;
  }
  R.tail_amplitude = (cnt > 0) ? amp / cnt : 0.0;
  R.tail_phase = std::atan2(R.k * R.g[i0], R.gp[i0]) - R.k * g.x(i0);
  R.tail_phase = std::remainder(R.tail_phase, 2.0 * M_PI);
  (void)k_fit;  // the analytic k is kept; fitted_wavenumber() reports the fit
  R.residual_sup = 0.0;
  double gsup = 0.0;
  std::vector<double> V(g.n);
  for (int i = 0; i < g.n; ++i) V[i] = W.at_well(2, -K.sigma[i]);
  for (int i = 1; i + 2 < g.n; ++i) {
    const double r = -gpp[i] + (V[i] - freq_sq) * R.g[i];
    R.residual_sup = std::max(R.residual_sup, std::abs(r));
    gsup = std::max(gsup, std::abs(R.g[i]));
  }
  if (gsup > 0.0) R.residual_sup /= gsup;
  return R;
}

// Fitted tail wavenumber (independent of the analytic k), for diagnostics.
inline double fitted_wavenumber(const ResonanceSolution& R) {
  const Grid& g = R.grid;
  const int i0 = std::max(2, static_cast<int>(0.75 * (g.n - 1)));
  const std::vector<double> gpp = fd_second(R.g, g, Sector::odd);
  double num = 0.0, den = 0.0;
  for (int i = i0; i + 2 < g.n; ++i) {
    num -= gpp[i] * R.g[i];
    den += R.g[i] * R.g[i];
  }
  return (den > 0.0) ? std::sqrt(std::max(num / den, 0.0)) : 0.0;
}

// Golden-rule constant Gamma = (1/4) \int W'''(H) Y^2 g over the line, with a
// refinement study over the grid spacing and the domain length. The defining
// condition is scale-free non-vanishing, so the verdict requires both
// |Gamma| > tol and three-significant-digit agreement across refinements.
struct FermiReport {
  double gamma = 0.0;
  double scale = 0.0;       // quadrature scale of the integrand
  double tol = 0.0;         // threshold for "nonzero"
  double gamma_h2 = 0.0;    // spacing halved
  double gamma_L15 = 0.0;   // domain extended by half
  double truncation = 0.0;  // domain-truncation estimate of the base value
  bool converged = false;
  bool hypothesis2 = false;
  double Yg_inner = 0.0;           // \int Y g (vanishes analytically)
  double R0g_minus_2gamma = 0.0;   // consistency of the independent R0 route
  std::string note;
};

namespace detail {

struct GammaEval {
  double gamma = 0.0, scale = 0.0, truncation = 0.0;
};

inline GammaEval gamma_on_profile(const Potential& W, const KinkProfile& K,
                                  const std::vector<double>& Y, const std::vector<double>& g) {
  const Grid& grid = K.grid;
  std::vector<double> f(grid.n), fabsv(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double w3 = (K.H[i] < 0.5) ? W.deriv(3, K.H[i]) : W.at_well(3, -K.sigma[i]);
    f[i] = w3 * Y[i] * Y[i] * g[i];
    fabsv[i] = std::abs(w3) * Y[i] * Y[i] * std::abs(g[i]);
  }
  GammaEval out;
  out.gamma = 0.25 * integral_even(f, grid);
  out.scale = 0.25 * integral_even(fabsv, grid);
  // tail bound: the integrand decays at least like e^{-omega x} near L
  out.truncation = std::abs(fabsv[grid.n - 1]) / K.omega + 1e-300;
  return out;
}

// Self-contained re-solve at a different resolution/length, used by the
// refinement study: kink + shooting eigenpair + resonance march.
inline GammaEval gamma_at(const Potential& W, const Grid& grid, double lambda_guess) {
  const KinkProfile K = solve_kink(W, grid);
  const SchrodingerOperator op = build_L0(W, K, Sector::odd);
  const double width = std::max(1e-4 * lambda_guess, 1e-6);
  const ShootingEigenpair pair =
      shooting_eigenpair(op, {lambda_guess - width, std::min(lambda_guess + width, W.omega_sq() - 1e-9)});
  std::vector<double> g, gp;
  resonance_march(W, grid, 4.0 * pair.eigenvalue, g, gp, 4);
  return gamma_on_profile(W, K, pair.Y, g);
}

}  // namespace detail

inline FermiReport compute_gamma(const Potential& W, const KinkProfile& K, double lambda_sq,
                                 const std::vector<double>& Y, const std::vector<double>& g) {
  const Grid& grid = K.grid;
  if (std::abs(inner(Y, Y, grid) - 1.0) > 1e-6)
    throw std::invalid_argument("compute_gamma: internal mode must be normalized");
  FermiReport rep;
  const detail::GammaEval base = detail::gamma_on_profile(W, K, Y, g);
  rep.gamma = base.gamma;
  rep.scale = base.scale;
  rep.truncation = base.truncation;
  rep.tol = 1e-6 * base.scale;
  rep.Yg_inner = inner(Y, g, grid);
  std::vector<double> R0(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double w3 = (K.H[i] < 0.5) ? W.deriv(3, K.H[i]) : W.at_well(3, -K.sigma[i]);
    R0[i] = 0.5 * w3 * Y[i] * Y[i];
  }
  rep.R0g_minus_2gamma = inner(R0, g, grid) - 2.0 * rep.gamma;

  // the refinement study re-solves with the slope-one convention at the
  // origin; rescale its values to the caller's normalization of g
  const double h = grid.h();
  const double caller_slope =
      (-25.0 * g[0] + 48.0 * g[1] - 36.0 * g[2] + 16.0 * g[3] - 3.0 * g[4]) / (12.0 * h);
  try {
    rep.gamma_h2 = caller_slope * detail::gamma_at(W, Grid(grid.L, 2 * grid.n - 1), lambda_sq).gamma;
    const int n15 = static_cast<int>(std::lround(1.5 * (grid.n - 1))) + 1;
    rep.gamma_L15 =
        caller_slope * detail::gamma_at(W, Grid(1.5 * grid.L, n15), lambda_sq).gamma;
    const double ref = std::abs(rep.gamma);
    rep.converged = ref > 0.0 && std::abs(rep.gamma_h2 - rep.gamma) <= 1e-3 * ref &&
                    std::abs(rep.gamma_L15 - rep.gamma) <= 1e-3 * ref;
  } catch (const std::exception& e) {
    rep.converged = false;
    rep.note = std::string("refinement study failed: ") + e.what();
  }
  if (!rep.converged && rep.note.empty())
    rep.note = "gamma not stable to three significant digits across refinements; "
               "nonzero verdict withheld";
  rep.hypothesis2 = rep.converged && std::abs(rep.gamma) > rep.tol;
  if (rep.converged && !rep.hypothesis2) rep.note = "gamma below tolerance";
  return rep;
}

}  // namespace kinklab
