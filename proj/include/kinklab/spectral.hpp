#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kinklab/grid.hpp"
#include "kinklab/kink.hpp"
#include "kinklab/potential.hpp"
#include "kinklab/tridiag.hpp"

namespace kinklab {

// Operator -a d_xx + V on a parity sector of the line, stored on [0, L].
struct SchrodingerOperator {
  Grid grid;
  Sector sector = Sector::odd;
  double kinetic = 1.0;  // a
  double v_infinity = 0.0;
  std::vector<double> V;

  SchrodingerOperator() = default;
  SchrodingerOperator(Grid g, Sector s, std::vector<double> pot, double v_inf, double a = 1.0)
      : grid(g), sector(s), kinetic(a), v_infinity(v_inf), V(std::move(pot)) {
    if (static_cast<int>(V.size()) != grid.n)
      throw std::invalid_argument("operator: potential sample size does not match the grid");
    if (!(kinetic > 0.0)) throw std::invalid_argument("operator: kinetic scale must be positive");
    if (std::abs(V.back() - v_infinity) > 1e-8 * (1.0 + std::abs(v_infinity)))
      throw std::invalid_argument("operator: V(L) has not reached its limit at the boundary");
  }
};

inline SchrodingerOperator build_L0(const Potential& W, const KinkProfile& K, Sector sector) {
  std::vector<double> V(K.grid.n);
  for (int i = 0; i < K.grid.n; ++i)
    V[i] = (K.H[i] < 0.5) ? W.deriv(2, K.H[i]) : W.at_well(2, -K.sigma[i]);
  return SchrodingerOperator(K.grid, sector, std::move(V), W.omega_sq());
}

inline SchrodingerOperator make_operator(const Grid& g, Sector sector,
                                         const std::function<double(double)>& V, double v_inf,
                                         double a = 1.0) {
  std::vector<double> pot(g.n);
  for (int i = 0; i < g.n; ++i) pot[i] = V(g.x(i));
  return SchrodingerOperator(g, sector, std::move(pot), v_inf, a);
}

namespace detail {

// Second-order sector discretization as a symmetric tridiagonal matrix.
// Odd: Dirichlet at both ends, unknowns at nodes 1..n-2. Even: Neumann at 0
// via the half-cell row, symmetrized; unknowns at nodes 0..n-2. The even
// symmetrization scales the first component by sqrt(2), which makes the
// eigenvectors exactly orthogonal in the trapezoid inner product.
inline SymTridiag assemble_sector(const std::vector<double>& V, double h, double a, Sector sector) {
  const int n = static_cast<int>(V.size());
  const double k = a / (h * h);
  SymTridiag T;
  if (sector == Sector::odd) {
    const int m = n - 2;
    T.d.resize(m);
    T.e.assign(m - 1, -k);
    for (int i = 0; i < m; ++i) T.d[i] = 2.0 * k + V[i + 1];
  } else {
    const int m = n - 1;
    T.d.resize(m);
    T.e.assign(m - 1, -k);
    T.e[0] = -std::sqrt(2.0) * k;
    for (int i = 0; i < m; ++i) T.d[i] = 2.0 * k + V[i];
  }
  return T;
}

// Embed a sector eigenvector into a full grid sample (boundary nodes added,
// even-sector symmetrization undone).
inline std::vector<double> embed_sector_vector(const std::vector<double>& v, int n, Sector sector) {
  std::vector<double> f(n, 0.0);
  if (sector == Sector::odd) {
    for (std::size_t i = 0; i < v.size(); ++i) f[i + 1] = v[i];
  } else {
    f[0] = std::sqrt(2.0) * v[0];
    for (std::size_t i = 1; i < v.size(); ++i) f[i] = v[i];
  }
  return f;
}

inline SchrodingerOperator decimate(const SchrodingerOperator& op) {
  if ((op.grid.n - 1) % 2 != 0)
    throw std::invalid_argument("discrete_spectrum: grid must refine by 2 (n-1 even)");
  const int n2 = (op.grid.n - 1) / 2 + 1;
  std::vector<double> V2(n2);
  for (int i = 0; i < n2; ++i) V2[i] = op.V[2 * i];
  return SchrodingerOperator(Grid(op.grid.L, n2), op.sector, std::move(V2), op.v_infinity, op.kinetic);
}

}  // namespace detail

// Discrete spectrum below `upper`, with Richardson-extrapolated eigenvalues,
// trapezoid-normalized sign-fixed eigenfunctions and per-eigenvalue
// convergence estimates.
struct SpectralData {
  Grid grid;
  Sector sector = Sector::odd;
  double v_infinity = 0.0;
  std::vector<double> eigenvalues;        // extrapolated
  std::vector<double> eigenvalues_raw;    // fine-grid values
  std::vector<double> convergence;        // |fine - coarse| / 3
  std::vector<bool> near_threshold;
  std::vector<std::vector<double>> eigenfunctions;  // full-grid samples
};

inline SpectralData discrete_spectrum(const SchrodingerOperator& op, double upper) {
  if (upper > op.v_infinity + 1e-12 * (1.0 + std::abs(op.v_infinity)))
    throw std::invalid_argument("discrete_spectrum: upper bound must not exceed v_infinity");
  const SymTridiag T = detail::assemble_sector(op.V, op.grid.h(), op.kinetic, op.sector);
  const SchrodingerOperator op2 = detail::decimate(op);
  const SymTridiag T2 = detail::assemble_sector(op2.V, op2.grid.h(), op2.kinetic, op2.sector);

  const std::vector<double> ev_h = eigenvalues_below(T, upper);
  const std::vector<double> ev_2h = eigenvalues_below(T2, upper);

  SpectralData out;
  out.grid = op.grid;
  out.sector = op.sector;
  out.v_infinity = op.v_infinity;
  for (std::size_t j = 0; j < ev_h.size(); ++j) {
    const double raw = ev_h[j];
    double extrap = raw, conv = std::abs(upper - raw);
    if (j < ev_2h.size()) {
      extrap = (4.0 * raw - ev_2h[j]) / 3.0;
      conv = std::abs(raw - ev_2h[j]) / 3.0;
    }
    out.eigenvalues.push_back(extrap);
    out.eigenvalues_raw.push_back(raw);
    out.convergence.push_back(conv);
    out.near_threshold.push_back(upper - extrap < 10.0 * conv);

    std::vector<double> v = inverse_iteration(T, raw);
    std::vector<double> f = detail::embed_sector_vector(v, op.grid.n, op.sector);
    const double nrm = norm(f, op.grid);
    double sign = 1.0;
    if (op.sector == Sector::odd) {
      if (f[1] < 0.0) sign = -1.0;  // Y'(0) > 0
    } else {
      if (f[0] < 0.0) sign = -1.0;  // Y(0) > 0
    }
    for (double& a : f) a *= sign / nrm;
    out.eigenfunctions.push_back(std::move(f));
  }
  return out;
}

// Apply the second-order sector discretization to a full-grid sample
// (diagnostic; the outer node uses a one-sided stencil).
inline std::vector<double> apply_operator(const SchrodingerOperator& op, const std::vector<double>& f) {
  const int n = op.grid.n;
  const double h2 = op.grid.h() * op.grid.h();
  const double ps = (op.sector == Sector::odd) ? -1.0 : 1.0;
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    const double fm = (i == 0) ? ps * f[1] : f[i - 1];
    const double fp = (i + 1 < n) ? f[i + 1] : f[n - 2];  // crude at the outer edge
    r[i] = -op.kinetic * (fm - 2.0 * f[i] + fp) / h2 + op.V[i] * f[i];
  }
  return r;
}

namespace detail {

struct NumerovShot {
  std::vector<double> uL, uR;  // scaled left/right solutions
  int match = 0;
  double wronskian = 0.0;
};

// Two-sided Numerov march with positive rescaling; the sign of the matching
// Wronskian changes exactly at the eigenvalues.
inline NumerovShot numerov_shoot(const SchrodingerOperator& op, double E) {
  const int n = op.grid.n;
  const double h = op.grid.h();
  std::vector<double> fcoef(n);
  for (int i = 0; i < n; ++i) fcoef[i] = (op.V[i] - E) / op.kinetic;
  // outermost sign change of V - E, clamped away from the edges
  int match = n / 3;
  for (int i = n - 2; i >= 1; --i)
    if ((fcoef[i] <= 0.0) != (fcoef[i + 1] <= 0.0)) {
      match = i;
      break;
    }
  match = std::clamp(match, 2, n - 3);

  // cp u_{i+1} = c0 u_i - cm u_{i-1}; solved forward for u_{i+1} and
  // backward for u_{i-1} with the matching coefficient in the denominator
  auto cw = [&](int i) { return 1.0 - h * h * fcoef[i] / 12.0; };
  auto numerov_fwd = [&](double um, double u0, int i) {
    const double c_0 = 2.0 * (1.0 + 5.0 * h * h * fcoef[i] / 12.0);
    return (c_0 * u0 - cw(i - 1) * um) / cw(i + 1);
  };
  auto numerov_bwd = [&](double up, double u0, int i) {
    const double c_0 = 2.0 * (1.0 + 5.0 * h * h * fcoef[i] / 12.0);
    return (c_0 * u0 - cw(i + 1) * up) / cw(i - 1);
  };

  NumerovShot shot;
  shot.match = match;
  shot.uL.assign(n, 0.0);
  shot.uR.assign(n, 0.0);

  if (op.sector == Sector::odd) {
    shot.uL[0] = 0.0;
    shot.uL[1] = h;
  } else {
    shot.uL[0] = 1.0;
    shot.uL[1] = (1.0 + 5.0 * h * h * fcoef[0] / 12.0) / (1.0 - h * h * fcoef[1] / 12.0);
  }
  for (int i = 1; i <= match; ++i) {
    shot.uL[i + 1] = numerov_fwd(shot.uL[i - 1], shot.uL[i], i);
    if (std::abs(shot.uL[i + 1]) > 1e100) {
      for (int j = 0; j <= i + 1; ++j) shot.uL[j] *= 1e-100;
    }
  }

  const double ftail = std::max(fcoef[n - 1], 1e-14);
  const double kdec = std::sqrt(ftail);
  shot.uR[n - 1] = 1e-120;
  shot.uR[n - 2] = shot.uR[n - 1] * std::exp(kdec * h);
  for (int i = n - 2; i >= match; --i) {
    shot.uR[i - 1] = numerov_bwd(shot.uR[i + 1], shot.uR[i], i);
    if (std::abs(shot.uR[i - 1]) > 1e100) {
      for (int j = n - 1; j >= i - 1; --j) shot.uR[j] *= 1e-100;
    }
  }

  const double dL = (shot.uL[match + 1] - shot.uL[match - 1]) / (2.0 * h);
  const double dR = (shot.uR[match + 1] - shot.uR[match - 1]) / (2.0 * h);
  shot.wronskian = shot.uL[match] * dR - dL * shot.uR[match];
  return shot;
}

}  // namespace detail

// Independent eigenvalue oracle: two-sided Numerov shooting with bisection on
// the matching Wronskian inside the supplied bracket.
inline double shooting_eigenvalue(const SchrodingerOperator& op, std::pair<double, double> bracket) {
  double a = bracket.first, b = bracket.second;
  if (!(a < b)) throw std::invalid_argument("shooting: empty bracket");
  double fa = detail::numerov_shoot(op, a).wronskian;
  double fb = detail::numerov_shoot(op, b).wronskian;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0))
    throw std::runtime_error("shooting: no sign change of the matching function in the bracket");
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  while (b - a > 1e-14 * scale) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = detail::numerov_shoot(op, mid).wronskian;
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

struct ShootingEigenpair {
  double eigenvalue = 0.0;
  std::vector<double> Y;  // normalized, sign-fixed full-grid sample
};

inline ShootingEigenpair shooting_eigenpair(const SchrodingerOperator& op,
                                            std::pair<double, double> bracket) {
  ShootingEigenpair out;
  out.eigenvalue = shooting_eigenvalue(op, bracket);
  const detail::NumerovShot shot = detail::numerov_shoot(op, out.eigenvalue);
  const int n = op.grid.n;
  const int m = shot.match;
  std::vector<double> Y(n, 0.0);
  const double s = shot.uL[m] / shot.uR[m];
  for (int i = 0; i <= m; ++i) Y[i] = shot.uL[i];
  for (int i = m + 1; i < n; ++i) Y[i] = s * shot.uR[i];
  const double nrm = norm(Y, op.grid);
  double sign = 1.0;
  if (op.sector == Sector::odd) {
    if (Y[1] < 0.0) sign = -1.0;
  } else {
    if (Y[0] < 0.0) sign = -1.0;
  }
  for (double& a : Y) a *= sign / nrm;
  out.Y = std::move(Y);
  return out;
}

// Existence of an odd internal mode: at least one eigenvalue of L0 strictly
// inside (0, omega^2) on the odd sector. The lowest one is selected; the
// window omega/2 < lambda < omega is a flagged consequence check.
struct Hypothesis1Report {
  bool pass = false;
  double omega_sq = 0.0;
  double lambda_sq = 0.0;
  double convergence = 0.0;
  int multiplicity = 0;
  bool window_ok = false;
  bool near_threshold = false;
  std::vector<double> odd_eigenvalues;
  std::vector<double> Y;  // refined internal mode sample
  std::string note;
};

inline Hypothesis1Report hypothesis1_from_spectrum(const SpectralData& sd, double omega_sq) {
  Hypothesis1Report rep;
  rep.omega_sq = omega_sq;
  for (std::size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    const double ev = sd.eigenvalues[j];
    if (ev > 0.0 && ev < omega_sq) {
      rep.odd_eigenvalues.push_back(ev);
      if (rep.multiplicity == 0) {
        rep.lambda_sq = ev;
        rep.convergence = sd.convergence[j];
        rep.near_threshold = sd.near_threshold[j];
        rep.Y = sd.eigenfunctions[j];
      }
      ++rep.multiplicity;
    }
  }
  rep.pass = rep.multiplicity >= 1;
  if (!rep.pass) {
    rep.note = "no odd eigenvalue in (0, omega^2)";
    return rep;
  }
  const double lam = std::sqrt(rep.lambda_sq);
  const double w = std::sqrt(omega_sq);
  rep.window_ok = (lam > 0.5 * w) && (lam < w);
  if (rep.multiplicity > 1)
    rep.note = "several odd internal modes; the lowest is used, the spectral "
               "repulsivity check downstream will flag the conflict";
  return rep;
}

inline Hypothesis1Report check_hypothesis1(const Potential& W, const Grid& grid) {
  const KinkProfile K = solve_kink(W, grid);
  const SchrodingerOperator op = build_L0(W, K, Sector::odd);
  const SpectralData sd = discrete_spectrum(op, W.omega_sq());
  Hypothesis1Report rep = hypothesis1_from_spectrum(sd, W.omega_sq());
  if (rep.pass) {
    // polish the eigenpair with the shooting oracle
    const double width = std::max(10.0 * rep.convergence, 1e-6);
    const double lo = std::max(1e-12, rep.lambda_sq - width);
    const double hi = std::min(W.omega_sq() - 1e-12, rep.lambda_sq + width);
    try {
      const ShootingEigenpair pair = shooting_eigenpair(op, {lo, hi});
      rep.lambda_sq = pair.eigenvalue;
      rep.Y = pair.Y;
    } catch (const std::exception&) {
      rep.note += (rep.note.empty() ? "" : "; ");
      rep.note += "shooting refinement failed, matrix eigenpair kept";
    }
  }
  return rep;
}

}  // namespace kinklab
