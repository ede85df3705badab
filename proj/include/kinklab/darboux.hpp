#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kinklab/grid.hpp"
#include "kinklab/kink.hpp"
#include "kinklab/potential.hpp"
#include "kinklab/spectral.hpp"
#include "kinklab/tridiag.hpp"

namespace kinklab {

// Two-step factorization data. Everything is built from the log-derivative
// fields q0 = H''/H' and q1 = Z'/Z:
//
//   q0 is evaluated in closed form as sgn(H-1) B(H-1)/sqrt(2 A(H-1)), which
//   stays finite through the tail where H'' and H' both vanish;
//   q1 solves the Riccati equation q1' = P1 - lambda^2 - q1^2 with q1(0) = 0.
//
// A forward march of the Riccati equation cannot hold the decaying branch
// across the whole domain in double precision (the admixture of the growing
// branch doubles every ~0.35/mu in x), so the field is integrated outward
// from 0 and inward from L and lambda^2 is refined by bisection until the
// two branches match. The refined value is reported in `lambda_sq`.
struct DarbouxData {
  Grid grid;
  double lambda_sq = 0.0;
  double omega_sq = 0.0;
  std::vector<double> q0, q0p, q1, q1p, P1, P1p, P2, P2p, Z, k1, k1p, k2;
  double match_x = 0.0;
  double match_mismatch = 0.0;  // |q1_out - q1_in| at the matching node after refinement
};

namespace detail {

struct WellFields {
  const Potential* W;

  // All pointwise fields as functions of sigma = 1 - H (sigma in (0, 1]).
  double q0(double s) const { return -W->tail_B(-s) / std::sqrt(2.0 * W->tail_A(-s)); }
  double Hp(double s) const { return s * std::sqrt(2.0 * W->tail_A(-s)); }
  double Wpp(double s) const { return W->at_well(2, -s); }
  double Wppp(double s) const { return W->at_well(3, -s); }
  double P1(double s) const {
    const double q = q0(s);
    return 2.0 * q * q - Wpp(s);
  }
  double q0p(double s) const {
    const double q = q0(s);
    return Wpp(s) - q * q;
  }
  double P1p(double s) const { return 4.0 * q0(s) * q0p(s) - Wppp(s) * Hp(s); }
};

// State for the joint (sigma, q1, integral of q1) march.
struct RiccatiState {
  double sigma, q1, iq;
};

// One RK4 step of sigma' = -Hp(sigma), q1' = P1(sigma) - E - q1^2, iq' = q1.
// The step size may be negative (inward march).
inline RiccatiState rk4_step(const WellFields& F, const RiccatiState& y, double E, double dx) {
  auto rhs = [&](const RiccatiState& s) {
    RiccatiState d;
    d.sigma = -F.Hp(s.sigma);
    d.q1 = F.P1(s.sigma) - E - s.q1 * s.q1;
    d.iq = s.q1;
    return d;
  };
  auto add = [](const RiccatiState& a, double c, const RiccatiState& b) {
    return RiccatiState{a.sigma + c * b.sigma, a.q1 + c * b.q1, a.iq + c * b.iq};
  };
  const RiccatiState k1 = rhs(y);
  const RiccatiState k2 = rhs(add(y, 0.5 * dx, k1));
  const RiccatiState k3 = rhs(add(y, 0.5 * dx, k2));
  const RiccatiState k4 = rhs(add(y, dx, k3));
  RiccatiState out = y;
  out.sigma += dx / 6.0 * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
  out.q1 += dx / 6.0 * (k1.q1 + 2.0 * k2.q1 + 2.0 * k3.q1 + k4.q1);
  out.iq += dx / 6.0 * (k1.iq + 2.0 * k2.iq + 2.0 * k3.iq + k4.iq);
  return out;
}

struct RiccatiTrace {
  std::vector<double> q1, iq, sigma;  // at grid nodes over the marched range
  bool blew_down = false;
  int last_node = 0;
};

inline RiccatiTrace march_out(const WellFields& F, const KinkProfile& K, double E, int node_to,
                              int substeps) {
  const Grid& g = K.grid;
  const double dx = g.h() / substeps;
  RiccatiTrace tr;
  tr.q1.assign(g.n, 0.0);
  tr.iq.assign(g.n, 0.0);
  tr.sigma.assign(g.n, 0.0);
  RiccatiState y{1.0, 0.0, 0.0};
  tr.sigma[0] = 1.0;
  for (int i = 0; i < node_to; ++i) {
    for (int s = 0; s < substeps; ++s) {
      y = rk4_step(F, y, E, dx);
      if (!(y.q1 > -1e6)) {
        tr.blew_down = true;
        tr.last_node = i;
        return tr;
      }
    }
    tr.q1[i + 1] = y.q1;
    tr.iq[i + 1] = y.iq;
    tr.sigma[i + 1] = y.sigma;
  }
  tr.last_node = node_to;
  return tr;
}

inline RiccatiTrace march_in(const WellFields& F, const KinkProfile& K, double E, int node_from,
                             int node_to, int substeps) {
  const Grid& g = K.grid;
  const double dx = -g.h() / substeps;
  RiccatiTrace tr;
  tr.q1.assign(g.n, 0.0);
  tr.iq.assign(g.n, 0.0);
  tr.sigma.assign(g.n, 0.0);
  const double sL = K.sigma[node_from];
  const double p1L = (sL > 0.0) ? F.P1(sL) : K.omega * K.omega;
  const double mu2 = std::max(p1L - E, 1e-14);
  RiccatiState y{sL, -std::sqrt(mu2), 0.0};
  tr.q1[node_from] = y.q1;
  tr.sigma[node_from] = y.sigma;
  for (int i = node_from; i > node_to; --i) {
    for (int s = 0; s < substeps; ++s) y = rk4_step(F, y, E, dx);
    tr.q1[i - 1] = y.q1;
    tr.iq[i - 1] = y.iq;
    tr.sigma[i - 1] = y.sigma;
  }
  tr.last_node = node_to;
  return tr;
}

}  // namespace detail

inline DarbouxData build_darboux(const Potential& W, const KinkProfile& K, double lambda_sq,
                                 double lambda_conv = 1e-8) {
  const Grid& g = K.grid;
  const double omega_sq = W.omega_sq();
  const double mu = std::sqrt(std::max(omega_sq - lambda_sq, 1e-12));
  const detail::WellFields F{&W};
  const int substeps = 2;

  // matching node: deep enough that the outward march is still on the
  // decaying branch, shallow enough that the tail data is meaningful
  const double x_match = std::min(0.45 * g.L, 14.0 / (2.0 * mu));
  int m = std::max(2, std::min(g.n - 3, static_cast<int>(x_match / g.h())));

  auto mismatch = [&](double E) -> double {
    const detail::RiccatiTrace out = detail::march_out(F, K, E, m, substeps);
    if (out.blew_down) return -1e12;
    const detail::RiccatiTrace in = detail::march_in(F, K, E, g.n - 1, m, substeps);
    return out.q1[m] - in.q1[m];
  };

  // Bisection on E: below the principal eigenvalue the outward branch stays
  // above the inward one; above it, the outward solution dives (Z acquires a
  // zero). A failed sign pattern means lambda_sq is not the bottom of the
  // transformed operator's spectrum.
  double width = std::max({10.0 * lambda_conv, 1e-8 * std::abs(lambda_sq), 1e-10});
  double lo = lambda_sq - width, hi = lambda_sq + width;
  double flo = mismatch(lo), fhi = mismatch(hi);
  for (int grow = 0; grow < 20 && (flo < 0.0 || fhi > 0.0); ++grow) {
    width *= 4.0;
    if (width > 0.02 * std::max(1.0, std::abs(lambda_sq))) break;
    lo = lambda_sq - width;
    hi = lambda_sq + width;
    flo = mismatch(lo);
    fhi = mismatch(hi);
  }
  if (flo < 0.0)
    throw std::runtime_error(
        "build_darboux: Riccati field blows down below the supplied eigenvalue; "
        "lambda_sq is not the principal eigenvalue of the first transformed operator "
        "(more than one odd internal mode below it?)");
  if (fhi > 0.0)
    throw std::runtime_error(
        "build_darboux: no Riccati matching point near the supplied eigenvalue");
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = mismatch(mid);
    if (fm > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double E = 0.5 * (lo + hi);

  // final passes: assemble the nodal fields
  const detail::RiccatiTrace out = detail::march_out(F, K, E, m, substeps);
  const detail::RiccatiTrace in = detail::march_in(F, K, E, g.n - 1, m, substeps);
  if (out.blew_down) throw std::runtime_error("build_darboux: Riccati blow-down after refinement");

  DarbouxData D;
  D.grid = g;
  D.lambda_sq = E;
  D.omega_sq = omega_sq;
  D.match_x = g.x(m);
  D.match_mismatch = std::abs(out.q1[m] - in.q1[m]);
  D.q1.assign(g.n, 0.0);
  D.Z.assign(g.n, 0.0);
  std::vector<double> iq(g.n, 0.0);
  for (int i = 0; i <= m; ++i) {
    D.q1[i] = out.q1[i];
    iq[i] = out.iq[i];
  }
  for (int i = m + 1; i < g.n; ++i) {
    D.q1[i] = in.q1[i];
    iq[i] = out.iq[m] + (in.iq[i] - in.iq[m]);
  }
  D.q0.resize(g.n);
  D.q0p.resize(g.n);
  D.P1.resize(g.n);
  D.P1p.resize(g.n);
  D.q1p.resize(g.n);
  D.P2.resize(g.n);
  D.P2p.resize(g.n);
  D.k1.resize(g.n);
  D.k1p.resize(g.n);
  D.k2.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double s = K.sigma[i];
    if (s > 0.0) {
      D.q0[i] = F.q0(s);
      D.q0p[i] = F.q0p(s);
      D.P1[i] = F.P1(s);
      D.P1p[i] = F.P1p(s);
    } else {  // vacuum saturated in double precision
      const double w = std::sqrt(omega_sq);
      D.q0[i] = -w;
      D.q0p[i] = 0.0;
      D.P1[i] = omega_sq;
      D.P1p[i] = 0.0;
    }
    D.q1p[i] = D.P1[i] - E - D.q1[i] * D.q1[i];
    D.P2[i] = 2.0 * E + 2.0 * D.q1[i] * D.q1[i] - D.P1[i];
    D.P2p[i] = 4.0 * D.q1[i] * D.q1p[i] - D.P1p[i];
    D.k1[i] = D.q1[i] + D.q0[i];
    D.k1p[i] = D.q1p[i] + D.q0p[i];
    D.k2[i] = D.q1p[i] + D.q1[i] * D.q0[i];
    D.Z[i] = std::exp(iq[i]);
  }
  return D;
}

inline DarbouxData build_darboux(const Potential& W, const KinkProfile& K, const SpectralData& spec) {
  double lam = 0.0, conv = 1e-8;
  bool found = false;
  for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
    const double ev = spec.eigenvalues[j];
    if (ev > 0.0 && ev < spec.v_infinity) {
      lam = ev;
      conv = spec.convergence[j];
      found = true;
      break;
    }
  }
  if (!found) throw std::invalid_argument("build_darboux: spectrum holds no odd internal mode");
  return build_darboux(W, K, lam, conv);
}

// U1 U0 f = f'' - (k1 f)' + k2 f with fourth-order interior differences; the
// outer two nodes are boundary-degraded (one-sided stencils).
inline std::vector<double> apply_U1U0(const DarbouxData& D, const std::vector<double>& f) {
  const std::vector<double> fp = fd_derivative(f, D.grid, Sector::odd);
  const std::vector<double> fpp = fd_second(f, D.grid, Sector::odd);
  std::vector<double> r(D.grid.n);
  for (int i = 0; i < D.grid.n; ++i)
    r[i] = fpp[i] - (D.k1p[i] * f[i] + D.k1[i] * fp[i]) + D.k2[i] * f[i];
  return r;
}

// (1 - eps d_xx)^{-1} on the odd sector, realized as a tridiagonal
// boundary-value solve with Dirichlet conditions at 0 and L.
struct RegularizedTransform {
  double epsilon = 0.0;
  Grid grid;
  Tridiag A;  // I - eps D2 on interior nodes
};

inline RegularizedTransform make_regularized(const Grid& g, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("regularized transform: epsilon must lie in (0, 1)");
  RegularizedTransform T;
  T.epsilon = epsilon;
  T.grid = g;
  const int m = g.n - 2;
  const double c = epsilon / (g.h() * g.h());
  T.A.lower.assign(m, -c);
  T.A.diag.assign(m, 1.0 + 2.0 * c);
  T.A.upper.assign(m, -c);
  return T;
}

inline std::vector<double> apply_X_eps(const RegularizedTransform& T, const std::vector<double>& rhs) {
  const int n = T.grid.n;
  std::vector<double> inner_rhs(rhs.begin() + 1, rhs.end() - 1);
  std::vector<double> sol = thomas_solve(T.A, inner_rhs);
  std::vector<double> out(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) out[i] = sol[i - 1];
  return out;
}

inline std::vector<double> apply_S_eps(const RegularizedTransform& T, const DarbouxData& D,
                                       const std::vector<double>& f) {
  return apply_X_eps(T, apply_U1U0(D, f));
}

// ||rho^2 u|| / ||rho S_eps u|| for odd u orthogonal to the internal mode.
// The caller-provided u is projected; a vanishing denominator for nonzero u
// would contradict the kernel equivalence and is reported as an error.
inline double coercivity_ratio(const RegularizedTransform& T, const DarbouxData& D,
                               const std::vector<double>& Y, const std::vector<double>& rho,
                               std::vector<double> u) {
  const Grid& g = D.grid;
  const double un0 = norm(u, g);
  const double c = inner(u, Y, g);
  for (int i = 0; i < g.n; ++i) u[i] -= c * Y[i];
  const double un = norm(u, g);
  if (un <= 1e-12 * un0)
    throw std::invalid_argument("coercivity_ratio: u is a multiple of the mode");
  if (std::abs(inner(u, Y, g)) > 1e-10 * un)
    throw std::runtime_error("coercivity_ratio: projection failed");
  std::vector<double> num(g.n), den(g.n);
  const std::vector<double> v = apply_S_eps(T, D, u);
  for (int i = 0; i < g.n; ++i) {
    num[i] = rho[i] * rho[i] * u[i];
    den[i] = rho[i] * v[i];
  }
  const double dn = norm(den, g);
  if (dn == 0.0) throw std::runtime_error("coercivity_ratio: S_eps u vanished for nonzero u");
  return norm(num, g) / dn;
}

}  // namespace kinklab
