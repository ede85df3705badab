#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinklab/grid.hpp"
#include "kinklab/potential.hpp"
#include "kinklab/quadrature.hpp"

namespace kinklab {

// Static front profile on [0, L]: H solves H'' = W'(H) with H(0) = 0 and
// H -> 1. Alongside H the distance to the vacuum sigma = 1 - H is kept at
// full relative precision; the far tail of every derived quantity is
// evaluated from sigma, never from the cancellation-prone difference 1 - H.
struct KinkProfile {
  Grid grid;
  double omega = 0.0;
  std::vector<double> H, Hp, Hpp, Hppp;
  std::vector<double> sigma;  // 1 - H
};

namespace detail {

// Integrand of x(t) after the substitution phi = 1 - e^{-t}: the first
// integral H' = sqrt(2 W(H)) gives dx/dt = 1 / sqrt(2 A(-sigma)) with
// sigma = e^{-t}, which is smooth up to the vacuum.
struct KinkChart {
  const Potential* W;
  double operator()(double t) const {
    const double s = std::exp(-t);
    const double a = W->tail_A(-s);
    if (!(a > 0.0)) throw std::runtime_error("kink: W(phi)/(1-phi)^2 not positive on the well run");
    return 1.0 / std::sqrt(2.0 * a);
  }
};

}  // namespace detail

inline KinkProfile solve_kink(const Potential& W, const Grid& grid) {
  {
    const ValidationReport rep = validate(W);
    if (!rep.pass)
      throw std::invalid_argument("solve_kink: potential fails validation\n" + rep.summary());
  }
  const detail::KinkChart G{&W};
  KinkProfile K;
  K.grid = grid;
  K.omega = W.omega();
  K.H.resize(grid.n);
  K.Hp.resize(grid.n);
  K.Hpp.resize(grid.n);
  K.Hppp.resize(grid.n);
  K.sigma.resize(grid.n);

  double t_prev = 0.0, x_prev = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double xi = grid.x(i);
    double t = t_prev;
    if (i > 0) {
      t = t_prev + (xi - x_prev) / G(t_prev);  // first guess from the local slope
      double x_at_t = x_prev + integrate_panels(G, t_prev, t, 1.0);
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        const double r = x_at_t - xi;
        if (std::abs(r) <= 1e-14 * (1.0 + xi)) {
          converged = true;
          break;
        }
        double t_new = t - r / G(t);
        if (t_new < t_prev) t_new = 0.5 * (t + t_prev);
        if (t_new > t)
          x_at_t += integrate_panels(G, t, t_new, 1.0);
        else
          x_at_t -= integrate_panels(G, t_new, t, 1.0);
        t = t_new;
      }
      if (!converged) throw std::runtime_error("solve_kink: chart inversion failed to converge");
    }
    const double s = std::exp(-t);
    K.sigma[i] = s;
    K.H[i] = 1.0 - s;
    if (K.H[i] < 0.5) {
      K.Hp[i] = std::sqrt(2.0 * W(K.H[i]));
      K.Hpp[i] = W.deriv(1, K.H[i]);
      K.Hppp[i] = W.deriv(2, K.H[i]) * K.Hp[i];
    } else {
      K.Hp[i] = s * std::sqrt(2.0 * W.tail_A(-s));
      K.Hpp[i] = -s * W.tail_B(-s);
      K.Hppp[i] = W.at_well(2, -s) * K.Hp[i];
    }
    t_prev = t;
    x_prev = xi;
  }
  return K;
}

// Smallest constants with |H - 1| <= C0 e^{-omega x} and |H^(k)| <= C_k e^{-omega x}
// on the grid. Nodes where the quantity has saturated to zero in double
// precision are skipped.
struct DecayConstants {
  double C0 = 0.0, C1 = 0.0, C2 = 0.0, C3 = 0.0;
  std::vector<std::string> warnings;
};

inline DecayConstants decay_constants(const KinkProfile& K) {
  DecayConstants out;
  const Grid& g = K.grid;
  const double w = K.omega;
  if (std::exp(-w * g.L) > 1e-12)
    out.warnings.push_back("domain too short for tail-sensitive use: exp(-omega L) > 1e-12");

  auto fit = [&](const std::vector<double>& f, bool use_sigma) {
    double c = 0.0, c_from = 0.0;
    const double x_late = 0.75 * g.L;
    for (int i = 0; i < g.n; ++i) {
      const double v = use_sigma ? K.sigma[i] : std::abs(f[i]);
      if (v <= 0.0) continue;
      const double r = std::exp(w * g.x(i) + std::log(v));
      c = std::max(c, r);
      if (g.x(i) <= x_late) c_from = std::max(c_from, r);
    }
    if (c_from > 0.0 && c > 2.0 * c_from)
      throw std::runtime_error("decay_constants: ratio still growing near the boundary "
                               "(wrong omega or domain too short)");
    return c;
  };
  out.C0 = fit(K.H, true);
  out.C1 = fit(K.Hp, false);
  out.C2 = fit(K.Hpp, false);
  out.C3 = fit(K.Hppp, false);
  return out;
}

}  // namespace kinklab
