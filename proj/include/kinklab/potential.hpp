#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kinklab/polynomial.hpp"

namespace kinklab {

struct ValidationClause {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  bool pass = false;
  double omega_sq = 0.0;
  std::vector<ValidationClause> clauses;

  std::string summary() const {
    std::string s;
    for (const auto& c : clauses) {
      s += (c.pass ? "[pass] " : "[FAIL] ");
      s += c.name;
      if (!c.detail.empty()) s += " (" + c.detail + ")";
      s += "\n";
    }
    return s;
  }
};

// Double-well potential with exact derivatives up to fourth order.
//
// Every supported family is an even polynomial in phi, stored both centered
// at 0 and Taylor-shifted to +1. Near the wells the shifted, root-factored
// forms W(1+s) = s^2 A(s) and W'(1+s) = s B(s) are used so that quantities
// like W'(H)/sqrt(2 W(H)) keep full relative precision through the kink tail.
class Potential {
 public:
  enum class Kind { phi4, phi8, poly, perturbed };

  Potential(Kind kind, std::string name, Polynomial p)
      : kind_(kind), name_(std::move(name)), p_(std::move(p)) {
    build_derivatives();
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Polynomial& coeffs() const { return p_; }
  double omega_sq() const { return omega_sq_; }
  double omega() const { return std::sqrt(omega_sq_); }
  bool well_structure_ok() const { return pinned_; }
  double root_residual() const { return root_residual_; }

  // k-th derivative, k = 0..4. Uses the centered form near 0 and the
  // shifted form near the wells; evenness maps phi < 0 to phi > 0.
  double deriv(int k, double phi) const {
    const double sign = (phi < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
    const double a = std::abs(phi);
    if (a < 0.5) return sign * d0_[k](a);
    return sign * d1_[k](a - 1.0);
  }
  double operator()(double phi) const { return deriv(0, phi); }

  // Shifted evaluation about the well: k-th derivative at phi = 1 + s.
  double at_well(int k, double s) const { return d1_[k](s); }

  // Factored well forms: W(1+s) = s^2 A(s), W'(1+s) = s B(s).
  double tail_A(double s) const { return A_(s); }
  double tail_B(double s) const { return B_(s); }

 private:
  void build_derivatives() {
    d0_[0] = p_;
    for (int k = 1; k <= 4; ++k) d0_[k] = d0_[k - 1].derivative();
    Polynomial sh = taylor_shift(p_, 1.0);
    const double cs = std::max(sh.max_abs_coeff(), 1e-30);
    root_residual_ = std::max(std::abs(sh.c.size() > 0 ? sh.c[0] : 0.0),
                              std::abs(sh.c.size() > 1 ? sh.c[1] : 0.0)) /
                     cs;
    pinned_ = root_residual_ <= 1e-10;
    if (pinned_ && sh.c.size() >= 2) {
      // The double zero at the well is exact by contract; pin it so the
      // factored tail forms are exact too.
      sh.c[0] = 0.0;
      sh.c[1] = 0.0;
    }
    d1_[0] = sh;
    for (int k = 1; k <= 4; ++k) d1_[k] = d1_[k - 1].derivative();
    if (sh.c.size() >= 3) {
      A_.c.assign(sh.c.begin() + 2, sh.c.end());
      B_.c.resize(sh.c.size() - 2);
      for (std::size_t k = 2; k < sh.c.size(); ++k) B_.c[k - 2] = static_cast<double>(k) * sh.c[k];
      omega_sq_ = 2.0 * sh.c[2];
    } else {
      A_.c = {0.0};
      B_.c = {0.0};
      omega_sq_ = 0.0;
    }
  }

  Kind kind_;
  std::string name_;
  Polynomial p_;
  std::array<Polynomial, 5> d0_;  // derivatives about 0
  std::array<Polynomial, 5> d1_;  // derivatives about +1 (argument s = phi - 1)
  Polynomial A_, B_;
  double omega_sq_ = 0.0;
  double root_residual_ = 0.0;
  bool pinned_ = false;
};

inline Potential make_phi4() {
  return Potential(Potential::Kind::phi4, "phi4", Polynomial{{0.25, 0.0, -0.5, 0.0, 0.25}});
}

// Scaled two-parameter-well family W_m = (1/(4 m^4)) (phi^2-1)^2 (phi^2-m^2)^2.
inline Potential make_phi8_scaled(double m) {
  if (!(m > 1.0))
    throw std::invalid_argument("phi8: require m > 1 (inner well collides with outer zeros)");
  const Polynomial q{{m * m, 0.0, -(1.0 + m * m), 0.0, 1.0}};
  Polynomial p = scale(multiply(q, q), 1.0 / (4.0 * m * m * m * m));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "phi8(m=%g)", m);
  return Potential(Potential::Kind::phi8, buf, std::move(p));
}

inline Potential make_poly(std::vector<double> coeffs, std::string name = "poly") {
  if (coeffs.empty()) throw std::invalid_argument("poly potential: empty coefficient list");
  return Potential(Potential::Kind::poly, std::move(name), Polynomial{std::move(coeffs)});
}

// Even polynomial multiplier eta; eta0 bounds |eta^(k)| on [-1,1] for k = 0..4.
struct EtaPerturbation {
  Polynomial eta;
  double eta0 = 0.0;

  static EtaPerturbation from_coeffs(std::vector<double> coeffs) {
    EtaPerturbation e;
    e.eta = Polynomial{std::move(coeffs)};
    for (std::size_t k = 1; k < e.eta.c.size(); k += 2)
      if (e.eta.c[k] != 0.0) throw std::invalid_argument("eta perturbation must be even");
    std::array<Polynomial, 5> d;
    d[0] = e.eta;
    for (int k = 1; k <= 4; ++k) d[k] = d[k - 1].derivative();
    const int samples = 2001;
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double x = -1.0 + 2.0 * i / (samples - 1);
      for (int k = 0; k <= 4; ++k) m = std::max(m, std::abs(d[k](x)));
    }
    e.eta0 = m;
    return e;
  }
};

ValidationReport validate(const Potential& W);

// W_eta = (1 + eta) W, derivatives by the exact polynomial product.
inline Potential perturb(const Potential& base, const EtaPerturbation& eta, double eta0_max = 0.1) {
  if (eta.eta0 > eta0_max)
    throw std::invalid_argument("perturb: eta0 exceeds the configured threshold");
  Polynomial one_plus_eta = eta.eta;
  if (one_plus_eta.c.empty()) one_plus_eta.c = {0.0};
  one_plus_eta.c[0] += 1.0;
  Potential out(Potential::Kind::perturbed, base.name() + "+eta", multiply(one_plus_eta, base.coeffs()));
  const ValidationReport rep = validate(out);
  if (!rep.pass)
    throw std::runtime_error("perturb: perturbed potential fails validation\n" + rep.summary());
  return out;
}

// Checks the admissibility clauses on sample meshes; failures are reported,
// never thrown.
inline ValidationReport validate(const Potential& W) {
  ValidationReport rep;
  rep.omega_sq = W.omega_sq();
  char buf[128];

  {  // evenness, structural and sampled
    bool even = true;
    for (std::size_t k = 1; k < W.coeffs().c.size(); k += 2)
      if (std::abs(W.coeffs().c[k]) > 1e-14 * std::max(1.0, W.coeffs().max_abs_coeff())) even = false;
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double x = 2.0 * i / 200.0;
      worst = std::max(worst, std::abs(W(x) - W(-x)));
    }
    even = even && worst <= 1e-12 * std::max(1.0, W.coeffs().max_abs_coeff());
    std::snprintf(buf, sizeof(buf), "max |W(x)-W(-x)| = %.3g", worst);
    rep.clauses.push_back({"W is even", even, buf});
  }
  {  // double zero at the wells
    const bool ok = W.well_structure_ok();
    std::snprintf(buf, sizeof(buf), "relative residual of W(1), W'(1): %.3g", W.root_residual());
    rep.clauses.push_back({"W(+-1) = 0 and W'(+-1) = 0", ok, buf});
  }
  {  // curvature at the wells
    const bool ok = W.omega_sq() > 0.0 && std::isfinite(W.omega_sq());
    std::snprintf(buf, sizeof(buf), "omega^2 = %.17g", W.omega_sq());
    rep.clauses.push_back({"W''(+-1) > 0", ok, buf});
  }
  {  // strict positivity between the wells (margin keeps off the exact zeros)
    const int mesh = 10000;
    const double margin = 1e-3;
    double wmin = 1e300, xmin = 0.0;
    for (int i = 0; i <= mesh; ++i) {
      const double x = (-1.0 + margin) + (2.0 - 2.0 * margin) * i / mesh;
      const double v = W(x);
      if (v < wmin) {
        wmin = v;
        xmin = x;
      }
    }
    std::snprintf(buf, sizeof(buf), "min W = %.3g at phi = %.4f", wmin, xmin);
    rep.clauses.push_back({"W > 0 on (-1, 1)", wmin > 0.0, buf});
  }
  {  // nonnegativity on a wider sample window
    const int mesh = 10000;
    double wmin = 1e300, xmin = 0.0;
    for (int i = 0; i <= mesh; ++i) {
      const double x = -2.0 + 4.0 * i / mesh;
      const double v = W(x);
      if (v < wmin) {
        wmin = v;
        xmin = x;
      }
    }
    const double tol = 1e-12 * std::max(1.0, W.coeffs().max_abs_coeff());
    std::snprintf(buf, sizeof(buf), "min W = %.3g at phi = %.4f", wmin, xmin);
    rep.clauses.push_back({"W >= 0 on [-2, 2]", wmin >= -tol, buf});
  }

  rep.pass = true;
  for (const auto& c : rep.clauses) rep.pass = rep.pass && c.pass;
  return rep;
}

}  // namespace kinklab
