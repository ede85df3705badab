#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kinklab/resonance.hpp"
#include "oracles.hpp"

using namespace kinklab;

namespace {

struct Phi4Res {
  Potential W = make_phi4();
  Grid g{40.0 / std::sqrt(2.0), 4001};
  KinkProfile K;
  ShootingEigenpair mode;
  ResonanceSolution R;

  Phi4Res()
      : K(solve_kink(W, g)),
        mode(shooting_eigenpair(build_L0(W, K, Sector::odd), {1.2, 1.8})),
        R(solve_resonance(W, K, mode.eigenvalue)) {}
};

const Phi4Res& phi4_res() {
  static const Phi4Res s;
  return s;
}

}  // namespace

TEST_CASE("bounded doubled-frequency solution for the quartic model", "[resonance]") {
  const auto& S = phi4_res();
  CHECK(S.R.g[0] == 0.0);
  double sup = 0.0;
  for (int i = 0; i < S.g.n; ++i) {
    if (S.g.x(i) > 15.0) break;
    sup = std::max(sup, std::abs(S.R.g[i] - oracles::phi4_resonance(S.g.x(i))));
  }
  CHECK(sup <= 1e-6);
  CHECK(fitted_wavenumber(S.R) == Catch::Approx(2.0).margin(1e-4));
  CHECK(S.R.tail_amplitude == Catch::Approx(std::sqrt(3.0) / 4.0).epsilon(1e-3));
}

TEST_CASE("subcritical frequency is rejected", "[resonance]") {
  const auto& S = phi4_res();
  CHECK_THROWS_AS(solve_resonance(S.W, S.K, 0.4), std::invalid_argument);
}

TEST_CASE("golden-rule constant for the quartic model", "[resonance]") {
  const auto& S = phi4_res();
  const FermiReport rep = compute_gamma(S.W, S.K, S.mode.eigenvalue, S.mode.Y, S.R.g);

  SECTION("nonzero and refinement-stable") {
    CHECK(rep.converged);
    CHECK(rep.hypothesis2);
    CHECK(std::abs(rep.gamma) > rep.tol);
    CHECK(std::abs(rep.gamma_h2 - rep.gamma) <= 1e-3 * std::abs(rep.gamma));
    CHECK(std::abs(rep.gamma_L15 - rep.gamma) <= 1e-3 * std::abs(rep.gamma));
  }

  SECTION("matches the closed-form quadrature oracle") {
    // Gamma = (1/4) int_R W'''(H) Y^2 g with every factor in closed form
    auto integrand = [](double x) {
      const double H = oracles::tanh_kink(x);
      const double Y = oracles::phi4_mode(x);
      return 6.0 * H * Y * Y * oracles::phi4_resonance(x);
    };
    const double oracle = 2.0 * 0.25 * oracles::adaptive_simpson(integrand, 0.0, 28.0, 1e-13);
    CHECK(rep.gamma == Catch::Approx(oracle).epsilon(1e-5));
  }

  SECTION("mode-orthogonality of the generalized solution") {
    CHECK(std::abs(rep.Yg_inner) <= 1e-8);
  }

  SECTION("independent route through the quadratic source agrees") {
    CHECK(std::abs(rep.R0g_minus_2gamma) <= 1e-8 * std::max(1.0, rep.scale));
  }

  SECTION("scale covariance of the verdict") {
    for (double s : {0.5, 2.0}) {
      std::vector<double> gs = S.R.g;
      for (double& v : gs) v *= s;
      const FermiReport r2 = compute_gamma(S.W, S.K, S.mode.eigenvalue, S.mode.Y, gs);
      CHECK(r2.gamma == Catch::Approx(s * rep.gamma).epsilon(1e-12));
      CHECK(r2.hypothesis2 == rep.hypothesis2);
    }
  }
}

TEST_CASE("stepper residual decreases at high order", "[resonance]") {
  const auto& S = phi4_res();
  auto residual_at = [&](int n) {
    const Grid g(20.0, n);
    const KinkProfile K = solve_kink(S.W, g);
    const ResonanceSolution R = solve_resonance(S.W, K, S.mode.eigenvalue);
    return R.residual_sup;
  };
  const double r1 = residual_at(1001);
  const double r2 = residual_at(2001);
  // combined RK4 march + FD4 residual evaluation: at least third order overall
  CHECK(r1 / r2 >= 8.0);
}

TEST_CASE("domain-length robustness of the constant", "[resonance]") {
  const auto& S = phi4_res();
  const FermiReport rep = compute_gamma(S.W, S.K, S.mode.eigenvalue, S.mode.Y, S.R.g);
  CHECK(std::abs(rep.gamma_L15 - rep.gamma) <= std::max(rep.truncation * 10.0, 1e-3 * std::abs(rep.gamma)));
}
