#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kinklab/kink.hpp"
#include "oracles.hpp"

using namespace kinklab;

TEST_CASE("quartic kink matches the closed form", "[kink]") {
  const Potential W = make_phi4();
  const Grid g(10.0, 1001);
  const KinkProfile K = solve_kink(W, g);
  double sup = 0.0, supd = 0.0;
  for (int i = 0; i < g.n; ++i) {
    sup = std::max(sup, std::abs(K.H[i] - oracles::tanh_kink(g.x(i))));
    supd = std::max(supd, std::abs(K.Hp[i] - oracles::tanh_kink_deriv(g.x(i))));
  }
  CHECK(sup <= 1e-10);
  CHECK(supd <= 1e-10);
  CHECK(K.H[0] == 0.0);
}

TEST_CASE("profile properties", "[kink]") {
  const Potential W = make_phi4();
  const Grid g(10.0, 2001);
  const KinkProfile K = solve_kink(W, g);

  SECTION("first integral holds pointwise") {
    for (int i = 0; i < g.n; i += 37) {
      const double lhs = 0.5 * K.Hp[i] * K.Hp[i];
      const double rhs = W(K.H[i]);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1e-300, rhs));
    }
  }
  SECTION("monotone increasing") {
    for (int i = 0; i < g.n; ++i) {
      if (K.H[i] < 1.0) CHECK(K.Hp[i] > 0.0);
      if (i > 0) CHECK(K.H[i] >= K.H[i - 1]);
    }
  }
  SECTION("second-order residual of the profile equation") {
    // h chosen near the FD2 optimum; the second difference is taken from
    // whichever of H and sigma = 1 - H has the smaller ulp at the node
    // (identical algebraically, less rounding noise in the numerator)
    const Grid gf(10.0, 38001);
    const KinkProfile Kf = solve_kink(W, gf);
    const double h = gf.h();
    double res = 0.0;
    const int lo = gf.n / 20, hi = gf.n - gf.n / 20;
    for (int i = std::max(1, lo); i < std::min(gf.n - 1, hi); ++i) {
      const double d2 =
          (Kf.sigma[i] < 0.5)
              ? -(Kf.sigma[i - 1] - 2.0 * Kf.sigma[i] + Kf.sigma[i + 1]) / (h * h)
              : (Kf.H[i - 1] - 2.0 * Kf.H[i] + Kf.H[i + 1]) / (h * h);
      res = std::max(res, std::abs(d2 - W.deriv(1, Kf.H[i])));
    }
    CHECK(res <= 1e-8);
  }
  SECTION("refinement consistency at shared nodes") {
    const Grid g2(10.0, 4001);
    const KinkProfile K2 = solve_kink(W, g2);
    double diff = 0.0;
    for (int i = 0; i < g.n; ++i) diff = std::max(diff, std::abs(K.H[i] - K2.H[2 * i]));
    CHECK(diff <= 1e-9);
  }
}

TEST_CASE("two-well profile against an independent shooting integration", "[kink]") {
  const Potential W = make_phi8_scaled(2.0);
  const Grid g(30.0, 3001);
  const KinkProfile K = solve_kink(W, g);
  // shoot H'' = W'(H) from the exact slope at zero and compare at x = 1
  auto Wp = [&](double h) { return W.deriv(1, h); };
  const double v0 = std::sqrt(2.0 * W(0.0));
  const auto [h1, v1] = oracles::shoot_second_order(Wp, v0, 1.0, 20000);
  const int i1 = static_cast<int>(1.0 / g.h() + 0.5);
  REQUIRE(std::abs(g.x(i1) - 1.0) < 1e-12);
  CHECK(std::abs(K.H[i1] - h1) <= 1e-8);
}

TEST_CASE("decay constants", "[kink]") {
  const Potential W = make_phi4();

  SECTION("tail ratios are bounded and saturate") {
    const Grid g(18.0, 2001);
    const KinkProfile K = solve_kink(W, g);
    const DecayConstants dc = decay_constants(K);
    CHECK(dc.C0 > 0.0);
    CHECK(dc.C0 <= 2.0 + 1e-9);  // 1 - tanh(u) = 2 e^{-2u}/(1+e^{-2u}) gives ratio -> 2
    CHECK(dc.C1 > 0.0);
    CHECK(std::isfinite(dc.C1));
    CHECK(dc.C1 <= 2.0 * std::sqrt(2.0) + 1e-9);
    // the closed form says the ratio increases monotonically toward its limit
    double prev = 0.0;
    for (int i = 0; i < g.n; ++i) {
      if (g.x(i) < 3.0 || K.sigma[i] <= 0.0) continue;
      const double r = K.sigma[i] * std::exp(K.omega * g.x(i));
      CHECK(r >= prev - 1e-9);
      prev = r;
    }
  }
  SECTION("short domain warning") {
    const Grid g(5.0, 501);
    const KinkProfile K = solve_kink(W, g);
    const DecayConstants dc = decay_constants(K);
    REQUIRE_FALSE(dc.warnings.empty());
  }
}
