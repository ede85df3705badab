#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kinklab/potential.hpp"
#include "oracles.hpp"

using namespace kinklab;

TEST_CASE("quartic double well closed forms", "[potential]") {
  const Potential W = make_phi4();
  CHECK(W(0.0) == Catch::Approx(0.25).margin(1e-15));
  CHECK(W.deriv(2, 1.0) == Catch::Approx(2.0).margin(1e-14));
  CHECK(W.omega_sq() == Catch::Approx(2.0).margin(1e-14));
  CHECK(W(1.0) == 0.0);
  CHECK(W.deriv(1, 1.0) == 0.0);
  // third derivative of (phi^2-1)^2/4 is 6 phi
  CHECK(W.deriv(3, 0.5) == Catch::Approx(3.0).margin(1e-13));
}

TEST_CASE("scaled two-well family", "[potential]") {
  const Potential W2 = make_phi8_scaled(2.0);
  CHECK(W2.omega_sq() == Catch::Approx(1.125).margin(1e-13));
  for (double m : {1.5, 2.0, 5.0}) {
    const Potential Wm = make_phi8_scaled(m);
    CHECK(std::abs(Wm(1.0)) < 1e-15);
  }
  CHECK_THROWS_AS(make_phi8_scaled(1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_phi8_scaled(0.5), std::invalid_argument);

  // large-m limit approaches the quartic well, monotonically on [-1, 1]
  const Potential W4 = make_phi4();
  auto supdiff = [&](double m) {
    const Potential Wm = make_phi8_scaled(m);
    double s = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double phi = -1.0 + 2.0 * i / 400.0;
      s = std::max(s, std::abs(Wm(phi) - W4(phi)));
    }
    return s;
  };
  const double d10 = supdiff(10.0), d100 = supdiff(100.0);
  CHECK(d100 < d10);
  CHECK(d100 < 1e-3);
}

TEST_CASE("multiplicative perturbation", "[potential]") {
  const Potential W = make_phi4();

  SECTION("identity perturbation") {
    const EtaPerturbation zero = EtaPerturbation::from_coeffs({0.0});
    const Potential Wp = perturb(W, zero);
    for (double phi : {-1.5, -0.3, 0.0, 0.7, 1.0, 1.4})
      for (int k = 0; k <= 4; ++k) CHECK(Wp.deriv(k, phi) == Catch::Approx(W.deriv(k, phi)).margin(1e-15));
  }

  SECTION("constant eta scales every derivative exactly") {
    const EtaPerturbation c = EtaPerturbation::from_coeffs({0.01});
    const Potential Wp = perturb(W, c);
    CHECK(Wp.omega_sq() == Catch::Approx(2.02).margin(1e-13));
    for (double phi : {-1.2, 0.2, 0.5, 0.9, 1.3})
      for (int k = 0; k <= 4; ++k)
        CHECK(Wp.deriv(k, phi) == Catch::Approx(1.01 * W.deriv(k, phi)).margin(1e-14));
  }

  SECTION("quadratic eta: curvature by the product rule") {
    const EtaPerturbation q = EtaPerturbation::from_coeffs({0.0, 0.0, 0.01});
    CHECK(q.eta0 == Catch::Approx(0.02).margin(1e-10));  // |eta'| and |eta''| peak at 0.02
    const Potential Wp = perturb(W, q);
    // (1+eta)W has curvature (1+eta(1)) W''(1) at the well since W(1)=W'(1)=0
    CHECK(Wp.omega_sq() == Catch::Approx(1.01 * 2.0).margin(1e-12));
    CHECK(std::abs(Wp.omega_sq() - 2.0) <= 2.0 * 0.01 + 1e-12);
  }

  SECTION("odd eta rejected") {
    CHECK_THROWS_AS(EtaPerturbation::from_coeffs({0.0, 0.01}), std::invalid_argument);
  }

  SECTION("eta0 threshold enforced") {
    const EtaPerturbation big = EtaPerturbation::from_coeffs({0.3});
    CHECK_THROWS_AS(perturb(W, big, 0.1), std::invalid_argument);
  }
}

TEST_CASE("validation report", "[potential]") {
  SECTION("quartic passes all clauses") {
    const ValidationReport rep = validate(make_phi4());
    CHECK(rep.pass);
    CHECK(rep.omega_sq == Catch::Approx(2.0).margin(1e-13));
  }
  SECTION("scaled family passes over a parameter scan") {
    for (double m : {1.5, 2.0, 3.0, 5.0, 10.0}) CHECK(validate(make_phi8_scaled(m)).pass);
  }
  SECTION("cubic well fails: negative inside and flat at the wells") {
    // (phi^2-1)^3/4 = (phi^6 - 3 phi^4 + 3 phi^2 - 1)/4
    const Potential bad = make_poly({-0.25, 0.0, 0.75, 0.0, -0.75, 0.0, 0.25}, "cubic-well");
    const ValidationReport rep = validate(bad);
    CHECK_FALSE(rep.pass);
    bool positive_clause_failed = false, curvature_failed = false;
    for (const auto& c : rep.clauses) {
      if (c.name == "W > 0 on (-1, 1)" && !c.pass) positive_clause_failed = true;
      if (c.name == "W''(+-1) > 0" && !c.pass) curvature_failed = true;
    }
    CHECK(positive_clause_failed);
    CHECK(curvature_failed);
  }
}

TEST_CASE("finite differences confirm the exact derivatives", "[potential]") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(-0.95, 0.95);
  const double h = 1e-4;
  for (const Potential& W : {make_phi4(), make_phi8_scaled(2.0)}) {
    for (int trial = 0; trial < 20; ++trial) {
      const double phi = unif(rng);
      for (int k = 1; k <= 2; ++k) {
        const double exact = W.deriv(k, phi);
        const double fd = (k == 1) ? (W(phi + h) - W(phi - h)) / (2.0 * h)
                                   : (W(phi + h) - 2.0 * W(phi) + W(phi - h)) / (h * h);
        const double scale = std::max(1.0, std::abs(exact));
        CHECK(std::abs(fd - exact) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("evenness on a symmetric sample set", "[potential]") {
  for (const Potential& W : {make_phi4(), make_phi8_scaled(3.0)}) {
    for (int i = 0; i <= 100; ++i) {
      const double phi = 2.0 * i / 100.0;
      CHECK(W(phi) == Catch::Approx(W(-phi)).margin(1e-14));
    }
  }
}
