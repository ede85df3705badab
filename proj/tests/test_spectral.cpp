#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kinklab/spectral.hpp"
#include "oracles.hpp"

using namespace kinklab;

namespace {

Grid default_grid(const Potential& W) { return Grid(40.0 / W.omega(), 4001); }

}  // namespace

TEST_CASE("linearization potential around the quartic kink", "[spectral]") {
  const Potential W = make_phi4();
  const Grid g = default_grid(W);
  const KinkProfile K = solve_kink(W, g);
  const SchrodingerOperator op = build_L0(W, K, Sector::odd);
  CHECK(op.V[0] == Catch::Approx(-1.0).margin(1e-13));        // W''(0) = -1
  CHECK(op.V.back() == Catch::Approx(2.0).margin(1e-12));     // vacuum limit omega^2
  CHECK(op.v_infinity == Catch::Approx(2.0).margin(1e-14));
}

TEST_CASE("two-well linearization value at the origin", "[spectral]") {
  const Potential W = make_phi8_scaled(2.0);
  const Grid g = default_grid(W);
  const KinkProfile K = solve_kink(W, g);
  const SchrodingerOperator op = build_L0(W, K, Sector::even);
  // W_m''(0) = -(1 + 1/m^2) for this family
  CHECK(op.V[0] == Catch::Approx(-1.25).margin(1e-12));
}

TEST_CASE("quartic model discrete spectrum", "[spectral]") {
  const Potential W = make_phi4();
  const Grid g = default_grid(W);
  const KinkProfile K = solve_kink(W, g);

  SECTION("odd sector: the internal mode and nothing else below the edge") {
    const SchrodingerOperator op = build_L0(W, K, Sector::odd);
    const SpectralData sd = discrete_spectrum(op, 2.0);
    REQUIRE(sd.eigenvalues.size() == 1);
    CHECK(sd.eigenvalues[0] == Catch::Approx(1.5).margin(1e-6));
    // eigenfunction proportional to the closed form
    const std::vector<double>& Y = sd.eigenfunctions[0];
    double sup = 0.0;
    for (int i = 0; i < g.n; ++i) sup = std::max(sup, std::abs(Y[i] - oracles::phi4_mode(g.x(i))));
    CHECK(sup < 1e-4);
    CHECK(inner(Y, Y, g) == Catch::Approx(1.0).margin(1e-10));
  }

  SECTION("even sector: translation zero mode") {
    const SchrodingerOperator op = build_L0(W, K, Sector::even);
    const SpectralData sd = discrete_spectrum(op, 1.0);
    REQUIRE_FALSE(sd.eigenvalues.empty());
    CHECK(std::abs(sd.eigenvalues[0]) <= 1e-6);
    // eigenfunction proportional to H'
    const std::vector<double>& Z0 = sd.eigenfunctions[0];
    const double scale = Z0[0] / K.Hp[0];
    double sup = 0.0;
    for (int i = 0; i < g.n; ++i) sup = std::max(sup, std::abs(Z0[i] - scale * K.Hp[i]));
    CHECK(sup < 1e-4 * std::abs(scale));
  }
}

TEST_CASE("reference well with known spectrum", "[spectral]") {
  // -d_xx - 2 sech^2(x): a single even bound state at -1
  const Grid g(20.0, 4001);
  auto V = [](double x) { return -2.0 / (std::cosh(x) * std::cosh(x)); };
  const SchrodingerOperator op = make_operator(g, Sector::even, V, 0.0);
  const SpectralData sd = discrete_spectrum(op, -1e-4);
  REQUIRE(sd.eigenvalues.size() == 1);
  CHECK(sd.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-6));

  // the odd sector of the same well has no bound state: mode-existence fails
  const SchrodingerOperator op_odd = make_operator(g, Sector::odd, V, 0.0);
  const SpectralData sd_odd = discrete_spectrum(op_odd, -1e-6);
  CHECK(sd_odd.eigenvalues.empty());
  const Hypothesis1Report h1 = hypothesis1_from_spectrum(sd_odd, 0.0);
  CHECK_FALSE(h1.pass);
}

TEST_CASE("shooting oracle", "[spectral]") {
  const Potential W = make_phi4();
  const Grid g(40.0 / W.omega(), 8001);
  const KinkProfile K = solve_kink(W, g);

  SECTION("internal mode in a wide bracket") {
    const SchrodingerOperator op = build_L0(W, K, Sector::odd);
    const double ev = shooting_eigenvalue(op, {1.0, 1.9});
    CHECK(ev == Catch::Approx(1.5).margin(1e-8));
  }
  SECTION("empty bracket reports no sign change") {
    const SchrodingerOperator op = build_L0(W, K, Sector::odd);
    CHECK_THROWS_AS(shooting_eigenvalue(op, {1.6, 1.9}), std::runtime_error);
  }
  SECTION("zero mode through a bracket straddling zero") {
    const SchrodingerOperator op = build_L0(W, K, Sector::even);
    const double ev = shooting_eigenvalue(op, {-0.05, 0.05});
    CHECK(std::abs(ev) <= 1e-8);
  }
}

TEST_CASE("matrix and shooting eigenvalues agree within combined bars", "[spectral]") {
  auto combined = [](const Potential& W, Sector sector, double lo, double hi) {
    const Grid g(40.0 / W.omega(), 4001);
    const KinkProfile K = solve_kink(W, g);
    const SchrodingerOperator op = build_L0(W, K, sector);
    const SpectralData sd = discrete_spectrum(op, hi);
    REQUIRE_FALSE(sd.eigenvalues.empty());
    const double matrix_ev = sd.eigenvalues[0];
    const double conv = sd.convergence[0];
    const double shoot_fine = shooting_eigenvalue(op, {lo, hi});
    const double shoot_coarse = shooting_eigenvalue(detail::decimate(op), {lo, hi});
    const double shoot_bar = std::abs(shoot_fine - shoot_coarse) / 15.0 + 1e-12;
    CHECK(std::abs(matrix_ev - shoot_fine) <= conv + shoot_bar + 1e-10);
  };
  combined(make_phi4(), Sector::odd, 1.0, 1.9);
  // the scaled family holds an odd mode below the edge only for m above ~2.2
  combined(make_phi8_scaled(3.0), Sector::odd, 1.3, 1.5);
}

TEST_CASE("orthonormality under the trapezoid inner product", "[spectral]") {
  // use a well with several bound states: -8 sech^2(x) holds levels for s=2..,
  // giving two per parity sector within (-inf, 0)
  const Grid g(20.0, 2001);
  auto V = [](double x) { return -8.0 / (std::cosh(x) * std::cosh(x)); };
  for (Sector sec : {Sector::odd, Sector::even}) {
    const SchrodingerOperator op = make_operator(g, sec, V, 0.0);
    const SpectralData sd = discrete_spectrum(op, -1e-6);
    REQUIRE(sd.eigenvalues.size() >= 1);
    for (std::size_t a = 0; a < sd.eigenfunctions.size(); ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        const double ip = inner(sd.eigenfunctions[a], sd.eigenfunctions[b], g);
        CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) <= 1e-8);
      }
  }
}

TEST_CASE("domain growth leaves converged eigenvalues fixed", "[spectral]") {
  const Potential W = make_phi4();
  auto ev_at = [&](double L) {
    const Grid g(L, 4001);
    const KinkProfile K = solve_kink(W, g);
    const SchrodingerOperator op = build_L0(W, K, Sector::odd);
    return discrete_spectrum(op, 1.9).eigenvalues.at(0);
  };
  const double e1 = ev_at(40.0 / W.omega());
  const double e2 = ev_at(50.0 / W.omega());
  CHECK(std::abs(e1 - e2) <= 1e-8);
}

TEST_CASE("zero-mode residual of the discretized operator", "[spectral]") {
  for (const Potential& W : {make_phi4(), make_phi8_scaled(2.0)}) {
    const Grid g = default_grid(W);
    const KinkProfile K = solve_kink(W, g);
    const SchrodingerOperator op = build_L0(W, K, Sector::even);
    const std::vector<double> r = apply_operator(op, K.Hp);
    double rn = 0.0;
    for (int i = 0; i + 2 < g.n; ++i) rn += r[i] * r[i];
    rn = std::sqrt(rn);
    double hn = 0.0;
    for (int i = 0; i + 2 < g.n; ++i) hn += K.Hp[i] * K.Hp[i];
    hn = std::sqrt(hn);
    double vscale = 0.0;
    for (double v : op.V) vscale = std::max(vscale, std::abs(v));
    CHECK(rn / hn <= 10.0 * g.h() * g.h() * vscale);
  }
}

TEST_CASE("mode existence report for the quartic model", "[spectral]") {
  const Potential W = make_phi4();
  const Hypothesis1Report rep = check_hypothesis1(W, default_grid(W));
  CHECK(rep.pass);
  CHECK(rep.multiplicity == 1);
  CHECK(rep.lambda_sq == Catch::Approx(1.5).margin(1e-7));
  CHECK(rep.window_ok);  // sqrt(1.5) lies in (sqrt(2)/2, sqrt(2))
}

TEST_CASE("mode existence approaches the quartic value in the scaled family", "[spectral]") {
  const Potential W5 = make_phi8_scaled(5.0);
  const Potential W10 = make_phi8_scaled(10.0);
  const Hypothesis1Report r5 = check_hypothesis1(W5, default_grid(W5));
  const Hypothesis1Report r10 = check_hypothesis1(W10, default_grid(W10));
  REQUIRE(r5.pass);
  REQUIRE(r10.pass);
  CHECK(std::abs(r10.lambda_sq - 1.5) < std::abs(r5.lambda_sq - 1.5));
  CHECK(std::abs(r10.lambda_sq - 1.5) < 0.05);
}
