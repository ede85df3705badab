#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kinklab {

// Uniform grid on [0, L]. All fields with definite parity are stored on the
// half line; the parity sector decides the boundary condition at x = 0
// (Dirichlet for odd, Neumann for even).
struct Grid {
  double L = 0.0;
  int n = 0;

  Grid() = default;
  Grid(double half_length, int points) : L(half_length), n(points) {
    if (!(L > 0.0) || n < 3) throw std::invalid_argument("grid: require L > 0 and n >= 3");
  }

  double h() const { return L / static_cast<double>(n - 1); }
  double x(int i) const { return L * static_cast<double>(i) / static_cast<double>(n - 1); }

  std::vector<double> nodes() const {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
  }

  bool operator==(const Grid& o) const { return L == o.L && n == o.n; }
};

enum class Sector { odd, even };

// Trapezoid rule on [0, L].
inline double trapezoid(const std::vector<double>& f, const Grid& g) {
  double s = 0.5 * (f.front() + f.back());
  for (int i = 1; i + 1 < g.n; ++i) s += f[i];
  return s * g.h();
}

// Integral over the whole line of a product of two same-parity fields
// (the integrand is even, so it equals twice the half-line integral).
inline double inner(const std::vector<double>& f, const std::vector<double>& g, const Grid& grid) {
  double s = 0.5 * (f.front() * g.front() + f.back() * g.back());
  for (int i = 1; i + 1 < grid.n; ++i) s += f[i] * g[i];
  return 2.0 * s * grid.h();
}

inline double norm_sq(const std::vector<double>& f, const Grid& grid) { return inner(f, f, grid); }
inline double norm(const std::vector<double>& f, const Grid& grid) { return std::sqrt(norm_sq(f, grid)); }

// Whole-line integral of an even sampled field.
inline double integral_even(const std::vector<double>& f, const Grid& g) { return 2.0 * trapezoid(f, g); }

// Fourth-order first derivative. Nodes near x = 0 use the parity reflection
// f(-x) = +/- f(x); the two right-edge nodes fall back to one-sided stencils.
inline std::vector<double> fd_derivative(const std::vector<double>& f, const Grid& g, Sector sector) {
  const int n = g.n;
  const double h = g.h();
  const double ps = (sector == Sector::odd) ? -1.0 : 1.0;
  auto at = [&](int i) -> double {
    if (i >= 0) return f[i];
    return ps * f[-i];
  };
  std::vector<double> d(n);
  for (int i = 0; i + 2 < n; ++i)
    d[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - f[i + 2]) / (12.0 * h);
  // one-sided fourth order at the right edge
  for (int i = std::max(0, n - 2); i < n; ++i) {
    d[i] = (-25.0 * f[i] + 48.0 * f[i - 1] - 36.0 * f[i - 2] + 16.0 * f[i - 3] - 3.0 * f[i - 4]) / (-12.0 * h);
  }
  return d;
}

// Fourth-order second derivative with the same boundary treatment.
inline std::vector<double> fd_second(const std::vector<double>& f, const Grid& g, Sector sector) {
  const int n = g.n;
  const double h2 = g.h() * g.h();
  const double ps = (sector == Sector::odd) ? -1.0 : 1.0;
  auto at = [&](int i) -> double {
    if (i >= 0) return f[i];
    return ps * f[-i];
  };
  std::vector<double> d(n);
  for (int i = 0; i + 2 < n; ++i)
    d[i] = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * f[i] + 16.0 * at(i + 1) - f[i + 2]) / (12.0 * h2);
  for (int i = std::max(0, n - 2); i < n; ++i)
    d[i] = (2.0 * f[i] - 5.0 * f[i - 1] + 4.0 * f[i - 2] - f[i - 3]) / h2;
  return d;
}

// Cumulative integral of a sampled field from x = 0, fourth order in the
// interior (cubic interpolatory rule per interval).
inline std::vector<double> cumulative_integral(const std::vector<double>& f, const Grid& g) {
  const int n = g.n;
  const double h = g.h();
  std::vector<double> I(n, 0.0);
  if (n < 4) {
    for (int i = 1; i < n; ++i) I[i] = I[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return I;
  }
  // first interval: cubic through nodes 0..3
  I[1] = I[0] + h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (int i = 1; i + 2 < n; ++i)
    I[i + 1] = I[i] + h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
  I[n - 1] = I[n - 2] + h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]);
  return I;
}

}  // namespace kinklab
