#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace kinklab {

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton iteration
// on the Legendre recurrence.
struct GaussLegendre {
  std::vector<double> x, w;

  explicit GaussLegendre(int npts) : x(npts), w(npts) {
    const int n = npts;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
  }

  static const GaussLegendre& order15() {
    static const GaussLegendre gl(15);
    return gl;
  }
};

template <class F>
double gl15(F&& f, double a, double b) {
  const auto& gl = GaussLegendre::order15();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 15; ++i) s += gl.w[i] * f(mid + half * gl.x[i]);
  return s * half;
}

// Composite GL15 with panel width <= max_panel.
template <class F>
double integrate_panels(F&& f, double a, double b, double max_panel = 1.0) {
  if (b <= a) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) s += gl15(f, a + p * w, a + (p + 1) * w);
  return s;
}

// Adaptive bisection driven by the GL15 self-difference.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol, int depth = 0) {
  const double whole = gl15(f, a, b);
  const double mid = 0.5 * (a + b);
  const double split = gl15(f, a, mid) + gl15(f, mid, b);
  if (std::abs(whole - split) <= tol || depth > 40) return split;
  return integrate_adaptive(f, a, mid, 0.5 * tol, depth + 1) +
         integrate_adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace kinklab
