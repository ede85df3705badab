#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kinklab {

// Symmetric tridiagonal matrix: diagonal d[0..m-1], off-diagonal e[0..m-2].
struct SymTridiag {
  std::vector<double> d, e;
  int size() const { return static_cast<int>(d.size()); }
};

// Number of eigenvalues strictly below lambda (Sturm sequence: count of
// negative pivots in the LDL^T factorization of T - lambda I).
inline int sturm_count_below(const SymTridiag& T, double lambda) {
  const int m = T.size();
  double emax2 = 0.0;
  for (double v : T.e) emax2 = std::max(emax2, v * v);
  const double pivmin = 1e-290 * std::max(1.0, emax2);
  int count = 0;
  double q = T.d[0] - lambda;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (int i = 1; i < m; ++i) {
    q = T.d[i] - lambda - T.e[i - 1] * T.e[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

// All eigenvalues strictly below `upper`, ascending, by Sturm bisection.
inline std::vector<double> eigenvalues_below(const SymTridiag& T, double upper) {
  const int m = T.size();
  double lo = T.d[0], hi = T.d[0];
  for (int i = 0; i < m; ++i) {
    const double r = (i > 0 ? std::abs(T.e[i - 1]) : 0.0) + (i + 1 < m ? std::abs(T.e[i]) : 0.0);
    lo = std::min(lo, T.d[i] - r);
    hi = std::max(hi, T.d[i] + r);
  }
  const int k = sturm_count_below(T, upper);
  std::vector<double> evs(k);
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  for (int j = 0; j < k; ++j) {
    double a = lo, b = upper;
    while (b - a > 1e-15 * scale) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;  // bisection exhausted at double precision
      if (sturm_count_below(T, mid) <= j)
        a = mid;
      else
        b = mid;
    }
    evs[j] = 0.5 * (a + b);
  }
  return evs;
}

// Solve (T - shift I) x = rhs with partial pivoting (handles the nearly
// singular shifts used by inverse iteration).
inline std::vector<double> solve_shifted(const SymTridiag& T, double shift, std::vector<double> rhs) {
  const int m = T.size();
  std::vector<double> dl(m, 0.0), dm(m), du(m, 0.0), du2(m, 0.0);
  for (int i = 0; i < m; ++i) dm[i] = T.d[i] - shift;
  for (int i = 0; i + 1 < m; ++i) {
    dl[i] = T.e[i];  // row i+1, column i
    du[i] = T.e[i];  // row i, column i+1
  }
  // forward elimination with row swaps
  for (int i = 0; i + 1 < m; ++i) {
    if (std::abs(dl[i]) > std::abs(dm[i])) {
      std::swap(dm[i], dl[i]);
      std::swap(du[i], dm[i + 1]);
      if (i + 2 < m) {
        du2[i] = du[i + 1];
        du[i + 1] = 0.0;
      }
      std::swap(rhs[i], rhs[i + 1]);
    }
    if (dm[i] == 0.0) dm[i] = 1e-300;
    const double f = dl[i] / dm[i];
    dm[i + 1] -= f * du[i];
    if (i + 2 < m) du[i + 1] -= f * du2[i];
    rhs[i + 1] -= f * rhs[i];
  }
  if (dm[m - 1] == 0.0) dm[m - 1] = 1e-300;
  // back substitution
  std::vector<double> x(m);
  x[m - 1] = rhs[m - 1] / dm[m - 1];
  if (m >= 2) x[m - 2] = (rhs[m - 2] - du[m - 2] * x[m - 1]) / dm[m - 2];
  for (int i = m - 3; i >= 0; --i)
    x[i] = (rhs[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dm[i];
  return x;
}

// Inverse iteration for the eigenvector at an isolated eigenvalue estimate.
inline std::vector<double> inverse_iteration(const SymTridiag& T, double lambda, int iters = 8) {
  const int m = T.size();
  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(T.d[i]));
  std::vector<double> v(m);
  for (int i = 0; i < m; ++i) v[i] = std::sin(0.7 * (i + 1)) + 0.05;  // deterministic, non-degenerate start
  for (int it = 0; it < iters; ++it) {
    v = solve_shifted(T, lambda + 1e-13 * scale, std::move(v));
    double mx = 0.0;
    for (double a : v) mx = std::max(mx, std::abs(a));
    for (double& a : v) a /= mx;
  }
  double nrm = 0.0;
  for (double a : v) nrm += a * a;
  nrm = std::sqrt(nrm);
  for (double& a : v) a /= nrm;
  return v;
}

// General tridiagonal system (Thomas algorithm); used for the regularized
// transform where the matrix is strictly diagonally dominant.
struct Tridiag {
  std::vector<double> lower, diag, upper;  // lower[0] and upper[m-1] unused
};

inline std::vector<double> thomas_solve(const Tridiag& A, const std::vector<double>& rhs) {
  const int m = static_cast<int>(A.diag.size());
  std::vector<double> c(m), x(m);
  double den = A.diag[0];
  if (den == 0.0) throw std::runtime_error("thomas_solve: zero pivot");
  c[0] = A.upper[0] / den;
  x[0] = rhs[0] / den;
  for (int i = 1; i < m; ++i) {
    den = A.diag[i] - A.lower[i] * c[i - 1];
    if (den == 0.0) throw std::runtime_error("thomas_solve: zero pivot");
    c[i] = (i + 1 < m) ? A.upper[i] / den : 0.0;
    x[i] = (rhs[i] - A.lower[i] * x[i - 1]) / den;
  }
  for (int i = m - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace kinklab
