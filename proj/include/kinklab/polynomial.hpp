#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace kinklab {

// Dense real polynomial, coefficients in ascending powers.
struct Polynomial {
  std::vector<double> c;

  double operator()(double x) const {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
  }

  int degree() const {
    for (std::size_t i = c.size(); i-- > 0;)
      if (c[i] != 0.0) return static_cast<int>(i);
    return 0;
  }

  Polynomial derivative() const {
    if (c.size() <= 1) return Polynomial{{0.0}};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    return Polynomial{std::move(d)};
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (double v : c) m = std::max(m, std::abs(v));
    return m;
  }
};

inline Polynomial multiply(const Polynomial& a, const Polynomial& b) {
  std::vector<double> r(a.c.size() + b.c.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
  return Polynomial{std::move(r)};
}

inline Polynomial scale(const Polynomial& a, double s) {
  Polynomial r = a;
  for (double& v : r.c) v *= s;
  return r;
}

// Coefficients of p(x0 + s) in powers of s, by repeated synthetic division.
inline Polynomial taylor_shift(const Polynomial& p, double x0) {
  std::vector<double> b = p.c;
  const std::size_t n = b.size();
  if (n < 2) return Polynomial{b};
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t i = n - 1; i-- > k;) b[i] += x0 * b[i + 1];
  return Polynomial{std::move(b)};
}

}  // namespace kinklab
