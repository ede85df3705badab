#pragma once

#include <cmath>

namespace kinklab {

// Scalar carrying first and second derivative. Used to evaluate the smooth
// cutoff machinery (exp-bump windows and their derivatives) in closed form
// instead of differencing sampled values.
struct D2 {
  double f = 0.0;
  double d = 0.0;
  double dd = 0.0;
};

inline D2 d2_const(double c) { return {c, 0.0, 0.0}; }
inline D2 d2_var(double x) { return {x, 1.0, 0.0}; }

inline D2 operator+(const D2& a, const D2& b) { return {a.f + b.f, a.d + b.d, a.dd + b.dd}; }
inline D2 operator-(const D2& a, const D2& b) { return {a.f - b.f, a.d - b.d, a.dd - b.dd}; }
inline D2 operator-(const D2& a) { return {-a.f, -a.d, -a.dd}; }

inline D2 operator*(const D2& a, const D2& b) {
  return {a.f * b.f, a.d * b.f + a.f * b.d, a.dd * b.f + 2.0 * a.d * b.d + a.f * b.dd};
}
inline D2 operator*(double c, const D2& a) { return {c * a.f, c * a.d, c * a.dd}; }

inline D2 operator/(const D2& a, const D2& b) {
  const double q = a.f / b.f;
  const double qd = (a.d - q * b.d) / b.f;
  const double qdd = (a.dd - 2.0 * qd * b.d - q * b.dd) / b.f;
  return {q, qd, qdd};
}

inline D2 exp(const D2& a) {
  const double e = std::exp(a.f);
  return {e, e * a.d, e * (a.dd + a.d * a.d)};
}

}  // namespace kinklab
