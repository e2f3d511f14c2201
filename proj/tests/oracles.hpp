#pragma once

// Reference computations for the tests. Deliberately independent of the library: plain adaptive
// Simpson and arithmetic bisection, no Boost, no shared helpers.

#include <cmath>
#include <functional>

namespace oracle {

namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                          double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace detail

inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                      int depth = 50) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// Integral over (a, b] with 0 < a, via z = e^v, for integrands singular like a power at 0.
inline double simpson_log(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  return simpson([&](double v) { const double z = std::exp(v); return f(z) * z; }, std::log(a), std::log(b), tol);
}

/// Integral over (0, b] of an integrand with an integrable power singularity at 0: split at
/// decades down to `floor`, ignoring the remainder below it.
inline double simpson_from_zero(const std::function<double(double)>& f, double b, double floor = 1e-30,
                                double tol = 1e-13) {
  double s = 0.0;
  double hi = b;
  while (hi > floor) {
    const double lo = hi / 10.0;
    s += simpson_log(f, lo, hi, tol);
    hi = lo;
  }
  return s;
}

/// Root of an increasing function g on [lo, hi] by plain interval halving.
inline double bisect(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
