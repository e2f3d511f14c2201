#pragma once

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace levydc::quad {

inline constexpr double default_tolerance = 1e-10;
inline constexpr unsigned default_max_depth = 30;

struct Result {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Adaptive Gauss-Kronrod (15/31) on [a, b]; either bound may be infinite.
template <class F>
Result integrate(F&& f, double a, double b, double tol = default_tolerance,
                 unsigned max_depth = default_max_depth) {
  Result r;
  if (a == b) return r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol,
                                                                          &r.error, &r.l1);
  return r;
}

/// Tanh-sinh on a finite [a, b]; copes with integrable endpoint singularities such as s^gamma or
/// log(s) at a time origin. Works on [0, 1] internally, so short intervals far from the origin
/// keep their abscissae distinct.
template <class F>
Result integrate_endpoint(F&& f, double a, double b, double tol = default_tolerance) {
  Result r;
  if (a == b) return r;
  const double w = b - a;
  auto g = [&](double u) { return f(a + w * u) * w; };
  thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  r.value = rule.integrate(g, 0.0, 1.0, tol, &r.error, &r.l1);
  return r;
}

/// Integrates f over [a, b] with 0 <= a < b <= inf after the substitution z = exp(-u).
///
/// Densities of Lévy measures blow up like |z|^{-1-alpha} at the origin; in the u variable the
/// singular end becomes an exponentially decaying tail, which the infinite-interval rule handles
/// without special casing.
template <class F>
Result integrate_log(F&& f, double a, double b, double tol = default_tolerance,
                     unsigned max_depth = default_max_depth) {
  Result r;
  if (!(b > a)) return r;
  const double inf = std::numeric_limits<double>::infinity();
  const double u_lo = std::isinf(b) ? -inf : -std::log(b);
  const double u_hi = a <= 0.0 ? inf : -std::log(a);
  auto g = [&f](double u) {
    const double z = std::exp(-u);
    // Below this, z^p * |z|^{-1-alpha} turns into 0 * inf for alpha < 2.
    if (!(z > 1e-100) || std::isinf(z)) return 0.0;
    return f(z) * z;
  };
  return integrate(g, u_lo, u_hi, tol, max_depth);
}

}  // namespace levydc::quad
