#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "levydc/ar_cutting.hpp"
#include "levydc/dc_cutting.hpp"
#include "levydc/errors.hpp"
#include "levydc/levy_measure.hpp"
#include "levydc/quadrature.hpp"

namespace levydc {

enum class Method { dc, ar };

inline const char* to_string(Method m) { return m == Method::dc ? "DC" : "AR"; }

/// The truncation rule shared by both methods: at time s jumps of magnitude below
/// `threshold(side, s)` are small.
struct CutRule {
  Method method = Method::dc;
  CutParams dc;
  ArParams ar;

  static CutRule dynamic(const CutParams& p) { return {Method::dc, p, ArParams{0.01, p.horizon}}; }
  static CutRule fixed(const ArParams& p) { return {Method::ar, CutParams{0.1, 1e-3, p.horizon}, p}; }

  double horizon() const { return method == Method::dc ? dc.horizon : ar.horizon; }

  double threshold(const LevyModel& model, Side side, double s) const {
    return method == Method::dc ? dc_threshold(dc, model, side, s) : ar.threshold;
  }
};

/// Coefficients of dX = a(t,X) dt + b(t,X) dB + int c(t,X-,z) Ñ(dt,dz).
struct CoefficientSet {
  std::function<double(double, double)> drift;
  std::function<double(double, double)> diffusion;
  std::function<double(double, double, double)> jump;
  /// Optional (x, side, r) -> integral of c(.,x,z)^2 over 0 < ±z <= r against nu.
  std::function<double(double, Side, double)> jump_sq_nu;
  /// z -> c(t,x,z) nu(dz) is odd, so compensators of symmetric regions vanish.
  bool symmetric = false;
  /// b == 0 identically; the engine then skips the Brownian B entirely.
  bool diffusion_free = false;
};

/// dX = sin(X) dt + int cos(X-) z Ñ(dt,dz).
inline CoefficientSet sin_cos_example(const LevyModel& model) {
  CoefficientSet c;
  c.drift = [](double, double x) { return std::sin(x); };
  c.diffusion = [](double, double) { return 0.0; };
  c.jump = [](double, double x, double z) { return std::cos(x) * z; };
  c.jump_sq_nu = [&model](double x, Side side, double r) {
    const double k = std::cos(x);
    return k * k * model.truncated_moment(side, 2.0, r);
  };
  c.symmetric = true;
  c.diffusion_free = true;
  return c;
}

enum class SigmaMode {
  /// Threshold frozen at the left endpoint: (t1 - t0) * sum_side  int_{|z|<=thr(t0)} c^2 nu.
  /// A cell starting at 0 is integrated instead, since the dynamic threshold vanishes there.
  closed_form,
  /// Adaptive quadrature of the time integral.
  quadrature,
};

namespace detail {

inline double small_region_c2(const CoefficientSet& coeffs, const LevyModel& model,
                              const CutRule& cut, double s, double x, bool use_closed_form) {
  auto side_value = [&](Side side) {
    const double r = cut.threshold(model, side, s);
    if (r <= 0.0) return 0.0;
    if (use_closed_form && coeffs.jump_sq_nu) return coeffs.jump_sq_nu(x, side, r);
    return model.restricted_integral(
        side, [&](double z) { const double v = coeffs.jump(s, x, z); return v * v; }, 0.0, r, 1e-12);
  };
  if (model.is_symmetric() && coeffs.symmetric) return 2.0 * side_value(Side::positive);
  return side_value(Side::positive) + side_value(Side::negative);
}

}  // namespace detail

/// sigma_i^2(x): variance of the Gaussian stand-in for the removed jumps on [t0, t1], state
/// frozen at x.
inline double sigma_small_sq(const CoefficientSet& coeffs, const LevyModel& model, const CutRule& cut,
                             double x, double t0, double t1, SigmaMode mode = SigmaMode::closed_form) {
  if (!(t1 > t0)) return 0.0;
  if (mode == SigmaMode::closed_form && t0 > 0.0)
    return (t1 - t0) * detail::small_region_c2(coeffs, model, cut, t0, x, true);
  auto rate = [&](double s) { return detail::small_region_c2(coeffs, model, cut, s, x, true); };
  return quad::integrate_endpoint(rate, t0, t1, 1e-13).value;
}

/// Integral over [t0, t1] and the large-jump region of c(s,x,z) nu(dz) ds; subtracted in each
/// Euler step so that the simulated large jumps are compensated.
inline double large_jump_compensator(const CoefficientSet& coeffs, const LevyModel& model,
                                     const CutRule& cut, double x, double t0, double t1) {
  if (!(t1 > t0)) return 0.0;
  if (coeffs.symmetric && model.is_symmetric()) return 0.0;
  auto rate = [&](double s) {
    double v = 0.0;
    for (Side side : both_sides) {
      const double r = cut.threshold(model, side, s);
      v += model.restricted_integral(
          side, [&](double z) { return coeffs.jump(s, x, z); }, r, model.support_radius(side), 1e-12);
    }
    return v;
  };
  const auto q = quad::integrate_endpoint(rate, t0, t1, 1e-11);
  if (!std::isfinite(q.value)) throw integrability_error("large-jump compensator diverges");
  return q.value;
}

}  // namespace levydc
