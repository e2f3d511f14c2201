#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "levydc/errors.hpp"
#include "levydc/levy_measure.hpp"
#include "levydc/quadrature.hpp"
#include "levydc/rng.hpp"

namespace levydc {

/// Dynamic-cutting parameters: at time s a jump is "large" when its magnitude reaches
/// tau^{side}((s*h)^epsilon).
struct CutParams {
  double epsilon = 0.1;
  double h = 1e-3;
  double horizon = 1.0;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw domain_error("cut epsilon must lie in (0, 1)");
    if (!(h > 0.0)) throw domain_error("cut h must be positive");
    if (!(horizon > 0.0)) throw domain_error("horizon T must be positive");
  }
};

struct JumpEvent {
  double time = 0.0;
  double size = 0.0;  ///< signed
  Side side = Side::positive;
};

/// Large jumps of one trajectory on (0, T], sorted by time.
struct JumpStream {
  std::vector<JumpEvent> events;

  std::size_t count(Side side) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [side](const JumpEvent& e) { return e.side == side; }));
  }
};

/// Which law a jump arriving at time t is drawn from.
enum class SizeLaw {
  /// F_{th,eps}: the jump law of Z^{CP}(t) evaluated at the arrival time (piecewise closed
  /// form, inverse-CDF sampling per arrival). Default.
  time_mixture,
  /// nu restricted to magnitudes >= tau((t*h)^eps), normalized: the exact per-arrival law.
  conditional,
};

/// Jump-size threshold at time s; 0 at s = 0.
inline double dc_threshold(const CutParams& params, const LevyModel& model, Side side, double s) {
  const double level = s > 0.0 ? std::pow(s * params.h, params.epsilon) : 0.0;
  if (!(level > 0.0)) return 0.0;
  return model.tau(side, level);
}

/// lambda(t) = t^{1-eps} / (1-eps) * h^{-eps}: expected number of large jumps on (0, t] per side.
inline double intensity_lambda(const CutParams& params, double t) {
  if (t <= 0.0) return 0.0;
  const double eps = params.epsilon;
  return std::pow(t, 1.0 - eps) / (1.0 - eps) * std::pow(params.h, -eps);
}

/// Side-aware intensity: zero for a side that carries no mass.
inline double intensity_lambda(const CutParams& params, const LevyModel& model, Side side, double t) {
  return model.has_side(side) ? intensity_lambda(params, t) : 0.0;
}

/// lambda^{-1}(u) = (u (1-eps) h^eps)^{1/(1-eps)}.
inline double inverse_lambda(const CutParams& params, double u) {
  if (u <= 0.0) return 0.0;
  const double eps = params.epsilon;
  return std::pow(u * (1.0 - eps) * std::pow(params.h, eps), 1.0 / (1.0 - eps));
}

/// Arrival times on (0, T) by time change of a unit-rate Poisson process: T_i = lambda^{-1}(Gamma_i).
/// Consumes one exponential per arrival plus the terminating one.
template <class URBG>
std::vector<double> sample_jump_times(const CutParams& params, URBG& rng) {
  std::vector<double> times;
  double gamma = standard_exponential(rng);
  double t = inverse_lambda(params, gamma);
  while (t < params.horizon) {
    times.push_back(t);
    gamma += standard_exponential(rng);
    t = inverse_lambda(params, gamma);
  }
  return times;
}

/// F^{side}_{th,eps}(x): CDF of the magnitude of a jump arriving at time t.
inline double jump_size_cdf(const CutParams& params, const LevyModel& model, Side side, double t,
                            double x) {
  if (!(t > 0.0)) throw domain_error("jump_size_cdf requires t > 0");
  if (!(x > 0.0)) return 0.0;
  const double eps = params.epsilon;
  const double th = t * params.h;
  const double n = model.tail(side, x);
  const double level = std::pow(th, -eps);
  if (n >= level) return std::pow(1.0 / th, 1.0 - eps) * eps * std::pow(n, (eps - 1.0) / eps);
  return 1.0 - (1.0 - eps) * std::pow(th, eps) * n;
}

/// True when the dynamic threshold at time t already sits at the edge of the support, i.e. the
/// large-jump region is (numerically) empty and the intensity formula no longer describes it.
inline bool threshold_exceeds_support(const CutParams& params, const LevyModel& model, Side side,
                                      double t) {
  return dc_threshold(params, model, side, t) >= model.support_radius(side);
}

/// Inverse of jump_size_cdf. The branch u <= eps is taken for u == eps; both branches agree there.
inline double inverse_jump_size_cdf(const CutParams& params, const LevyModel& model, Side side,
                                    double t, double u) {
  if (!(u > 0.0 && u < 1.0)) throw domain_error("inverse_jump_size_cdf requires u in (0, 1)");
  if (!(t > 0.0)) throw domain_error("inverse_jump_size_cdf requires t > 0");
  const double eps = params.epsilon;
  const double th_eps = std::pow(t * params.h, eps);
  double level;
  if (u <= eps)
    level = th_eps * std::pow(u / eps, -eps / (eps - 1.0));
  else
    level = (1.0 - eps) * th_eps / (1.0 - u);
  return std::min(model.tau(side, level), model.support_radius(side));
}

/// CDF of nu^{side} restricted to [tau((th)^eps), inf), normalized.
inline double conditional_size_cdf(const CutParams& params, const LevyModel& model, Side side,
                                   double t, double x) {
  if (!(t > 0.0)) throw domain_error("conditional_size_cdf requires t > 0");
  if (x < dc_threshold(params, model, side, t)) return 0.0;
  return 1.0 - std::pow(t * params.h, params.epsilon) * model.tail(side, x);
}

inline double inverse_conditional_size_cdf(const CutParams& params, const LevyModel& model,
                                           Side side, double t, double u) {
  if (!(u > 0.0 && u < 1.0)) throw domain_error("inverse_conditional_size_cdf requires u in (0, 1)");
  if (!(t > 0.0)) throw domain_error("inverse_conditional_size_cdf requires t > 0");
  const double level = std::pow(t * params.h, params.epsilon) / (1.0 - u);
  return std::min(model.tau(side, level), model.support_radius(side));
}

inline double sample_size(const CutParams& params, const LevyModel& model, Side side, double t,
                          double u, SizeLaw law) {
  const double magnitude = law == SizeLaw::time_mixture
                               ? inverse_jump_size_cdf(params, model, side, t, u)
                               : inverse_conditional_size_cdf(params, model, side, t, u);
  return sign_of(side) * magnitude;
}

/// One signed size per arrival time; one uniform per arrival.
template <class URBG>
std::vector<double> sample_jump_sizes(const CutParams& params, const LevyModel& model, Side side,
                                      std::span<const double> times, URBG& rng,
                                      SizeLaw law = SizeLaw::time_mixture) {
  std::vector<double> sizes;
  sizes.reserve(times.size());
  for (double t : times) sizes.push_back(sample_size(params, model, side, t, open_uniform(rng), law));
  return sizes;
}

/// Both sides of the large-jump process on (0, T].
///
/// Draw order on the stream: positive arrival times, negative arrival times, positive sizes,
/// negative sizes. Keeping this order fixed makes trajectories bit-reproducible.
template <class URBG>
JumpStream sample_dc_jumps(const CutParams& params, const LevyModel& model, URBG& rng,
                           SizeLaw law = SizeLaw::time_mixture) {
  std::vector<double> times[2];
  for (Side side : both_sides)
    if (model.has_side(side)) times[side == Side::negative] = sample_jump_times(params, rng);

  JumpStream stream;
  stream.events.reserve(times[0].size() + times[1].size());
  for (Side side : both_sides) {
    const auto& ts = times[side == Side::negative];
    const auto sizes = sample_jump_sizes(params, model, side, ts, rng, law);
    for (std::size_t i = 0; i < ts.size(); ++i) stream.events.push_back({ts[i], sizes[i], side});
  }
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
  return stream;
}

/// Integral over B(s,h,eps) of z^2 nu(dz): the instantaneous variance of the removed jumps.
inline double small_jump_variance_rate(const CutParams& params, const LevyModel& model, double s) {
  if (s <= 0.0) return 0.0;
  if (model.is_symmetric())
    return 2.0 * model.truncated_moment(Side::positive, 2.0, dc_threshold(params, model, Side::positive, s));
  double v = 0.0;
  for (Side side : both_sides)
    v += model.truncated_moment(side, 2.0, dc_threshold(params, model, side, s));
  return v;
}

/// m(t): time integral of the first moment of nu over the retained large-jump region.
inline double compensated_drift(const CutParams& params, const LevyModel& model, double t) {
  if (t <= 0.0 || model.is_symmetric()) return 0.0;
  auto rate = [&](double s) {
    double m = 0.0;
    for (Side side : both_sides)
      m += sign_of(side) * model.upper_moment(side, 1.0, dc_threshold(params, model, side, s));
    return m;
  };
  const auto q = quad::integrate_endpoint(rate, 0.0, t, 1e-9);
  if (!std::isfinite(q.value)) throw integrability_error("compensated drift diverges for " + model.name());
  return q.value;
}

/// Right side of the Laplace identity for the positive large-jump part at time t:
/// integral over s in (0, t) and u > tau+((sh)^eps) of (1 - e^{-ru}) nu+(du).
inline double laplace_exponent_quadrature(const CutParams& params, const LevyModel& model, double t,
                                          double r) {
  if (r == 0.0 || t <= 0.0) return 0.0;
  const double radius = model.support_radius(Side::positive);
  auto inner = [&](double s) {
    const double thr = dc_threshold(params, model, Side::positive, s);
    return model.restricted_integral(
        Side::positive, [r](double z) { return -std::expm1(-r * z); }, thr, radius, 1e-11);
  };
  return quad::integrate_endpoint(inner, 0.0, t, 1e-9).value;
}

struct LaplaceCheck {
  double r = 0.0;
  double empirical = 0.0;   ///< -ln of the sample mean of e^{-r Z}
  double quadrature = 0.0;  ///< oracle value
  double relative_error = 0.0;
  bool usable = true;       ///< false when the sample mean underflowed
};

/// Simulates n_samples copies of Z^{CP,+}(t) and compares -ln E e^{-rZ} with the quadrature.
template <class URBG>
std::vector<LaplaceCheck> empirical_laplace_check(const CutParams& params, const LevyModel& model,
                                                  double t, std::span<const double> r_values,
                                                  std::size_t n_samples, URBG& rng,
                                                  SizeLaw law = SizeLaw::time_mixture) {
  for (double r : r_values)
    if (r < 0.0) throw domain_error("Laplace check requires r >= 0");
  CutParams at_t = params;
  at_t.horizon = t;
  std::vector<double> sums(r_values.size(), 0.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto times = sample_jump_times(at_t, rng);
    const auto sizes = sample_jump_sizes(at_t, model, Side::positive, times, rng, law);
    double z = 0.0;
    for (double s : sizes) z += s;
    for (std::size_t j = 0; j < r_values.size(); ++j) sums[j] += std::exp(-r_values[j] * z);
  }
  std::vector<LaplaceCheck> out;
  for (std::size_t j = 0; j < r_values.size(); ++j) {
    LaplaceCheck c;
    c.r = r_values[j];
    const double mean = sums[j] / static_cast<double>(n_samples);
    c.quadrature = laplace_exponent_quadrature(params, model, t, c.r);
    if (!(mean > 0.0) || !std::isfinite(mean)) {
      c.usable = false;
      c.empirical = std::numeric_limits<double>::quiet_NaN();
      c.relative_error = std::numeric_limits<double>::quiet_NaN();
    } else {
      c.empirical = -std::log(mean);
      c.relative_error =
          c.quadrature == 0.0 ? std::abs(c.empirical) : std::abs(c.empirical - c.quadrature) / c.quadrature;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace levydc
