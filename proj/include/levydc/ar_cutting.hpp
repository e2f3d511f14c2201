#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "levydc/dc_cutting.hpp"
#include "levydc/errors.hpp"
#include "levydc/levy_measure.hpp"
#include "levydc/rng.hpp"

namespace levydc {

/// Fixed-threshold (Asmussen-Rosinski) cut: jumps with |z| > threshold are simulated, the rest is
/// omitted or replaced by a variance-matched Gaussian.
struct ArParams {
  double threshold = 0.01;
  double horizon = 1.0;

  void validate() const {
    if (!(threshold > 0.0)) throw domain_error("AR threshold must be positive");
    if (!(horizon > 0.0)) throw domain_error("horizon T must be positive");
  }
};

/// Jumps per unit time on one side: N^{side}(threshold).
inline double ar_intensity(const ArParams& params, const LevyModel& model, Side side) {
  if (!(params.threshold > 0.0))
    throw domain_error("AR intensity is infinite for a zero threshold");
  if (!model.has_side(side) || params.threshold >= model.support_radius(side)) return 0.0;
  return model.tail(side, params.threshold);
}

/// P(|Z| <= x) for an AR large jump on the given side.
inline double ar_size_cdf(const ArParams& params, const LevyModel& model, Side side, double x) {
  if (x <= params.threshold) return 0.0;
  const double rate = ar_intensity(params, model, side);
  if (rate == 0.0) return 1.0;
  return 1.0 - model.tail(side, x) / rate;
}

/// Magnitude with N(x) = (1 - u) N(threshold), through the model's generalized inverse.
inline double ar_inverse_size_cdf(const ArParams& params, const LevyModel& model, Side side, double u) {
  if (!(u > 0.0 && u < 1.0)) throw domain_error("ar_inverse_size_cdf requires u in (0, 1)");
  const double rate = ar_intensity(params, model, side);
  const double x = model.tau(side, 1.0 / ((1.0 - u) * rate));
  return std::clamp(x, params.threshold, model.support_radius(side));
}

/// Homogeneous compound-Poisson large jumps on (0, T).
///
/// Draw order: positive arrival exponentials, negative arrival exponentials, positive size
/// uniforms, negative size uniforms (same layout as the dynamic-cutting sampler).
template <class URBG>
JumpStream ar_sample_jumps(const ArParams& params, const LevyModel& model, URBG& rng) {
  std::vector<double> times[2];
  for (Side side : both_sides) {
    const double rate = ar_intensity(params, model, side);
    if (rate <= 0.0) continue;
    auto& ts = times[side == Side::negative];
    double t = standard_exponential(rng) / rate;
    while (t < params.horizon) {
      ts.push_back(t);
      t += standard_exponential(rng) / rate;
    }
  }
  JumpStream stream;
  for (Side side : both_sides) {
    for (double t : times[side == Side::negative]) {
      const double x = ar_inverse_size_cdf(params, model, side, open_uniform(rng));
      stream.events.push_back({t, sign_of(side) * x, side});
    }
  }
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
  return stream;
}

/// Integral of z^2 nu(dz) over 0 < |z| <= threshold (per unit time).
inline double ar_small_jump_variance(const ArParams& params, const LevyModel& model) {
  if (params.threshold <= 0.0) return 0.0;
  if (model.is_symmetric()) return 2.0 * model.truncated_moment(Side::positive, 2.0, params.threshold);
  return model.truncated_abs_moment(2.0, params.threshold);
}

}  // namespace levydc
