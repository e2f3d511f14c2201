#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "levydc/dc_cutting.hpp"
#include "levydc/levy_measure.hpp"
#include "levydc/rng.hpp"

namespace levydc {

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|. Sorts `samples`.
template <class Cdf>
double ks_statistic(std::vector<double>& samples, Cdf&& cdf) {
  if (samples.empty()) throw domain_error("KS statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.62762 / std::sqrt(static_cast<double>(n)); }

struct CheckResult {
  std::string name;
  bool passed = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationSettings {
  CutParams cut;
  SizeLaw size_law = SizeLaw::time_mixture;
  std::size_t ks_samples = 10000;
  std::size_t count_runs = 2000;
  std::size_t laplace_samples = 100000;
  double laplace_t = 1.0;
  double ks_time = 0.5;
  std::uint64_t seed = 1;
  /// Test hook: feeds u^2 instead of u to the inverse CDF in the KS check.
  bool corrupt_inverse_cdf = false;
};

inline CheckResult check_tau_inverse(const LevyModel& model) {
  CheckResult r{"tau-inverse", true, 0.0, 1e-10, "max |N(tau(t)) t - 1| over t in 10^[-3,6]"};
  for (int i = 0; i <= 90; ++i) {
    const double t = std::pow(10.0, -3.0 + 0.1 * i);
    for (Side side : both_sides) {
      if (!model.has_side(side)) continue;
      r.statistic = std::max(r.statistic, std::abs(model.tail(side, model.tau(side, t)) * t - 1.0));
    }
  }
  r.passed = r.statistic <= r.threshold;
  return r;
}

inline CheckResult check_tail_monotone(const LevyModel& model) {
  CheckResult r{"tail-monotone", true, 0.0, 0.0, "count of increases of N on a log grid of (0, 1]"};
  for (Side side : both_sides) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 120; ++i) {
      const double n = model.tail(side, std::pow(10.0, -6.0 + 0.05 * i));
      if (n > prev) r.statistic += 1.0;
      prev = n;
    }
  }
  r.passed = r.statistic == 0.0;
  return r;
}

inline CheckResult check_pruitt_band(const LevyModel& model) {
  std::vector<double> radii;
  for (int i = 0; i <= 60; ++i) radii.push_back(std::pow(10.0, -6.0 + 0.1 * i));
  radii.back() = std::min(radii.back(), 1.0);
  radii.erase(std::remove_if(radii.begin(), radii.end(), [](double r) { return r >= 1.0; }), radii.end());
  const RatioBand band = check_tail_pruitt_equivalence(model, radii);
  CheckResult r{"pruitt-band", false, band.max_ratio / band.min_ratio, 1e3,
                "max/min of N(r)/psi(1/r) over r in [1e-6, 1)"};
  r.passed = band.min_ratio > 0.0 && std::isfinite(band.max_ratio) && r.statistic <= r.threshold;
  return r;
}

/// tau(R t) <= R^zeta tau(t) with zeta = 1/alpha.
inline CheckResult check_tau_scaling(const LevyModel& model) {
  const double zeta = 1.0 / model.stability_index();
  CheckResult r{"tau-scaling", true, 0.0, 1.0, "max tau(Rt) / (R^zeta tau(t)), zeta = 1/alpha"};
  for (int i = 0; i <= 40; ++i) {
    const double t = std::pow(10.0, -4.0 + 0.2 * i);
    for (double R : {1.5, 2.0, 10.0, 1e3}) {
      const double lhs = model.tau(Side::positive, R * t);
      const double rhs = std::pow(R, zeta) * model.tau(Side::positive, t);
      r.statistic = std::max(r.statistic, lhs / rhs);
    }
  }
  r.passed = r.statistic <= r.threshold * (1.0 + 1e-12);
  return r;
}

/// Mean positive-jump count over count_runs paths within 3 standard errors of lambda(T).
inline CheckResult check_intensity(const LevyModel&, const ValidationSettings& s) {
  Engine rng = SeedNode(s.seed).child("intensity").engine();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.count_runs; ++i)
    sum += static_cast<double>(sample_jump_times(s.cut, rng).size());
  const double n = static_cast<double>(s.count_runs);
  const double lambda = intensity_lambda(s.cut, s.cut.horizon);
  const double se = std::sqrt(lambda / n);
  CheckResult r{"intensity", false, std::abs(sum / n - lambda) / se, 3.0, ""};
  r.detail = "mean count " + std::to_string(sum / n) + " vs lambda(T) " + std::to_string(lambda) + ", |z|";
  r.passed = r.statistic <= r.threshold;
  return r;
}

inline CheckResult check_size_round_trip(const LevyModel& model, const ValidationSettings& s) {
  CheckResult r{"size-cdf-round-trip", true, 0.0, 1e-10, "max |F(F^-1(u)) - u| on u = 0.01..0.99 and eps"};
  std::vector<double> us;
  for (int i = 1; i <= 99; ++i) us.push_back(0.01 * i);
  us.push_back(s.cut.epsilon);
  for (double u : us) {
    const double x = inverse_jump_size_cdf(s.cut, model, Side::positive, s.ks_time, u);
    r.statistic = std::max(r.statistic, std::abs(jump_size_cdf(s.cut, model, Side::positive, s.ks_time, x) - u));
  }
  r.passed = r.statistic <= r.threshold;
  return r;
}

inline CheckResult check_size_ks(const LevyModel& model, const ValidationSettings& s) {
  Engine rng = SeedNode(s.seed).child("ks").engine();
  std::vector<double> xs;
  xs.reserve(s.ks_samples);
  for (std::size_t i = 0; i < s.ks_samples; ++i) {
    double u = open_uniform(rng);
    if (s.corrupt_inverse_cdf) u *= u;
    xs.push_back(std::abs(sample_size(s.cut, model, Side::positive, s.ks_time, u, s.size_law)));
  }
  auto cdf = [&](double x) {
    return s.size_law == SizeLaw::time_mixture ? jump_size_cdf(s.cut, model, Side::positive, s.ks_time, x)
                                               : conditional_size_cdf(s.cut, model, Side::positive, s.ks_time, x);
  };
  CheckResult r{"size-ks", false, ks_statistic(xs, cdf), ks_critical_1pct(s.ks_samples),
                "KS distance of sampled magnitudes at a fixed arrival time"};
  r.passed = r.statistic < r.threshold;
  return r;
}

inline CheckResult check_laplace(const LevyModel& model, const ValidationSettings& s) {
  Engine rng = SeedNode(s.seed).child("laplace").engine();
  const std::vector<double> rs = {0.5, 1.0, 2.0};
  const auto checks = empirical_laplace_check(s.cut, model, s.laplace_t, rs, s.laplace_samples, rng, s.size_law);
  CheckResult r{"laplace", true, 0.0, 0.05, "max relative error of -ln E exp(-rZ), r in {0.5, 1, 2}"};
  for (const auto& c : checks) {
    if (!c.usable) {
      r.passed = false;
      continue;
    }
    r.statistic = std::max(r.statistic, c.relative_error);
  }
  r.passed = r.passed && r.statistic <= r.threshold;
  return r;
}

inline std::vector<CheckResult> run_validation(const LevyModel& model, const ValidationSettings& s) {
  return {check_tau_inverse(model),         check_tail_monotone(model),  check_pruitt_band(model),
          check_tau_scaling(model),         check_intensity(model, s),   check_size_round_trip(model, s),
          check_size_ks(model, s),          check_laplace(model, s)};
}

}  // namespace levydc
