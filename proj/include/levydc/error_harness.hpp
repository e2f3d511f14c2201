#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "levydc/ar_cutting.hpp"
#include "levydc/dc_cutting.hpp"
#include "levydc/errors.hpp"
#include "levydc/euler_engine.hpp"
#include "levydc/levy_measure.hpp"
#include "levydc/quadrature.hpp"
#include "levydc/rng.hpp"
#include "levydc/sde_model.hpp"

namespace levydc {

// -- per-trajectory error -------------------------------------------------------------------------

/// sup over the union of both grids of |X^bench_t - X^coarse_t|, both paths extended cadlag.
inline double strong_error(const PathRecord& benchmark, const PathRecord& coarse) {
  if (benchmark.trajectory_id != coarse.trajectory_id || benchmark.method != coarse.method)
    throw coupling_error("paths were not simulated from the same trajectory noise");
  const auto& ta = benchmark.times;
  const auto& tb = coarse.times;
  if (ta.empty() || tb.empty()) throw domain_error("empty path");
  std::size_t i = 0, j = 0;
  double sup = std::abs(benchmark.values[0] - coarse.values[0]);
  while (i + 1 < ta.size() || j + 1 < tb.size()) {
    const double next_a = i + 1 < ta.size() ? ta[i + 1] : INFINITY;
    const double next_b = j + 1 < tb.size() ? tb[j + 1] : INFINITY;
    const double t = std::min(next_a, next_b);
    if (next_a == t) ++i;
    if (next_b == t) ++j;
    sup = std::max(sup, std::abs(benchmark.values[i] - coarse.values[j]));
  }
  return sup;
}

// -- L^p aggregation ------------------------------------------------------------------------------

struct LpEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// (mean of s^p)^{1/p} with a delta-method standard error.
inline LpEstimate estimate_lp(std::span<const double> samples, double p) {
  if (samples.empty()) throw domain_error("estimate_lp needs at least one sample");
  if (!(p > 1.0)) throw domain_error("estimate_lp requires p > 1");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += std::pow(std::abs(s), p);
  mean /= n;
  double var = 0.0;
  if (samples.size() > 1) {
    for (double s : samples) {
      const double d = std::pow(std::abs(s), p) - mean;
      var += d * d;
    }
    var /= (n - 1.0);
  }
  LpEstimate out;
  out.estimate = std::pow(mean, 1.0 / p);
  if (mean > 0.0) out.stderr_ = std::pow(mean, 1.0 / p - 1.0) / p * std::sqrt(var / n);
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Batch means: average of the loop values, standard error from their spread.
inline MeanSe batch_mean(std::span<const double> values) {
  MeanSe r;
  if (values.empty()) return r;
  const double n = static_cast<double>(values.size());
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

// -- variance-matched h ---------------------------------------------------------------------------

/// Total removed-jump variance over [0, T] under dynamic cutting with parameter h.
inline double dc_total_small_variance(const LevyModel& model, double eps_dc, double h, double horizon) {
  const CutParams params{eps_dc, h, horizon};
  auto rate = [&](double s) { return small_jump_variance_rate(params, model, s); };
  return quad::integrate_endpoint(rate, 0.0, horizon, 1e-13).value;
}

/// Solves  int_0^T smallvar_DC(s; h) ds = T * smallvar_AR  for h by bisection in log10 h.
inline double h_for_variance_match(const LevyModel& model, double eps_dc, double eps_ar, double horizon = 1.0,
                                   double rel_tol = 1e-6) {
  if (!(eps_dc > 0.0 && eps_dc < 1.0)) throw domain_error("eps_DC must lie in (0, 1)");
  if (!(eps_ar > 0.0 && eps_ar < 1.0)) throw domain_error("eps_AR must lie in (0, 1)");
  const double target = horizon * ar_small_jump_variance(ArParams{eps_ar, horizon}, model);
  auto f = [&](double lh) {
    return dc_total_small_variance(model, eps_dc, std::pow(10.0, lh), horizon) - target;
  };
  double lo = -60.0, hi = 0.0;
  double flo = f(lo), fhi = f(hi);
  for (int i = 0; i < 4 && flo > 0.0; ++i) {
    lo *= 2.0;
    flo = f(lo);
  }
  for (int i = 0; i < 4 && fhi < 0.0; ++i) {
    hi += 60.0;
    fhi = f(hi);
  }
  if (!(flo <= 0.0 && fhi >= 0.0))
    throw bracket_error("no sign change for the DC/AR variance match in log10 h in [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "]");
  const double step_tol = std::log10(1.0 + rel_tol);
  while (hi - lo > step_tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return std::pow(10.0, 0.5 * (lo + hi));
}

// -- convergence order ----------------------------------------------------------------------------

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}

/// Slope of log(error) against log(n); no uncertainty attached.
inline LineFit fit_power_law(std::span<const double> ns, std::span<const double> errors) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(errors[i] > 0.0)) continue;
    x.push_back(std::log(ns[i]));
    y.push_back(std::log(errors[i]));
  }
  if (x.size() < 2) throw domain_error("need at least two positive errors to fit a power law");
  return least_squares(x, y);
}

struct ConvergenceFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t resolutions_used = 0;
  std::vector<std::string> warnings;
};

/// Fits log(mean error) = c + slope * log(2^k). `loop_estimates[i]` holds the per-loop L^p
/// estimates at resolution 2^{ks[i]}; loops are paired across resolutions (same trajectories), so
/// the bootstrap resamples loop indices jointly. Percentile CI at the given level.
inline ConvergenceFit fit_convergence_order(std::span<const unsigned> ks,
                                            const std::vector<std::vector<double>>& loop_estimates,
                                            std::uint64_t seed = 1, std::size_t resamples = 2000,
                                            double level = 0.95) {
  if (ks.size() != loop_estimates.size()) throw domain_error("resolution/estimate size mismatch");
  ConvergenceFit out;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto& v = loop_estimates[i];
    const double m = v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (m > 0.0)
      keep.push_back(i);
    else
      out.warnings.push_back("resolution k=" + std::to_string(ks[i]) + " has nonpositive error; excluded");
  }
  if (keep.size() < 3) throw domain_error("convergence fit needs at least 3 resolutions with positive errors");
  const std::size_t loops = loop_estimates[keep.front()].size();
  for (std::size_t i : keep)
    if (loop_estimates[i].size() != loops) throw domain_error("unequal loop counts across resolutions");

  std::vector<double> x;
  for (std::size_t i : keep) x.push_back(static_cast<double>(ks[i]) * std::log(2.0));

  auto fit_with = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> y;
    for (std::size_t i : keep) {
      double s = 0.0;
      for (std::size_t l : idx) s += loop_estimates[i][l];
      y.push_back(std::log(s / static_cast<double>(idx.size())));
    }
    return least_squares(x, y);
  };

  std::vector<std::size_t> all(loops);
  std::iota(all.begin(), all.end(), 0);
  const LineFit base = fit_with(all);
  out.slope = base.slope;
  out.intercept = base.intercept;
  out.resolutions_used = keep.size();
  out.ci_low = out.ci_high = base.slope;
  if (loops < 2 || resamples == 0) return out;

  Engine rng = SeedNode(seed).child("bootstrap").engine();
  std::uniform_int_distribution<std::size_t> pick(0, loops - 1);
  std::vector<double> slopes;
  slopes.reserve(resamples);
  std::vector<std::size_t> idx(loops);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& v : idx) v = pick(rng);
    const LineFit f = fit_with(idx);
    if (std::isfinite(f.slope)) slopes.push_back(f.slope);
  }
  std::sort(slopes.begin(), slopes.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(slopes.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, slopes.size() - 1);
    return slopes[lo] + (pos - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
  };
  out.ci_low = quantile((1.0 - level) / 2.0);
  out.ci_high = quantile(1.0 - (1.0 - level) / 2.0);
  return out;
}

/// Exponent r of the leading n^{-r} jump-truncation term of the strong-error bound (the
/// coefficient-regularity term and eps* are dropped).
inline double theoretical_rate(int scheme, double alpha, double p) {
  if (scheme == 2) return (2.0 - alpha) / (2.0 * alpha) + 1.0 / (2.0 * p);
  const double ps = std::min(p, 2.0);
  return (ps - alpha) / (ps * alpha);
}

// -- comparison runner ----------------------------------------------------------------------------

enum class HMode { match_ar_variance, n_power, fixed };

struct ExperimentConfig {
  std::vector<double> alphas{0.5, 1.0, 1.5};
  int scheme = 2;
  std::vector<Method> methods{Method::ar, Method::dc};
  double eps_dc = 0.1;
  double eps_ar = 0.01;
  HMode h_mode = HMode::match_ar_variance;
  double h_fixed = 0.0;
  unsigned benchmark_k = 14;
  std::vector<unsigned> coarse_ks{9, 10, 11, 12};
  std::vector<double> ps{2, 4, 6, 8, 10};
  std::size_t loops = 20;
  std::size_t trajectories = 100;
  std::uint64_t seed = 20240917;
  double horizon = 1.0;
  double x0 = 0.0;
  SigmaMode sigma_mode = SigmaMode::closed_form;
  SizeLaw size_law = SizeLaw::time_mixture;
  SmallJumpCoupling coupling = SmallJumpCoupling::brownian;
  bool compensate_large_jumps = true;

  void validate() const {
    if (alphas.empty()) throw domain_error("alpha list is empty");
    if (methods.empty()) throw domain_error("method list is empty");
    if (scheme != 1 && scheme != 2) throw domain_error("scheme must be 1 or 2");
    if (coarse_ks.empty()) throw domain_error("coarse resolution list is empty");
    for (unsigned k : coarse_ks)
      if (k >= benchmark_k) throw domain_error("coarse exponents must be below the benchmark exponent");
    if (ps.empty()) throw domain_error("p list is empty");
    for (double p : ps) {
      if (!(p > 1.0)) throw domain_error("p values must exceed 1");
      if (scheme == 1)
        for (double a : alphas)
          if (!(p > a)) throw domain_error("scheme 1 requires p > max(1, alpha)");
    }
    if (loops == 0 || trajectories == 0) throw domain_error("loops and trajectories must be positive");
    if (!(eps_dc > 0.0 && eps_dc < 1.0)) throw domain_error("eps_DC must lie in (0, 1)");
    if (!(eps_ar > 0.0)) throw domain_error("eps_AR must be positive");
    if (h_mode == HMode::fixed && !(h_fixed > 0.0)) throw domain_error("fixed h must be positive");
  }
};

using ModelFactory = std::function<std::unique_ptr<LevyModel>(double alpha)>;

inline double resolve_h(const ExperimentConfig& cfg, const LevyModel& model) {
  switch (cfg.h_mode) {
    case HMode::fixed:
      return cfg.h_fixed;
    case HMode::n_power:
      return std::pow(static_cast<double>(std::size_t{1} << cfg.benchmark_k), -1.0 / cfg.eps_dc);
    case HMode::match_ar_variance:
      break;
  }
  return h_for_variance_match(model, cfg.eps_dc, cfg.eps_ar, cfg.horizon);
}

inline CutRule cut_rule_for(const ExperimentConfig& cfg, Method m, double h) {
  if (m == Method::dc) return CutRule::dynamic(CutParams{cfg.eps_dc, h, cfg.horizon});
  return CutRule::fixed(ArParams{cfg.eps_ar, cfg.horizon});
}

struct ErrorRow {
  double alpha = 0.0;
  Method method = Method::dc;
  int scheme = 2;
  unsigned k = 0;
  double p = 2.0;
  double error = 0.0;
  double stderr_ = 0.0;
  std::size_t loops = 0;
  std::size_t excluded = 0;
};

struct DifferenceRow {
  double alpha = 0.0;
  unsigned k = 0;
  double p = 2.0;
  double difference = 0.0;  ///< methods[0] - methods[1]
  double stderr_ = 0.0;
};

struct ErrorTable {
  std::vector<Method> methods;
  std::vector<ErrorRow> rows;
  std::vector<DifferenceRow> differences;
  /// (alpha, method, k, p) -> per-loop L^p estimates
  std::map<std::tuple<double, Method, unsigned, double>, std::vector<double>> loop_estimates;
  std::map<double, double> h_used;
  std::vector<std::string> warnings;

  const ErrorRow* find(double alpha, Method m, unsigned k, double p) const {
    for (const auto& r : rows)
      if (r.alpha == alpha && r.method == m && r.k == k && r.p == p) return &r;
    return nullptr;
  }
};

/// Runs `body(i)` for i in [0, count) on `jobs` threads. Work is pulled from a shared counter;
/// callers write results into slot i so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  const auto n = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  for (unsigned w = 0; w < n; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
}

/// Strong L^p errors of every coarse resolution against the benchmark, per method, alpha, k, p.
/// All randomness flows from cfg.seed through (alpha, loop, trajectory); methods of one trajectory
/// share Brownian noise.
inline ErrorTable run_comparison(const ExperimentConfig& cfg, unsigned jobs = 1,
                                 const ModelFactory& factory = make_truncated_stable) {
  cfg.validate();
  ErrorTable table;
  table.methods = cfg.methods;
  const std::size_t n_items = cfg.loops * cfg.trajectories;
  const std::size_t n_k = cfg.coarse_ks.size();
  const std::size_t n_m = cfg.methods.size();
  const SeedNode root(cfg.seed);

  for (double alpha : cfg.alphas) {
    const auto model = factory(alpha);
    const CoefficientSet coeffs = sin_cos_example(*model);
    const double h = resolve_h(cfg, *model);
    table.h_used[alpha] = h;

    std::vector<CutRule> cuts;
    for (Method m : cfg.methods) cuts.push_back(cut_rule_for(cfg, m, h));

    EngineOptions eopt;
    eopt.x0 = cfg.x0;
    eopt.sigma_mode = cfg.sigma_mode;
    eopt.coupling = cfg.coupling;
    eopt.compensate_large_jumps = cfg.compensate_large_jumps;
    NoiseOptions nopt;
    nopt.with_diffusion = !coeffs.diffusion_free;
    nopt.size_law = cfg.size_law;

    // sups[(m * n_items + item) * n_k + ki]
    std::vector<double> sups(n_m * n_items * n_k, 0.0);
    std::vector<unsigned char> excluded(n_m * n_items, 0);
    const SeedNode alpha_node = root.child(std::bit_cast<std::uint64_t>(alpha));

    parallel_for(n_items, jobs, [&](std::size_t item) {
      const std::size_t loop = item / cfg.trajectories;
      const std::size_t traj = item % cfg.trajectories;
      const SeedNode node = alpha_node.child(loop).child(traj);
      for (std::size_t mi = 0; mi < n_m; ++mi) {
        try {
          const DrivingNoise noise = prepare_noise(node, cfg.benchmark_k, cuts[mi], *model, nopt);
          const PathRecord bench =
              simulate_path(cfg.scheme, coeffs, *model, cuts[mi], noise, noise.benchmark_n(), eopt);
          for (std::size_t ki = 0; ki < n_k; ++ki) {
            const PathRecord coarse = simulate_path(cfg.scheme, coeffs, *model, cuts[mi], noise,
                                                    std::size_t{1} << cfg.coarse_ks[ki], eopt);
            sups[(mi * n_items + item) * n_k + ki] = strong_error(bench, coarse);
          }
        } catch (const divergence_error&) {
          excluded[mi * n_items + item] = 1;
        }
      }
    });

    std::vector<std::size_t> excluded_count(n_m, 0);
    for (std::size_t mi = 0; mi < n_m; ++mi) {
      for (std::size_t item = 0; item < n_items; ++item) excluded_count[mi] += excluded[mi * n_items + item];
      if (excluded_count[mi] * 100 > n_items)
        table.warnings.push_back(std::string("alpha=") + std::to_string(alpha) + " method=" +
                                 to_string(cfg.methods[mi]) + ": more than 1% of trajectories excluded; cell invalid");
    }

    for (std::size_t mi = 0; mi < n_m; ++mi) {
      for (std::size_t ki = 0; ki < n_k; ++ki) {
        for (double p : cfg.ps) {
          std::vector<double> per_loop;
          per_loop.reserve(cfg.loops);
          for (std::size_t loop = 0; loop < cfg.loops; ++loop) {
            std::vector<double> samples;
            for (std::size_t traj = 0; traj < cfg.trajectories; ++traj) {
              const std::size_t item = loop * cfg.trajectories + traj;
              if (excluded[mi * n_items + item]) continue;
              samples.push_back(sups[(mi * n_items + item) * n_k + ki]);
            }
            per_loop.push_back(samples.empty() ? 0.0 : estimate_lp(samples, p).estimate);
          }
          const MeanSe agg = batch_mean(per_loop);
          table.rows.push_back({alpha, cfg.methods[mi], cfg.scheme, cfg.coarse_ks[ki], p, agg.mean, agg.stderr_,
                                cfg.loops, excluded_count[mi]});
          table.loop_estimates[{alpha, cfg.methods[mi], cfg.coarse_ks[ki], p}] = std::move(per_loop);
        }
      }
    }

    if (n_m == 2) {
      for (unsigned k : cfg.coarse_ks) {
        for (double p : cfg.ps) {
          const auto& a = table.loop_estimates.at({alpha, cfg.methods[0], k, p});
          const auto& b = table.loop_estimates.at({alpha, cfg.methods[1], k, p});
          std::vector<double> d(a.size());
          for (std::size_t l = 0; l < a.size(); ++l) d[l] = a[l] - b[l];
          const MeanSe agg = batch_mean(d);
          table.differences.push_back({alpha, k, p, agg.mean, agg.stderr_});
        }
      }
    }
  }
  return table;
}

}  // namespace levydc
