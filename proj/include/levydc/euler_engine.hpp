#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "levydc/ar_cutting.hpp"
#include "levydc/dc_cutting.hpp"
#include "levydc/errors.hpp"
#include "levydc/levy_measure.hpp"
#include "levydc/rng.hpp"
#include "levydc/sde_model.hpp"

namespace levydc {

/// t_i = T * (i / n). For n a power of two the quotient is exact, so a coarse regular time is
/// bit-identical to the fine regular time it coincides with.
inline double regular_time(std::size_t i, std::size_t n, double horizon) {
  return horizon * (static_cast<double>(i) / static_cast<double>(n));
}

struct GridPoint {
  double time = 0.0;
  bool regular = false;
  std::size_t regular_index = 0;  ///< valid when regular
  std::size_t jump_begin = 0;     ///< jumps carried by this point: [jump_begin, jump_end)
  std::size_t jump_end = 0;

  bool has_jump() const { return jump_end > jump_begin; }
};

/// Sorted union of the regular grid and the jump times. A jump falling exactly on a regular
/// time is carried by that regular point.
struct MergedGrid {
  std::size_t n = 0;
  double horizon = 1.0;
  std::vector<GridPoint> points;
  std::vector<JumpEvent> jumps;

  /// rho(t): number of merged points strictly before t.
  std::size_t rho(double t) const {
    return static_cast<std::size_t>(
        std::lower_bound(points.begin(), points.end(), t,
                         [](const GridPoint& p, double v) { return p.time < v; }) -
        points.begin());
  }

  std::size_t jump_point_count() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const GridPoint& p) { return p.has_jump(); }));
  }

  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(points.size());
    for (const auto& p : points) t.push_back(p.time);
    return t;
  }
};

inline MergedGrid build_merged_grid(std::size_t n, const JumpStream& stream, double horizon) {
  if (n < 1) throw domain_error("grid resolution n must be >= 1");
  MergedGrid grid;
  grid.n = n;
  grid.horizon = horizon;
  grid.jumps = stream.events;
  std::stable_sort(grid.jumps.begin(), grid.jumps.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
  for (const auto& e : grid.jumps)
    if (!(e.time > 0.0 && e.time <= horizon))
      throw domain_error("jump time " + std::to_string(e.time) + " outside (0, T]");

  grid.points.reserve(n + 1 + grid.jumps.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = regular_time(i, n, horizon);
    while (j < grid.jumps.size() && grid.jumps[j].time < t) {
      const std::size_t begin = j;
      const double jt = grid.jumps[j].time;
      while (j < grid.jumps.size() && grid.jumps[j].time == jt) ++j;
      grid.points.push_back({jt, false, 0, begin, j});
    }
    const std::size_t begin = j;
    while (j < grid.jumps.size() && grid.jumps[j].time == t) ++j;
    grid.points.push_back({t, true, i, begin, j});
  }
  return grid;
}

enum class SmallJumpCoupling {
  /// zeta_i = (W(t_i) - W(t_{i-1})) / sqrt(Delta_i) for one fine Brownian motion W shared by all
  /// resolutions of a trajectory.
  brownian,
  /// zeta_i drawn per (resolution, interval) from independent substreams.
  independent,
};

/// Everything random about one trajectory, resolved on the benchmark (finest) merged grid.
/// Coarse resolutions aggregate the fine increments, so all resolutions are coupled.
struct DrivingNoise {
  std::uint64_t trajectory_id = 0;
  unsigned benchmark_k = 0;
  Method method = Method::dc;
  MergedGrid fine;
  std::vector<double> dB;  ///< fine increments of B, empty when diffusion-free
  std::vector<double> dW;  ///< fine increments of the small-jump Brownian motion W
  SeedNode small_jump_seed{0};

  std::size_t benchmark_n() const { return std::size_t{1} << benchmark_k; }
  double horizon() const { return fine.horizon; }

  /// Sum of fine increments over fine points (i0, i1], accumulated left to right.
  static double aggregate(std::span<const double> increments, std::size_t i0, std::size_t i1) {
    double s = 0.0;
    for (std::size_t j = i0; j < i1; ++j) s += increments[j];
    return s;
  }
};

namespace detail {

// Fine increments on the merged grid: Gaussian increments per regular cell, split at interior
// jump points by a sequential Brownian bridge.
inline std::vector<double> fine_increments(const MergedGrid& grid, Engine& cells, Engine& bridge) {
  const std::size_t n = grid.n;
  const double dt = grid.horizon / static_cast<double>(n);
  std::normal_distribution<double> normal;
  std::vector<double> cell(n);
  for (auto& v : cell) v = std::sqrt(dt) * normal(cells);

  std::vector<double> out;
  out.reserve(grid.points.size() - 1);
  std::normal_distribution<double> bridge_normal;
  std::size_t p = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t q = p + 1;
    while (!grid.points[q].regular) ++q;
    if (q == p + 1) {
      out.push_back(cell[k]);
    } else {
      const double t_end = grid.points[q].time;
      double t_prev = grid.points[p].time;
      double w_prev = 0.0;
      for (std::size_t m = p + 1; m < q; ++m) {
        const double u = grid.points[m].time;
        const double span = t_end - t_prev;
        const double mean = w_prev + (u - t_prev) / span * (cell[k] - w_prev);
        const double var = (u - t_prev) * (t_end - u) / span;
        const double w = mean + std::sqrt(std::max(var, 0.0)) * bridge_normal(bridge);
        out.push_back(w - w_prev);
        w_prev = w;
        t_prev = u;
      }
      out.push_back(cell[k] - w_prev);
    }
    p = q;
  }
  return out;
}

}  // namespace detail

/// Builds the noise of one trajectory around a given jump stream.
inline DrivingNoise make_noise(const SeedNode& node, unsigned benchmark_k, double horizon,
                               Method method, JumpStream jumps, bool with_diffusion = true) {
  if (benchmark_k > 30) throw domain_error("benchmark exponent too large");
  DrivingNoise noise;
  noise.trajectory_id = node.key();
  noise.benchmark_k = benchmark_k;
  noise.method = method;
  noise.fine = build_merged_grid(std::size_t{1} << benchmark_k, jumps, horizon);
  {
    Engine cells = node.child("brownian-W").engine();
    Engine bridge = node.child("bridge-W").engine();
    noise.dW = detail::fine_increments(noise.fine, cells, bridge);
  }
  if (with_diffusion) {
    Engine cells = node.child("brownian-B").engine();
    Engine bridge = node.child("bridge-B").engine();
    noise.dB = detail::fine_increments(noise.fine, cells, bridge);
  }
  noise.small_jump_seed = node.child("small-jump");
  return noise;
}

struct NoiseOptions {
  bool with_diffusion = true;
  SizeLaw size_law = SizeLaw::time_mixture;
};

/// Samples the trajectory's large jumps (dynamic or fixed cut, from a method-specific substream)
/// and the shared Brownian noise. B and W depend only on the node, not on the method, so AR and
/// DC runs of the same trajectory see the same regular-grid Brownian increments.
inline DrivingNoise prepare_noise(const SeedNode& node, unsigned benchmark_k, const CutRule& cut,
                                  const LevyModel& model, NoiseOptions options = {}) {
  JumpStream jumps;
  if (cut.method == Method::dc) {
    cut.dc.validate();
    Engine rng = node.child("jumps-dc").engine();
    jumps = sample_dc_jumps(cut.dc, model, rng, options.size_law);
  } else {
    cut.ar.validate();
    Engine rng = node.child("jumps-ar").engine();
    jumps = ar_sample_jumps(cut.ar, model, rng);
  }
  return make_noise(node, benchmark_k, cut.horizon(), cut.method, std::move(jumps), options.with_diffusion);
}

struct PathRecord {
  std::uint64_t trajectory_id = 0;
  int scheme = 2;
  Method method = Method::dc;
  std::size_t n = 0;
  std::vector<double> times;
  std::vector<double> values;

  /// Cadlag extension: X_t = X_{t_i} for t in [t_i, t_{i+1}).
  double value_at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return values.front();
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
  }
};

struct EngineOptions {
  double x0 = 0.0;
  SigmaMode sigma_mode = SigmaMode::closed_form;
  bool compensate_large_jumps = true;
  bool zero_small_variance = false;
  SmallJumpCoupling coupling = SmallJumpCoupling::brownian;
  double divergence_bound = 1e12;
};

/// Euler-Maruyama on the merged grid of resolution n.
///
/// Step i (t_{i-1} -> t_i), state frozen at x = X_{t_{i-1}}:
///   X_{t_i} = x + a(t_{i-1},x) D + b(t_{i-1},x) dB + sum_{jumps at t_i} c(t_{i-1},x,z)
///             + sigma_i(x) zeta_i - compensator(x; t_{i-1}, t_i)
/// with sigma_i = 0 for scheme 1.
inline PathRecord simulate_path(int scheme, const CoefficientSet& coeffs, const LevyModel& model,
                                const CutRule& cut, const DrivingNoise& noise, std::size_t n,
                                const EngineOptions& options = {}) {
  if (scheme != 1 && scheme != 2) throw domain_error("scheme must be 1 or 2");
  const std::size_t fine_n = noise.benchmark_n();
  if (n < 1 || n > fine_n || fine_n % n != 0)
    throw domain_error("resolution " + std::to_string(n) + " does not divide the benchmark grid");
  if (noise.method != cut.method) throw coupling_error("noise was prepared for a different cutting method");
  const bool with_b = !coeffs.diffusion_free;
  if (with_b && noise.dB.empty()) throw coupling_error("noise was prepared without a diffusion component");

  const std::size_t stride = fine_n / n;
  const auto& pts = noise.fine.points;

  PathRecord path;
  path.trajectory_id = noise.trajectory_id;
  path.scheme = scheme;
  path.method = cut.method;
  path.n = n;
  path.times.reserve(n + 1 + noise.fine.jumps.size());
  path.values.reserve(n + 1 + noise.fine.jumps.size());

  Engine small_rng = noise.small_jump_seed.child(n).engine();
  std::normal_distribution<double> normal;

  double x = options.x0;
  double t_prev = pts.front().time;
  path.times.push_back(t_prev);
  path.values.push_back(x);

  double acc_b = 0.0;
  double acc_w = 0.0;
  std::size_t step = 0;
  for (std::size_t j = 1; j < pts.size(); ++j) {
    if (with_b) acc_b += noise.dB[j - 1];
    acc_w += noise.dW[j - 1];
    const GridPoint& pt = pts[j];
    if (!pt.has_jump() && !(pt.regular && pt.regular_index % stride == 0)) continue;

    ++step;
    const double t = pt.time;
    const double dt = t - t_prev;
    const double drift = coeffs.drift(t_prev, x) * dt;
    const double diffusion = with_b ? coeffs.diffusion(t_prev, x) * acc_b : 0.0;
    double jump = 0.0;
    for (std::size_t e = pt.jump_begin; e < pt.jump_end; ++e)
      jump += coeffs.jump(t_prev, x, noise.fine.jumps[e].size);

    double small = 0.0;
    if (scheme == 2) {
      const double var =
          options.zero_small_variance ? 0.0 : sigma_small_sq(coeffs, model, cut, x, t_prev, t, options.sigma_mode);
      const double zeta = options.coupling == SmallJumpCoupling::brownian ? acc_w / std::sqrt(dt) : normal(small_rng);
      small = std::sqrt(var) * zeta;
    }
    const double comp =
        options.compensate_large_jumps ? large_jump_compensator(coeffs, model, cut, x, t_prev, t) : 0.0;

    x = x + drift + diffusion + jump + small - comp;
    if (!std::isfinite(x) || std::abs(x) > options.divergence_bound) throw divergence_error(step, t, x);

    path.times.push_back(t);
    path.values.push_back(x);
    t_prev = t;
    acc_b = 0.0;
    acc_w = 0.0;
  }
  return path;
}

}  // namespace levydc
