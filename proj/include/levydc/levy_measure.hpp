#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "levydc/errors.hpp"
#include "levydc/quadrature.hpp"

namespace levydc {

enum class Side { positive, negative };

inline constexpr Side both_sides[] = {Side::positive, Side::negative};

inline double sign_of(Side side) { return side == Side::positive ? 1.0 : -1.0; }

inline const char* to_string(Side side) { return side == Side::positive ? "+" : "-"; }

/// A one-dimensional Lévy measure nu, seen through the quantities the cutting
/// constructions need.
///
/// Every side-aware function works on magnitudes: `density(side, z)` is the
/// density of nu at sign(side) * z for z > 0. The defaults derive tails,
/// generalized inverses and truncated moments numerically from the density;
/// models with closed forms override them.
///
/// Instances are immutable after construction and may be shared across threads.
class LevyModel {
 public:
  virtual ~LevyModel() = default;

  virtual std::string name() const = 0;
  virtual double density(Side side, double z) const = 0;
  /// Largest magnitude charged by the measure on this side (may be +inf).
  virtual double support_radius(Side side) const = 0;
  /// Exponent used for rate annotations (alpha = max(alpha+, alpha-)).
  virtual double stability_index() const = 0;
  virtual bool has_closed_forms() const { return false; }
  /// nu(-dz) = nu(dz).
  virtual bool is_symmetric() const { return false; }
  /// False when the side carries no mass at all.
  virtual bool has_side(Side) const { return true; }

  /// N^{side}(r): mass of (r, inf) (positive side) or (-inf, -r) (negative side).
  virtual double tail(Side side, double r) const {
    check_radius(r);
    return tail_by_quadrature(side, r);
  }

  /// tau^{side}(t) = sup { r >= 0 : N^{side}(r) >= 1/t }.
  virtual double tau(Side side, double t) const { return tau_by_bisection(side, t); }

  /// One-sided truncated moment: integral of z^p over 0 < z <= r.
  virtual double truncated_moment(Side side, double p, double r) const {
    if (r <= 0.0) return 0.0;
    if (!has_side(side)) return 0.0;
    const double upper = std::min(r, support_radius(side));
    auto f = [&](double z) { return std::pow(z, p) * density(side, z); };
    const auto q = quad::integrate_log(f, 0.0, upper);
    if (!std::isfinite(q.value) || q.error > 1e-6 * std::max(1.0, std::abs(q.value)))
      throw integrability_error("truncated moment of order " + std::to_string(p) +
                                " does not converge for " + name());
    return q.value;
  }

  /// One-sided upper moment: integral of z^p over z > r.
  virtual double upper_moment(Side side, double p, double r) const {
    if (!has_side(side)) return 0.0;
    const double radius = support_radius(side);
    if (r >= radius) return 0.0;
    auto f = [&](double z) { return std::pow(z, p) * density(side, z); };
    const auto q = quad::integrate_log(f, std::max(r, 0.0), radius);
    if (!std::isfinite(q.value) || q.error > 1e-6 * std::max(1.0, std::abs(q.value)))
      throw integrability_error("upper moment of order " + std::to_string(p) +
                                " does not converge for " + name());
    return q.value;
  }

  // -- derived quantities, shared by all models ------------------------------------------------

  double tail(double r) const { return tail(Side::positive, r) + tail(Side::negative, r); }

  double tau(double t) const { return std::max(tau(Side::positive, t), tau(Side::negative, t)); }

  /// Two-sided truncated absolute moment: integral of |z|^p over 0 < |z| <= r.
  double truncated_abs_moment(double p, double r) const {
    return truncated_moment(Side::positive, p, r) + truncated_moment(Side::negative, p, r);
  }

  /// Integral of g(z) nu(dz) over the signed region r1 < |z| <= r2 on one side; g receives the
  /// signed jump z.
  template <class G>
  double restricted_integral(Side side, G&& g, double r1, double r2,
                             double tol = quad::default_tolerance) const {
    if (!has_side(side)) return 0.0;
    const double hi = std::min(r2, support_radius(side));
    const double lo = std::max(r1, 0.0);
    if (!(hi > lo)) return 0.0;
    const double s = sign_of(side);
    auto f = [&](double z) { return g(s * z) * density(side, z); };
    return quad::integrate_log(f, lo, hi, tol).value;
  }

  template <class G>
  double restricted_integral(G&& g, double r1, double r2,
                             double tol = quad::default_tolerance) const {
    return restricted_integral(Side::positive, g, r1, r2, tol) +
           restricted_integral(Side::negative, g, r1, r2, tol);
  }

  double tail_by_quadrature(Side side, double r) const {
    check_radius(r);
    if (!has_side(side)) return 0.0;
    const double radius = support_radius(side);
    if (r >= radius) return 0.0;
    auto f = [&](double z) { return density(side, z); };
    return quad::integrate_log(f, r, radius, 1e-12).value;
  }

  /// Generalized inverse of the tail by geometric bisection. Always numeric, also for models
  /// with a closed-form tau, so the two can be cross-checked.
  double tau_by_bisection(Side side, double t, double rel_tol = 1e-12) const {
    if (!(t > 0.0)) throw domain_error("tau requires t > 0, got " + std::to_string(t));
    if (!has_side(side)) return 0.0;
    const double level = 1.0 / t;

    double hi = support_radius(side);
    if (std::isinf(hi)) {
      hi = 1.0;
      while (tail(side, hi) >= level) {
        hi *= 2.0;
        if (hi > 1e300) throw degenerate_model_error("tail does not decay for " + name());
      }
    }
    double lo = 1e-15;
    while (tail(side, lo) < level) {
      lo *= 1e-3;
      if (lo < 1e-300) return 0.0;  // level above the total mass
    }
    if (lo >= hi) return hi;

    while (hi / lo > 1.0 + rel_tol) {
      const double mid = std::sqrt(lo * hi);
      if (mid <= lo || mid >= hi) break;
      if (tail(side, mid) >= level)
        lo = mid;
      else
        hi = mid;
    }
    const double r = lo;
    if (r < support_radius(side) && tail(side, r * (1.0 - 1e-6)) == tail(side, r))
      throw degenerate_model_error("tail of " + name() + " is flat near r=" + std::to_string(r) +
                                   "; generalized inverse is not unique");
    return r;
  }

 protected:
  static void check_radius(double r) {
    if (!(r > 0.0)) throw domain_error("tail requires r > 0, got " + std::to_string(r));
  }
};

/// nu(dz) = 1{|z| <= 1} |z|^{-1-alpha} dz with every closed form enabled.
class TruncatedStableModel final : public LevyModel {
 public:
  explicit TruncatedStableModel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
      throw domain_error("truncated-stable alpha must lie in (0, 2), got " + std::to_string(alpha));
  }

  double alpha() const { return alpha_; }

  std::string name() const override { return "truncated-stable(alpha=" + std::to_string(alpha_) + ")"; }
  double density(Side, double z) const override {
    return (z > 0.0 && z <= 1.0) ? std::pow(z, -1.0 - alpha_) : 0.0;
  }
  double support_radius(Side) const override { return 1.0; }
  double stability_index() const override { return alpha_; }
  bool has_closed_forms() const override { return true; }
  bool is_symmetric() const override { return true; }

  double tail(Side, double r) const override {
    check_radius(r);
    if (r >= 1.0) return 0.0;
    return std::expm1(-alpha_ * std::log(r)) / alpha_;
  }

  double tau(Side, double t) const override {
    if (!(t > 0.0)) throw domain_error("tau requires t > 0, got " + std::to_string(t));
    return std::exp(-std::log1p(alpha_ / t) / alpha_);
  }

  double truncated_moment(Side, double p, double r) const override {
    if (r <= 0.0) return 0.0;
    if (!(p > alpha_))
      throw integrability_error("truncated moment of order " + std::to_string(p) +
                                " diverges for alpha=" + std::to_string(alpha_));
    return std::pow(std::min(r, 1.0), p - alpha_) / (p - alpha_);
  }

  double upper_moment(Side, double p, double r) const override {
    if (r >= 1.0) return 0.0;
    if (r <= 0.0) {
      if (!(p > alpha_)) throw integrability_error("upper moment diverges at the origin");
      return 1.0 / (p - alpha_);
    }
    if (p == alpha_) return -std::log(r);
    return -std::expm1((p - alpha_) * std::log(r)) / (p - alpha_);
  }

 private:
  double alpha_;
};

/// A measure given only by its one-sided densities; every quantity is computed numerically.
/// This is the library-level extension point for user-supplied measures.
class DensityLevyModel final : public LevyModel {
 public:
  using Density = std::function<double(double)>;

  struct SideSpec {
    Density density;        ///< empty for a side without mass
    double radius = 1.0;    ///< support radius on this side
  };

  DensityLevyModel(std::string name, SideSpec positive, SideSpec negative, double alpha,
                   bool symmetric = false)
      : name_(std::move(name)),
        pos_(std::move(positive)),
        neg_(std::move(negative)),
        alpha_(alpha),
        symmetric_(symmetric) {}

  std::string name() const override { return name_; }
  double density(Side side, double z) const override {
    const auto& s = spec(side);
    if (!s.density || z <= 0.0 || z > s.radius) return 0.0;
    return s.density(z);
  }
  double support_radius(Side side) const override { return spec(side).radius; }
  double stability_index() const override { return alpha_; }
  bool is_symmetric() const override { return symmetric_; }
  bool has_side(Side side) const override { return static_cast<bool>(spec(side).density); }

 private:
  const SideSpec& spec(Side side) const { return side == Side::positive ? pos_ : neg_; }

  std::string name_;
  SideSpec pos_;
  SideSpec neg_;
  double alpha_;
  bool symmetric_;
};

// -- Pruitt functions ------------------------------------------------------------------------------

/// psi^{L,side}(xi) = xi^2 * (second moment of nu^{side} over 0 < z <= 1/xi).
inline double pruitt_psi(const LevyModel& model, Side side, double xi) {
  if (!(xi > 0.0)) throw domain_error("pruitt_psi requires xi > 0, got " + std::to_string(xi));
  return xi * xi * model.truncated_moment(side, 2.0, 1.0 / xi);
}

struct RatioBand {
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  std::size_t evaluated = 0;
};

/// Ratios N^{side}(r) / psi^{L,side}(1/r) over a grid of radii in (0, 1]. Sides without mass and
/// radii where both quantities vanish are skipped.
inline RatioBand check_tail_pruitt_equivalence(const LevyModel& model, std::span<const double> radii) {
  if (radii.empty()) throw domain_error("radius grid is empty");
  RatioBand band;
  for (double r : radii) {
    if (!(r > 0.0 && r <= 1.0)) throw domain_error("radii must lie in (0, 1]");
    for (Side side : both_sides) {
      if (!model.has_side(side)) continue;
      const double n = model.tail(side, r);
      const double psi = pruitt_psi(model, side, 1.0 / r);
      if (n == 0.0 && psi == 0.0) continue;
      const double ratio = n / psi;
      band.min_ratio = std::min(band.min_ratio, ratio);
      band.max_ratio = std::max(band.max_ratio, ratio);
      ++band.evaluated;
    }
  }
  if (band.evaluated == 0 || band.max_ratio == 0.0)
    throw degenerate_model_error("tail of " + model.name() + " vanishes on the whole grid");
  return band;
}

inline std::unique_ptr<LevyModel> make_truncated_stable(double alpha) {
  return std::make_unique<TruncatedStableModel>(alpha);
}

}  // namespace levydc
