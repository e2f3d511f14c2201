#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "levydc/levy_measure.hpp"
#include "oracles.hpp"

using namespace levydc;

namespace {

double stable_density(double alpha, double z) { return std::pow(z, -1.0 - alpha); }

DensityLevyModel numeric_stable(double alpha) {
  auto d = [alpha](double z) { return (z > 0.0 && z <= 1.0) ? stable_density(alpha, z) : 0.0; };
  return DensityLevyModel("numeric-stable", {d, 1.0}, {d, 1.0}, alpha, true);
}

}  // namespace

TEST(Tail, StableAlphaOneAtHalf) {
  TruncatedStableModel m(1.0);
  EXPECT_NEAR(m.tail(Side::positive, 0.5), 1.0, 1e-15);
  const double q = oracle::simpson([](double z) { return 1.0 / (z * z); }, 0.5, 1.0);
  EXPECT_NEAR(m.tail(Side::positive, 0.5), q, 1e-11);
}

TEST(Tail, ZeroAtAndBeyondSupport) {
  TruncatedStableModel m(1.0);
  EXPECT_EQ(m.tail(Side::positive, 1.0), 0.0);
  EXPECT_EQ(m.tail(Side::negative, 3.0), 0.0);
}

TEST(Tail, StableAlphaHalfNegativeSide) {
  TruncatedStableModel m(0.5);
  EXPECT_NEAR(m.tail(Side::negative, 0.25), 2.0, 1e-14);
  const double q = oracle::simpson_log([](double z) { return std::pow(z, -1.5); }, 0.25, 1.0);
  EXPECT_NEAR(m.tail(Side::negative, 0.25), q, 1e-10);
}

TEST(Tail, RejectsNonpositiveRadius) {
  TruncatedStableModel m(1.0);
  EXPECT_THROW(m.tail(Side::positive, 0.0), domain_error);
  EXPECT_THROW(m.tail(Side::positive, -1.0), domain_error);
}

TEST(Tail, NonincreasingOnLogGrid) {
  for (double alpha : {0.3, 1.0, 1.7}) {
    TruncatedStableModel m(alpha);
    double prev = INFINITY;
    for (int i = 0; i <= 200; ++i) {
      const double n = m.tail(Side::positive, std::pow(10.0, -8.0 + 0.04 * i));
      EXPECT_LE(n, prev);
      prev = n;
    }
  }
}

TEST(Tau, ClosedFormValues) {
  EXPECT_NEAR(TruncatedStableModel(1.0).tau(Side::positive, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(TruncatedStableModel(0.5).tau(Side::positive, 1.0), 4.0 / 9.0, 1e-15);
}

TEST(Tau, AgreesWithBisectionOracle) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    TruncatedStableModel m(alpha);
    for (double t : {1e-3, 0.1, 1.0, 7.0, 1e3}) {
      const double r = oracle::bisect([&](double x) { return 1.0 / t - (std::pow(x, -alpha) - 1.0) / alpha; },
                                      1e-300, 1.0);
      EXPECT_NEAR(m.tau(Side::positive, t), r, 1e-12 * r) << "alpha=" << alpha << " t=" << t;
    }
  }
}

TEST(Tau, InverseConsistency) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    TruncatedStableModel m(alpha);
    double prev = 0.0;
    for (int i = 0; i <= 90; ++i) {
      const double t = std::pow(10.0, -3.0 + 0.1 * i);
      const double r = m.tau(Side::positive, t);
      EXPECT_NEAR(m.tail(Side::positive, r) * t, 1.0, 1e-10);
      EXPECT_GE(r, prev);
      prev = r;
    }
  }
}

TEST(Tau, ApproachesSupportEdge) {
  TruncatedStableModel m(1.2);
  EXPECT_NEAR(m.tau(Side::positive, 1e12), 1.0, 1e-11);
  EXPECT_LT(m.tau(Side::positive, 1e12), 1.0);
}

TEST(Tau, RejectsNonpositiveLevel) {
  TruncatedStableModel m(1.0);
  EXPECT_THROW(m.tau(Side::positive, 0.0), domain_error);
}

TEST(Tau, ScalingWithInverseAlpha) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    TruncatedStableModel m(alpha);
    for (int i = 0; i <= 40; ++i) {
      const double t = std::pow(10.0, -4.0 + 0.2 * i);
      for (double R : {1.01, 2.0, 10.0, 1e4})
        EXPECT_LE(m.tau(Side::positive, R * t), std::pow(R, 1.0 / alpha) * m.tau(Side::positive, t) * (1 + 1e-14));
    }
  }
}

TEST(TruncatedMoment, ClosedFormMatchesQuadrature) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    TruncatedStableModel m(alpha);
    for (double r : {0.01, 0.3, 1.0}) {
      const double q = oracle::simpson_from_zero([&](double z) { return z * z * stable_density(alpha, z); }, r);
      EXPECT_NEAR(m.truncated_moment(Side::positive, 2.0, r), q, 1e-9 * q);
      EXPECT_NEAR(m.truncated_abs_moment(2.0, r), 2.0 * std::pow(r, 2.0 - alpha) / (2.0 - alpha), 1e-14);
    }
  }
}

TEST(TruncatedMoment, NondecreasingInRadius) {
  TruncatedStableModel m(1.3);
  double prev = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double v = m.truncated_abs_moment(2.0, 0.02 * i + 1e-9);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_EQ(m.truncated_abs_moment(2.0, 5.0), m.truncated_abs_moment(2.0, 1.0));
}

TEST(TruncatedMoment, DivergentOrderThrows) {
  TruncatedStableModel m(1.5);
  EXPECT_THROW(m.truncated_moment(Side::positive, 1.0, 0.5), integrability_error);
}

TEST(UpperMoment, LogarithmicCase) {
  TruncatedStableModel m(1.0);
  EXPECT_NEAR(m.upper_moment(Side::positive, 1.0, 0.1), std::log(10.0), 1e-14);
}

TEST(Pruitt, StableAlphaOneValues) {
  TruncatedStableModel m(1.0);
  EXPECT_NEAR(pruitt_psi(m, Side::positive, 2.0), 2.0, 1e-14);
  EXPECT_NEAR(pruitt_psi(m, Side::positive, 1.0), 1.0, 1e-14);
}

TEST(Pruitt, RatioBoundedAwayFromZeroAndInfinity) {
  std::vector<double> radii;
  for (int i = 0; i <= 70; ++i) radii.push_back(std::pow(10.0, -8.0 + 0.1 * i));
  for (double alpha : {0.5, 1.0, 1.5}) {
    const RatioBand b = check_tail_pruitt_equivalence(TruncatedStableModel(alpha), radii);
    EXPECT_GT(b.min_ratio, 0.1);
    EXPECT_LT(b.max_ratio, 10.0);
    // Near the origin N(r) / psi(1/r) -> (2 - alpha) / alpha on each side.
    EXPECT_NEAR(b.max_ratio, (2.0 - alpha) / alpha, 1e-3);
  }
}

TEST(Pruitt, RejectsBadGrid) {
  TruncatedStableModel m(1.0);
  EXPECT_THROW(check_tail_pruitt_equivalence(m, std::vector<double>{}), domain_error);
  EXPECT_THROW(check_tail_pruitt_equivalence(m, std::vector<double>{2.0}), domain_error);
}

TEST(NumericModel, FallbacksMatchClosedForms) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const auto num = numeric_stable(alpha);
    TruncatedStableModel exact(alpha);
    EXPECT_FALSE(num.has_closed_forms());
    for (double r : {1e-4, 0.01, 0.5, 0.99}) {
      const double n = exact.tail(Side::positive, r);
      EXPECT_NEAR(num.tail(Side::negative, r), n, 1e-9 * n);
      EXPECT_NEAR(num.truncated_moment(Side::positive, 2.0, r), exact.truncated_moment(Side::positive, 2.0, r),
                  1e-8 * exact.truncated_moment(Side::positive, 2.0, r));
    }
    for (double t : {0.01, 1.0, 100.0}) {
      const double r = exact.tau(Side::positive, t);
      EXPECT_NEAR(num.tau(Side::positive, t), r, 1e-9 * r);
    }
  }
}

TEST(NumericModel, OneSidedMeasure) {
  auto d = [](double z) { return (z > 0.0 && z <= 1.0) ? std::pow(z, -1.5) : 0.0; };
  DensityLevyModel m("one-sided", {d, 1.0}, {}, 0.5);
  EXPECT_TRUE(m.has_side(Side::positive));
  EXPECT_FALSE(m.has_side(Side::negative));
  EXPECT_EQ(m.tail(Side::negative, 0.1), 0.0);
  EXPECT_NEAR(m.tail(Side::positive, 0.25), 2.0, 1e-9);
  EXPECT_NEAR(m.tail(0.25), 2.0, 1e-9);
}

TEST(RestrictedIntegral, SignedIntegrandAndMoments) {
  TruncatedStableModel m(1.0);
  const double second = m.restricted_integral(Side::positive, [](double z) { return z * z; }, 0.0, 0.3, 1e-12);
  EXPECT_NEAR(second, m.truncated_moment(Side::positive, 2.0, 0.3), 1e-10);
  const double neg_first = m.restricted_integral(Side::negative, [](double z) { return z; }, 0.1, 1.0, 1e-12);
  EXPECT_NEAR(neg_first, -std::log(10.0), 1e-10);
  const double odd = m.restricted_integral([](double z) { return z * z * z; }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(odd, 0.0, 1e-12);
}
