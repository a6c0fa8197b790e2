#include <gtest/gtest.h>

#include "crx/array.hpp"
#include "crx/errors.hpp"
#include "crx/oracles.hpp"

namespace crx::array {
namespace {

ArrayConfig small_config() {
  ArrayConfig c;
  c.n_elements = 4;
  c.wavelength = 0.01;
  c.d0 = 0.005;
  c.p_min = 0.0;
  c.p_max = 0.05;
  return c;
}

VectorXd random_feasible_delta(const ArrayConfig& cfg, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  VectorXd parts(cfg.n_elements + 1);
  for (auto& v : parts) v = e(rng);
  return parts.head(cfg.n_elements) / parts.sum() * cfg.max_displacement();
}

TEST(ArrayConfig, RejectsRegionTooSmall) {
  ArrayConfig c = small_config();
  c.p_max = 0.014;  // needs 0.015
  EXPECT_THROW(c.validate(), ConfigError);
  c.p_max = 0.015;
  EXPECT_NO_THROW(c.validate());
  EXPECT_DOUBLE_EQ(c.max_displacement(), 0.0);
}

TEST(ArrayConfig, RejectsNonpositiveScales) {
  ArrayConfig c = small_config();
  c.wavelength = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.d0 = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ArrayConfig, CarrierDefaultsToHalfWavelength) {
  ArrayConfig c = ArrayConfig::for_carrier(16, 30e9, 0.0, 0.15);
  EXPECT_NEAR(c.wavelength, kSpeedOfLight / 30e9, 1e-15);
  EXPECT_NEAR(c.d0, c.wavelength / 2.0, 1e-15);
}

TEST(Displacements, ZeroGivesMinimumSpacingArray) {
  ArrayConfig c = small_config();
  AntennaPositions p = displacements_to_positions(DisplacementVector(VectorXd::Zero(4)), c);
  ASSERT_EQ(p.size(), 4);
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_DOUBLE_EQ(p[1], 0.005);
  EXPECT_DOUBLE_EQ(p[2], 0.010);
  EXPECT_DOUBLE_EQ(p[3], 0.015);
}

TEST(Displacements, FullBudgetOnFirstSaturatesUpperBound) {
  ArrayConfig c = small_config();
  VectorXd d = VectorXd::Zero(4);
  d[0] = c.max_displacement();
  AntennaPositions p = displacements_to_positions(DisplacementVector(d), c);
  EXPECT_DOUBLE_EQ(p[0], c.p_min + c.max_displacement());
  EXPECT_DOUBLE_EQ(p[1], p[0] + c.d0);
  EXPECT_DOUBLE_EQ(p[3], c.p_max);
}

TEST(Displacements, NegativeComponentIsNamed) {
  ArrayConfig c = small_config();
  VectorXd d = VectorXd::Zero(4);
  d[2] = -1e-6;
  try {
    displacements_to_positions(DisplacementVector(d), c);
    FAIL() << "expected ConstraintViolation";
  } catch (const ConstraintViolation& e) {
    EXPECT_NE(std::string(e.what()).find("component 2"), std::string::npos) << e.what();
  }
}

TEST(Displacements, BudgetOverrunThrows) {
  ArrayConfig c = small_config();
  VectorXd d = VectorXd::Constant(4, c.max_displacement() / 3.0);
  EXPECT_THROW(displacements_to_positions(DisplacementVector(d), c), ConstraintViolation);
  EXPECT_THROW(displacements_to_positions(DisplacementVector(VectorXd::Zero(3)), c),
               ConstraintViolation);
}

TEST(Displacements, RandomDrawsSatisfyConstraints) {
  ArrayConfig c;
  c.n_elements = 16;
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    AntennaPositions p =
        displacements_to_positions(DisplacementVector(random_feasible_delta(c, rng)), c);
    const VectorXd& v = p.values();
    for (int m = 0; m < 16; ++m) {
      ASSERT_GE(v[m], c.p_min - 1e-15);
      ASSERT_LE(v[m], c.p_max + 1e-15);
      for (int n = 0; n < m; ++n) ASSERT_GE(std::abs(v[m] - v[n]), c.d0 - 1e-15);
    }
    ASSERT_LE(p.constraint_violation(c), 1e-15);
  }
}

TEST(Displacements, MonotoneInEachComponent) {
  ArrayConfig c;
  c.n_elements = 8;
  Rng rng(3);
  VectorXd d = random_feasible_delta(c, rng) * 0.5;
  AntennaPositions base = displacements_to_positions(DisplacementVector(d), c);
  for (int k = 0; k < 8; ++k) {
    VectorXd bumped = d;
    bumped[k] += 0.1 * c.max_displacement();
    AntennaPositions p = displacements_to_positions(DisplacementVector(bumped), c);
    for (int n = 0; n < 8; ++n) {
      if (n >= k) EXPECT_GT(p[n], base[n]);
      else EXPECT_EQ(p[n], base[n]);
    }
  }
}

TEST(Positions, CheckedReportsOffendingElement) {
  ArrayConfig c = small_config();
  VectorXd v(4);
  v << 0.0, 0.005, 0.007, 0.02;
  try {
    AntennaPositions::checked(v, c);
    FAIL() << "expected ConstraintViolation";
  } catch (const ConstraintViolation& e) {
    EXPECT_NE(std::string(e.what()).find("elements 1 and 2"), std::string::npos) << e.what();
  }
  v << 0.0, 0.005, 0.010, 0.06;
  EXPECT_THROW(AntennaPositions::checked(v, c), ConstraintViolation);
  v << 0.0, 0.005, 0.010, 0.05;
  EXPECT_NO_THROW(AntennaPositions::checked(v, c));
}

TEST(Steering, BroadsideIsFlat) {
  AntennaPositions p = AntennaPositions::uniform(small_config());
  VectorXcd a = steering_vector(p, kPi / 2.0, 0.01);
  for (int n = 0; n < 4; ++n) {
    EXPECT_NEAR(a[n].real(), 0.5, 1e-15);
    EXPECT_NEAR(a[n].imag(), 0.0, 1e-15);
  }
}

TEST(Steering, EndfireHalfWavelengthAlternates) {
  const double lambda = 0.01;
  VectorXd v(4);
  for (int n = 0; n < 4; ++n) v[n] = n * lambda / 2.0;
  VectorXcd a = steering_vector(AntennaPositions::unchecked(v), 0.0, lambda);
  for (int n = 0; n < 4; ++n) {
    cd expected = std::polar(0.5, kPi * n);
    EXPECT_NEAR(std::abs(a[n] - expected), 0.0, 1e-12);
  }
}

TEST(Steering, UnitNormAndMatchesOracle) {
  ArrayConfig c;
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    AntennaPositions p =
        displacements_to_positions(DisplacementVector(random_feasible_delta(c, rng)), c);
    VectorXcd a = steering_vector(p, deg_to_rad(60.0), c.wavelength);
    EXPECT_NEAR(a.norm(), 1.0, 1e-12);
    for (int n = 0; n < a.size(); ++n) EXPECT_NEAR(std::abs(a[n]), 0.25, 1e-14);
    EXPECT_LT(oracles::relative_error(a, oracles::steering(p.values(), deg_to_rad(60.0),
                                                           c.wavelength)),
              1e-14);
  }
}

TEST(SteeringDerivative, VanishesAtEndfire) {
  AntennaPositions p = AntennaPositions::uniform(small_config());
  EXPECT_LT(steering_derivative(p, 0.0, 0.01).norm(), 1e-15);
  // sin(pi) is ~1.2e-16 in floating point.
  EXPECT_LT(steering_derivative(p, kPi, 0.01).norm(), 1e-12);
}

TEST(SteeringDerivative, MatchesCentralDifference) {
  ArrayConfig c;
  Rng rng(5);
  std::uniform_real_distribution<double> angle(0.05, kPi - 0.05);
  for (int i = 0; i < 100; ++i) {
    AntennaPositions p =
        displacements_to_positions(DisplacementVector(random_feasible_delta(c, rng)), c);
    double th = angle(rng);
    VectorXcd fd = oracles::central_difference(
        [&](double t) { return oracles::steering(p.values(), t, c.wavelength); }, th, 1e-6);
    EXPECT_LT(oracles::relative_error(steering_derivative(p, th, c.wavelength), fd), 1e-5);
  }
}

TEST(SteeringDerivative, ScalingPositionsRotatesEachEntry) {
  ArrayConfig c = small_config();
  VectorXd v(4);
  v << 0.001, 0.004, 0.011, 0.02;
  const double s = 1.7, th = 1.1, k = 2.0 * kPi / c.wavelength;
  VectorXcd d1 = steering_derivative(AntennaPositions::unchecked(v), th, c.wavelength);
  VectorXcd d2 = steering_derivative(AntennaPositions::unchecked(s * v), th, c.wavelength);
  for (int n = 0; n < 4; ++n) {
    cd ratio = s * std::polar(1.0, k * (s - 1.0) * v[n] * std::cos(th));
    EXPECT_NEAR(std::abs(d2[n] - ratio * d1[n]), 0.0, 1e-12 * std::abs(d2[n]));
  }
}

}  // namespace
}  // namespace crx::array
