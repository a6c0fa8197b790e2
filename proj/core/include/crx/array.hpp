#pragma once

#include "crx/types.hpp"

namespace crx::array {

/// Geometry of a linear movable-antenna array. Lengths in meters.
struct ArrayConfig {
  int n_elements = 16;
  double wavelength = kSpeedOfLight / 30e9;
  double p_min = 0.0;
  double p_max = 0.15;
  double d0 = kSpeedOfLight / 30e9 / 2.0;  // minimum element spacing

  /// Throws ConfigError unless the region can host n_elements at spacing d0.
  void validate() const;

  /// Total slack beyond the minimum-spacing footprint:
  /// p_max - p_min - (n_elements - 1) * d0.
  double max_displacement() const;

  /// Half-wavelength-default config for a carrier frequency in Hz.
  static ArrayConfig for_carrier(int n_elements, double carrier_hz,
                                 double p_min, double p_max);
};

/// Element coordinates along the array axis, strictly increasing with
/// spacing at least d0 and contained in [p_min, p_max].
class AntennaPositions {
 public:
  AntennaPositions() = default;

  /// Validates both geometric invariants against cfg. Throws
  /// ConstraintViolation naming the first offending element.
  static AntennaPositions checked(VectorXd p, const ArrayConfig& cfg);

  /// Uniform array anchored at cfg.p_min with spacing cfg.d0.
  static AntennaPositions uniform(const ArrayConfig& cfg);

  /// Skips validation; for internal callers that construct feasible
  /// geometry by construction and for tests of downstream error paths.
  static AntennaPositions unchecked(VectorXd p) { return AntennaPositions(std::move(p)); }

  const VectorXd& values() const { return p_; }
  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int n) const { return p_[n]; }

  /// Largest violation of the spacing and region constraints (0 if feasible).
  double constraint_violation(const ArrayConfig& cfg) const;

  bool operator==(const AntennaPositions& other) const = default;

 private:
  explicit AntennaPositions(VectorXd p) : p_(std::move(p)) {}
  VectorXd p_;
};

/// Nonnegative gaps beyond the minimum spacing.
class DisplacementVector {
 public:
  DisplacementVector() = default;
  explicit DisplacementVector(VectorXd delta) : delta_(std::move(delta)) {}

  const VectorXd& values() const { return delta_; }
  int size() const { return static_cast<int>(delta_.size()); }

 private:
  VectorXd delta_;
};

/// p_n = p_min + (n-1) d0 + sum_{k<=n} delta_k.
///
/// The budget sum(delta) <= max_displacement() is exactly equivalent to the
/// spacing and region constraints on the result. Throws ConstraintViolation
/// for a negative component or an exceeded budget.
AntennaPositions displacements_to_positions(const DisplacementVector& delta,
                                            const ArrayConfig& cfg);

/// Far-field response (1/sqrt(N)) exp(j 2pi/lambda p_n cos(theta)).
VectorXcd steering_vector(const AntennaPositions& p, double theta, double wavelength);

/// d/dtheta of steering_vector: -j (2pi/lambda) sin(theta) p_n a_n.
VectorXcd steering_derivative(const AntennaPositions& p, double theta, double wavelength);

}  // namespace crx::array
