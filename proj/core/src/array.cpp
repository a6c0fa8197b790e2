#include "crx/array.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crx/errors.hpp"

namespace crx::array {

namespace {

// Absolute slack (meters) when comparing accumulated floating point sums
// against region and spacing bounds.
constexpr double kGeomTol = 1e-12;

}  // namespace

void ArrayConfig::validate() const {
  if (n_elements < 1) throw ConfigError("array: n_elements must be positive");
  if (!(wavelength > 0.0)) throw ConfigError("array: wavelength must be positive");
  if (!(d0 > 0.0)) throw ConfigError("array: d0 must be positive");
  if (!(p_max >= p_min)) throw ConfigError("array: p_max must not be below p_min");
  if (p_max - p_min - static_cast<double>(n_elements - 1) * d0 < -kGeomTol) {
    throw ConfigError("array: region [" + std::to_string(p_min) + ", " + std::to_string(p_max) +
                      "] m cannot host " + std::to_string(n_elements) +
                      " elements at spacing " + std::to_string(d0) + " m");
  }
}

double ArrayConfig::max_displacement() const {
  // Rounding can leave a tiny negative slack when the region is exactly tight.
  return std::max(0.0, p_max - p_min - static_cast<double>(n_elements - 1) * d0);
}

ArrayConfig ArrayConfig::for_carrier(int n_elements, double carrier_hz, double p_min,
                                     double p_max) {
  ArrayConfig cfg;
  cfg.n_elements = n_elements;
  cfg.wavelength = kSpeedOfLight / carrier_hz;
  cfg.d0 = cfg.wavelength / 2.0;
  cfg.p_min = p_min;
  cfg.p_max = p_max;
  return cfg;
}

AntennaPositions AntennaPositions::checked(VectorXd p, const ArrayConfig& cfg) {
  if (p.size() != cfg.n_elements) {
    throw ConstraintViolation("positions: expected " + std::to_string(cfg.n_elements) +
                              " elements, got " + std::to_string(p.size()));
  }
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    if (p[n] < cfg.p_min - kGeomTol || p[n] > cfg.p_max + kGeomTol) {
      throw ConstraintViolation("positions: element " + std::to_string(n) + " at " +
                                std::to_string(p[n]) + " m is outside the movable region");
    }
    if (n > 0 && p[n] - p[n - 1] < cfg.d0 - kGeomTol) {
      throw ConstraintViolation("positions: elements " + std::to_string(n - 1) + " and " +
                                std::to_string(n) + " are closer than d0");
    }
  }
  return AntennaPositions(std::move(p));
}

AntennaPositions AntennaPositions::uniform(const ArrayConfig& cfg) {
  VectorXd p(cfg.n_elements);
  for (int n = 0; n < cfg.n_elements; ++n) p[n] = cfg.p_min + n * cfg.d0;
  return AntennaPositions(std::move(p));
}

double AntennaPositions::constraint_violation(const ArrayConfig& cfg) const {
  double worst = 0.0;
  for (Eigen::Index m = 0; m < p_.size(); ++m) {
    worst = std::max({worst, cfg.p_min - p_[m], p_[m] - cfg.p_max});
    for (Eigen::Index n = m + 1; n < p_.size(); ++n) {
      worst = std::max(worst, cfg.d0 - std::abs(p_[m] - p_[n]));
    }
  }
  return worst;
}

AntennaPositions displacements_to_positions(const DisplacementVector& delta,
                                            const ArrayConfig& cfg) {
  const VectorXd& d = delta.values();
  if (d.size() != cfg.n_elements) {
    throw ConstraintViolation("displacements: expected " + std::to_string(cfg.n_elements) +
                              " components, got " + std::to_string(d.size()));
  }
  double budget = cfg.max_displacement();
  double total = 0.0;
  for (Eigen::Index n = 0; n < d.size(); ++n) {
    if (!(d[n] >= 0.0)) {
      throw ConstraintViolation("displacements: component " + std::to_string(n) +
                                " is negative (" + std::to_string(d[n]) + ")");
    }
    total += d[n];
    if (total > budget + kGeomTol) {
      throw ConstraintViolation("displacements: cumulative sum exceeds the budget " +
                                std::to_string(budget) + " m at component " +
                                std::to_string(n));
    }
  }

  VectorXd p(d.size());
  double acc = 0.0;
  for (Eigen::Index n = 0; n < d.size(); ++n) {
    acc += d[n];
    p[n] = cfg.p_min + static_cast<double>(n) * cfg.d0 + acc;
  }
  // Saturated budgets can overshoot p_max by an ulp.
  if (d.size() > 0) p[d.size() - 1] = std::min(p[d.size() - 1], cfg.p_max);
  return AntennaPositions::unchecked(std::move(p));
}

VectorXcd steering_vector(const AntennaPositions& p, double theta, double wavelength) {
  const double k = 2.0 * kPi / wavelength * std::cos(theta);
  const double amp = 1.0 / std::sqrt(static_cast<double>(p.size()));
  VectorXcd a(p.size());
  for (int n = 0; n < p.size(); ++n) a[n] = std::polar(amp, k * p[n]);
  return a;
}

VectorXcd steering_derivative(const AntennaPositions& p, double theta, double wavelength) {
  const double scale = 2.0 * kPi / wavelength * std::sin(theta);
  VectorXcd a = steering_vector(p, theta, wavelength);
  for (int n = 0; n < p.size(); ++n) a[n] *= cd(0.0, -scale * p[n]);
  return a;
}

}  // namespace crx::array
