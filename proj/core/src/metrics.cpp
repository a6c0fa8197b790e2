#include "crx/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "crx/errors.hpp"

namespace crx::metrics {

namespace {

constexpr double kDenominatorFloor = 1e-300;
constexpr double kPowerTol = 1e-9;

}  // namespace

void Precoder::validate() const {
  if (n_users < 0 || n_users > F.cols()) {
    throw ConfigError("precoder: user count inconsistent with column count");
  }
  double power = transmit_power();
  if (power > p_sum + kPowerTol) {
    throw ConstraintViolation("precoder: transmit power " + std::to_string(power) +
                              " W exceeds budget " + std::to_string(p_sum) + " W");
  }
}

double sinr(const VectorXcd& h, const MatrixXcd& C, const MatrixXcd& Fc, int k, double sigma2) {
  // h^H C F_c as a row vector of per-stream amplitudes.
  Eigen::RowVectorXcd amp = h.adjoint() * C * Fc;
  double signal = std::norm(amp[k]);
  double interference = amp.squaredNorm() - signal;
  return signal / (std::max(interference, 0.0) + sigma2);
}

double monte_carlo_sinr(const VectorXcd& h, const MatrixXcd& C, const MatrixXcd& Fc, int k,
                        double sigma2, int n_symbols, Rng& rng) {
  const Eigen::Index n_streams = Fc.cols();
  std::normal_distribution<double> unit(0.0, std::sqrt(0.5));
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2 / 2.0));

  // Per-symbol received sample: y = h^H x + n with x = C F_c s.
  double signal_power = 0.0;
  double rest_power = 0.0;
  VectorXcd s(n_streams);
  for (int t = 0; t < n_symbols; ++t) {
    for (Eigen::Index j = 0; j < n_streams; ++j) s[j] = cd(unit(rng), unit(rng));
    VectorXcd desired_tx = C * (Fc.col(k) * s[k]);
    VectorXcd total_tx = C * (Fc * s);
    cd desired = h.dot(desired_tx);  // h^H x
    cd y = h.dot(total_tx) + cd(noise(rng), noise(rng));
    cd rest = y - desired;
    signal_power += std::norm(desired);
    rest_power += std::norm(rest);
  }
  return signal_power / rest_power;
}

BeamGains BeamGains::compute(const VectorXcd& g, const VectorXcd& g_dot, const MatrixXcd& F) {
  VectorXcd u = F.adjoint() * g;
  VectorXcd v = F.adjoint() * g_dot;
  BeamGains b;
  b.gg = u.squaredNorm();
  b.dd = v.squaredNorm();
  b.dg = u.dot(v);  // u^H v = g^H F F^H g_dot; conj gives g_dot^H F F^H g
  b.dg = std::conj(b.dg);
  if (b.gg > 0.0) b.core = (v - (u.dot(v) / b.gg) * u).squaredNorm();
  return b;
}

FisherMatrix fisher_matrix(const VectorXcd& g, const VectorXcd& g_dot, const Precoder& F,
                           cd alpha_s, double sigma2_n, int n_samples) {
  BeamGains b = BeamGains::compute(g, g_dot, F.F);
  const double scale = 2.0 * n_samples / sigma2_n;
  // d(mean)/d(Re alpha) = x and d(mean)/d(Im alpha) = -j x for mean = conj(alpha) x.
  cd z = alpha_s * b.dg;
  FisherMatrix out;
  out.M.setZero();
  out.M(0, 0) = scale * std::norm(alpha_s) * b.dd;
  out.M(0, 1) = scale * z.real();
  out.M(0, 2) = scale * (z * cd(0.0, -1.0)).real();
  out.M(1, 0) = out.M(0, 1);
  out.M(2, 0) = out.M(0, 2);
  out.M(1, 1) = scale * b.gg;
  out.M(2, 2) = scale * b.gg;
  return out;
}

double crb_theta(const BeamGains& b, cd alpha_s, double sigma2_n, int n_samples) {
  if (!(b.gg > kDenominatorFloor)) {
    throw UnobservableError("crb: no transmit energy toward the target (g^H F F^H g = 0)");
  }
  double denom = 2.0 * n_samples * std::norm(alpha_s) * b.core;
  if (!(denom > kDenominatorFloor)) {
    throw UnobservableError("crb: target angle unobservable (Schur complement " +
                            std::to_string(b.core) + ")");
  }
  return sigma2_n / denom;
}

double crb_theta(const VectorXcd& g, const VectorXcd& g_dot, const Precoder& F, cd alpha_s,
                 double sigma2_n, int n_samples) {
  return crb_theta(BeamGains::compute(g, g_dot, F.F), alpha_s, sigma2_n, n_samples);
}

double crb_db(double crb) {
  if (!(crb > 0.0)) throw std::domain_error("crb_db: CRB must be positive");
  return 10.0 * std::log10(crb);
}

}  // namespace crx::metrics
