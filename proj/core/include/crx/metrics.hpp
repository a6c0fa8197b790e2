#pragma once

#include "crx/channel.hpp"
#include "crx/types.hpp"

namespace crx::metrics {

/// Joint precoder F = [F_c | F_s] (N x (K + N)) with its power budget.
struct Precoder {
  MatrixXcd F;
  double p_sum = 0.01;
  int n_users = 0;

  int n_elements() const { return static_cast<int>(F.rows()); }
  auto fc() const { return F.leftCols(n_users); }
  auto fs() const { return F.rightCols(F.cols() - n_users); }
  double transmit_power() const { return F.squaredNorm(); }

  /// Throws ConstraintViolation when trace(F F^H) exceeds p_sum + 1e-9.
  void validate() const;
};

/// Closed-form SINR of user k:
/// |h^H C f_k|^2 / (sum_{j != k} |h^H C f_j|^2 + sigma2).
double sinr(const VectorXcd& h, const MatrixXcd& C, const MatrixXcd& Fc, int k, double sigma2);

/// Monte-Carlo SINR from simulated per-symbol received samples with unit
/// power circular Gaussian streams. Independent of sinr() by construction.
double monte_carlo_sinr(const VectorXcd& h, const MatrixXcd& C, const MatrixXcd& Fc, int k,
                        double sigma2, int n_symbols, Rng& rng);

/// Fisher information over (theta_s, Re alpha_s, Im alpha_s).
struct FisherMatrix {
  Eigen::Matrix3d M;
};

/// Projections of the effective channel and its derivative through F F^H.
struct BeamGains {
  double gg = 0.0;   // g^H F F^H g
  double dd = 0.0;   // g_dot^H F F^H g_dot
  cd dg{0.0, 0.0};   // g_dot^H F F^H g
  double core = 0.0; // dd - |dg|^2 / gg, as a projection residual

  static BeamGains compute(const VectorXcd& g, const VectorXcd& g_dot, const MatrixXcd& F);

  /// dd - |dg|^2 / gg, the Schur-complement core of the CRB denominator.
  /// Evaluated as the squared norm of F^H g_dot after projecting out F^H g,
  /// so it stays nonnegative when F is close to rank one.
  double schur_core() const { return core; }
};

FisherMatrix fisher_matrix(const VectorXcd& g, const VectorXcd& g_dot, const Precoder& F,
                           cd alpha_s, double sigma2_n, int n_samples);

/// CRB of the target angle. Throws UnobservableError when g^H F F^H g or the
/// Schur-complement denominator is at or below 1e-300.
double crb_theta(const VectorXcd& g, const VectorXcd& g_dot, const Precoder& F, cd alpha_s,
                 double sigma2_n, int n_samples);

/// Same as crb_theta from precomputed beam gains.
double crb_theta(const BeamGains& gains, cd alpha_s, double sigma2_n, int n_samples);

/// 10 log10(crb); throws std::domain_error for nonpositive input.
double crb_db(double crb);

}  // namespace crx::metrics
