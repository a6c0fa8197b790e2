#pragma once

// Reference computations used only by tests and the verify command. Each one
// rebuilds its quantity from first principles instead of calling the
// routine it checks.

#include <functional>

#include "crx/channel.hpp"
#include "crx/metrics.hpp"
#include "crx/nn.hpp"
#include "crx/types.hpp"

namespace crx::oracles {

/// Steering vector written out element by element.
VectorXcd steering(const VectorXd& p, double theta, double wavelength);

/// Central finite difference of a complex-vector valued function of theta.
VectorXcd central_difference(const std::function<VectorXcd(double)>& f, double theta,
                             double h);

/// ||a - b|| / ||b||.
double relative_error(const VectorXcd& a, const VectorXcd& b);
double relative_error(const VectorXd& a, const VectorXd& b);

/// Orthogonal pilot block S ((K+N) x L) with S S^H = L I; needs L >= K+N.
MatrixXcd dft_pilots(int rows, int length);

/// Inputs of the sensing observation model y = conj(alpha) S^H F^H C^H a(theta) + noise.
struct SensingModel {
  VectorXd positions;
  MatrixXcd C;
  MatrixXcd F;
  MatrixXcd S;
  double wavelength = 0.0;
  double sigma2 = 1.0;
};

/// Noise-free mean of the sensing observation at (theta, alpha).
VectorXcd sensing_mean(const SensingModel& m, double theta, cd alpha);

/// Negative Hessian of the circular Gaussian log-likelihood in
/// (theta, Re alpha, Im alpha), by central differences at noise-free data.
Eigen::Matrix3d likelihood_fim(const SensingModel& m, double theta, cd alpha);

/// Largest entrywise relative error of `a` against reference `b`; the
/// denominator of entry (i, j) is floored at floor * sqrt(|b_ii b_jj|) so
/// structurally tiny cross terms are compared on the scale of the matrix.
double fim_relative_error(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b, double floor);

/// SINR of user k from simulated received samples y_t = h^H C F_c s_t + n_t,
/// estimated as mean |desired|^2 / mean |y - desired|^2.
double simulated_sinr(const VectorXcd& h, const MatrixXcd& C, const MatrixXcd& Fc, int k,
                      double sigma2, int n_symbols, Rng& rng);

/// Finite-difference gradients of L = sum(weights .* net(x)) with respect to
/// parameters and inputs.
struct NetworkGradients {
  VectorXd params;
  MatrixXd inputs;
};
NetworkGradients network_fd_gradients(const nn::DenseNetwork& net, const MatrixXd& x,
                                      const MatrixXd& weights, double h);

}  // namespace crx::oracles
