#include "crx/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "crx/errors.hpp"

namespace crx::oracles {

VectorXcd steering(const VectorXd& p, double theta, double wavelength) {
  const Eigen::Index n = p.size();
  VectorXcd a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double phase = 2.0 * kPi / wavelength * p[i] * std::cos(theta);
    a[i] = cd(std::cos(phase), std::sin(phase)) / std::sqrt(static_cast<double>(n));
  }
  return a;
}

VectorXcd central_difference(const std::function<VectorXcd(double)>& f, double theta,
                             double h) {
  return (f(theta + h) - f(theta - h)) / (2.0 * h);
}

double relative_error(const VectorXcd& a, const VectorXcd& b) {
  return (a - b).norm() / b.norm();
}

double relative_error(const VectorXd& a, const VectorXd& b) { return (a - b).norm() / b.norm(); }

MatrixXcd dft_pilots(int rows, int length) {
  if (length < rows) throw ConfigError("pilots: need length >= rows for orthogonality");
  MatrixXcd S(rows, length);
  for (int i = 0; i < rows; ++i)
    for (int l = 0; l < length; ++l)
      S(i, l) = std::polar(1.0, -2.0 * kPi * i * l / length);
  return S;
}

VectorXcd sensing_mean(const SensingModel& m, double theta, cd alpha) {
  VectorXcd g = m.C.adjoint() * steering(m.positions, theta, m.wavelength);
  return std::conj(alpha) * (m.S.adjoint() * (m.F.adjoint() * g));
}

Eigen::Matrix3d likelihood_fim(const SensingModel& m, double theta, cd alpha) {
  const VectorXcd mu0 = sensing_mean(m, theta, alpha);
  // Negative log-likelihood (up to a constant) at the noise-free observation.
  auto nll = [&](const Eigen::Vector3d& psi) {
    VectorXcd mu = sensing_mean(m, psi[0], cd(psi[1], psi[2]));
    return (mu - mu0).squaredNorm() / m.sigma2;
  };
  const Eigen::Vector3d psi0(theta, alpha.real(), alpha.imag());
  const double a_scale = std::max(std::abs(alpha), 1e-3);
  const Eigen::Vector3d h(1e-5, 1e-5 * a_scale, 1e-5 * a_scale);

  Eigen::Matrix3d H;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d ei = Eigen::Vector3d::Unit(i) * h[i];
    H(i, i) = (nll(psi0 + ei) + nll(psi0 - ei)) / (h[i] * h[i]);
    for (int j = 0; j < i; ++j) {
      Eigen::Vector3d ej = Eigen::Vector3d::Unit(j) * h[j];
      H(i, j) = (nll(psi0 + ei + ej) - nll(psi0 + ei - ej) - nll(psi0 - ei + ej) +
                 nll(psi0 - ei - ej)) /
                (4.0 * h[i] * h[j]);
      H(j, i) = H(i, j);
    }
  }
  return H;
}

double fim_relative_error(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b, double floor) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double scale = std::max(std::abs(b(i, j)), floor * std::sqrt(std::abs(b(i, i) * b(j, j))));
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / scale);
    }
  }
  return worst;
}

double simulated_sinr(const VectorXcd& h, const MatrixXcd& C, const MatrixXcd& Fc, int k,
                      double sigma2, int n_symbols, Rng& rng) {
  std::normal_distribution<double> unit(0.0, std::sqrt(0.5));
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2 / 2.0));
  // Effective per-stream gains: row vector h^H C F_c.
  const Eigen::RowVectorXcd w = h.adjoint() * C * Fc;
  double desired = 0.0;
  double rest = 0.0;
  for (int t = 0; t < n_symbols; ++t) {
    cd y(noise(rng), noise(rng));
    cd d;
    for (Eigen::Index j = 0; j < Fc.cols(); ++j) {
      cd term = w[j] * cd(unit(rng), unit(rng));
      if (j == k) d = term;
      y += term;
    }
    desired += std::norm(d);
    rest += std::norm(y - d);
  }
  return desired / rest;
}

NetworkGradients network_fd_gradients(const nn::DenseNetwork& net, const MatrixXd& x,
                                      const MatrixXd& weights, double h) {
  auto loss = [&](const nn::DenseNetwork& n, const MatrixXd& in) {
    return n.forward(in).cwiseProduct(weights).sum();
  };
  NetworkGradients g;
  nn::DenseNetwork probe = net;
  g.params.resize(net.parameter_count());
  for (Eigen::Index i = 0; i < net.parameter_count(); ++i) {
    const double saved = probe.parameters()[i];
    probe.parameters()[i] = saved + h;
    double up = loss(probe, x);
    probe.parameters()[i] = saved - h;
    double down = loss(probe, x);
    probe.parameters()[i] = saved;
    g.params[i] = (up - down) / (2.0 * h);
  }
  g.inputs.resize(x.rows(), x.cols());
  MatrixXd xp = x;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double saved = xp(r, c);
      xp(r, c) = saved + h;
      double up = loss(net, xp);
      xp(r, c) = saved - h;
      double down = loss(net, xp);
      xp(r, c) = saved;
      g.inputs(r, c) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace crx::oracles
