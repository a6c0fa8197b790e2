#include "crx/nn.hpp"

#include <cmath>

#include "crx/errors.hpp"

namespace crx::nn {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
    case Activation::GatedSoftmax: return "gated_softmax";
  }
  return "unknown";
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Max-shifted softmax of one column block, written into out.
template <typename In, typename Out>
void softmax_block(const In& z, Out&& out) {
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    double shift = z.col(c).maxCoeff();
    out.col(c) = (z.col(c).array() - shift).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
}

}  // namespace

MatrixXd activate(const std::vector<Segment>& segments, const MatrixXd& pre) {
  MatrixXd post(pre.rows(), pre.cols());
  for (const auto& s : segments) {
    auto z = pre.middleRows(s.offset, s.length);
    auto out = post.middleRows(s.offset, s.length);
    switch (s.activation) {
      case Activation::Identity: out = z; break;
      case Activation::Relu: out = z.cwiseMax(0.0); break;
      case Activation::Tanh: out = z.array().tanh().matrix(); break;
      case Activation::Sigmoid: out = z.unaryExpr([](double v) { return sigmoid(v); }); break;
      case Activation::Softmax: softmax_block(z, out); break;
      case Activation::GatedSoftmax: {
        softmax_block(z, out);
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
          double gate = z.col(c).unaryExpr([](double v) { return sigmoid(v); }).mean();
          out.col(c) *= gate;
        }
        break;
      }
    }
  }
  return post;
}

MatrixXd activate_backward(const std::vector<Segment>& segments, const MatrixXd& pre,
                           const MatrixXd& post, const MatrixXd& upstream) {
  MatrixXd grad(pre.rows(), pre.cols());
  for (const auto& s : segments) {
    auto z = pre.middleRows(s.offset, s.length);
    auto a = post.middleRows(s.offset, s.length);
    auto u = upstream.middleRows(s.offset, s.length);
    auto g = grad.middleRows(s.offset, s.length);
    switch (s.activation) {
      case Activation::Identity: g = u; break;
      case Activation::Relu:
        g = (z.array() > 0.0).select(u, 0.0);
        break;
      case Activation::Tanh: g = (u.array() * (1.0 - a.array().square())).matrix(); break;
      case Activation::Sigmoid: g = (u.array() * a.array() * (1.0 - a.array())).matrix(); break;
      case Activation::Softmax:
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
          double dot = a.col(c).dot(u.col(c));
          g.col(c) = (a.col(c).array() * (u.col(c).array() - dot)).matrix();
        }
        break;
      case Activation::GatedSoftmax:
        // f = m s with m = mean(sigmoid(z)), s = softmax(z).
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
          Eigen::ArrayXd sig = z.col(c).unaryExpr([](double v) { return sigmoid(v); }).array();
          double m = sig.mean();
          VectorXd soft_col(s.length);
          softmax_block(z.col(c), soft_col);
          Eigen::ArrayXd soft = soft_col.array();
          double su = (soft * u.col(c).array()).sum();
          g.col(c) = (sig * (1.0 - sig) / static_cast<double>(s.length) * su +
                      m * soft * (u.col(c).array() - su))
                         .matrix();
        }
        break;
    }
  }
  return grad;
}

DenseNetwork::DenseNetwork(std::vector<LayerShape> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ConfigError("network: at least one layer required");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    if (L.in < 1 || L.out < 1) throw ConfigError("network: layer dimensions must be positive");
    if (l > 0 && layers_[l - 1].out != L.in) {
      throw ConfigError("network: layer " + std::to_string(l) + " expects " +
                        std::to_string(L.in) + " inputs but previous layer emits " +
                        std::to_string(layers_[l - 1].out));
    }
    int cursor = 0;
    for (const auto& s : L.segments) {
      if (s.offset != cursor || s.length < 1) {
        throw ConfigError("network: segments of layer " + std::to_string(l) +
                          " must tile its outputs in order");
      }
      cursor += s.length;
    }
    if (cursor != L.out) {
      throw ConfigError("network: segments of layer " + std::to_string(l) + " cover " +
                        std::to_string(cursor) + " of " + std::to_string(L.out) + " outputs");
    }
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(L.out) * L.in + L.out;
  }
  params_ = VectorXd::Zero(total);
}

DenseNetwork DenseNetwork::mlp(int input_dim, const std::vector<int>& hidden,
                               Activation hidden_act, int output_dim, std::vector<Segment> head,
                               Rng& rng, double head_init) {
  std::vector<LayerShape> shapes;
  int prev = input_dim;
  for (int h : hidden) {
    shapes.push_back({prev, h, {{0, h, hidden_act}}});
    prev = h;
  }
  shapes.push_back({prev, output_dim, std::move(head)});
  DenseNetwork net(std::move(shapes));

  for (std::size_t l = 0; l < net.layers_.size(); ++l) {
    bool terminal = l + 1 == net.layers_.size();
    double bound = terminal ? head_init : 1.0 / std::sqrt(static_cast<double>(net.layers_[l].in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto W = net.weight(static_cast<int>(l));
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = dist(rng);
    auto b = net.bias(static_cast<int>(l));
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = dist(rng);
  }
  return net;
}

Eigen::Map<const MatrixXd> DenseNetwork::weight(int layer) const {
  const auto& L = layers_[layer];
  return {params_.data() + offsets_[layer], L.out, L.in};
}

Eigen::Map<MatrixXd> DenseNetwork::weight(int layer) {
  const auto& L = layers_[layer];
  return {params_.data() + offsets_[layer], L.out, L.in};
}

Eigen::Map<const VectorXd> DenseNetwork::bias(int layer) const {
  const auto& L = layers_[layer];
  return {params_.data() + offsets_[layer] + static_cast<Eigen::Index>(L.out) * L.in, L.out};
}

Eigen::Map<VectorXd> DenseNetwork::bias(int layer) {
  const auto& L = layers_[layer];
  return {params_.data() + offsets_[layer] + static_cast<Eigen::Index>(L.out) * L.in, L.out};
}

void DenseNetwork::check_input(const MatrixXd& x) const {
  if (x.rows() != input_dim()) {
    throw ConfigError("network: input has " + std::to_string(x.rows()) + " rows, expected " +
                      std::to_string(input_dim()));
  }
}

MatrixXd DenseNetwork::forward(const MatrixXd& x) const {
  check_input(x);
  MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    MatrixXd z = weight(static_cast<int>(l)) * a;
    z.colwise() += bias(static_cast<int>(l));
    a = activate(layers_[l].segments, z);
  }
  return a;
}

MatrixXd DenseNetwork::forward(const MatrixXd& x, ForwardCache& cache) const {
  check_input(x);
  cache.inputs.resize(layers_.size());
  cache.pre.resize(layers_.size());
  cache.post.resize(layers_.size());
  const MatrixXd* a = &x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    cache.inputs[l] = *a;
    cache.pre[l].noalias() = weight(static_cast<int>(l)) * cache.inputs[l];
    cache.pre[l].colwise() += bias(static_cast<int>(l));
    cache.post[l] = activate(layers_[l].segments, cache.pre[l]);
    a = &cache.post[l];
  }
  return cache.post.back();
}

VectorXd DenseNetwork::forward(const VectorXd& x) const {
  return forward(MatrixXd(x)).col(0);
}

MatrixXd DenseNetwork::logits(const MatrixXd& x) const {
  check_input(x);
  MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    MatrixXd z = weight(static_cast<int>(l)) * a;
    z.colwise() += bias(static_cast<int>(l));
    if (l + 1 == layers_.size()) return z;
    a = activate(layers_[l].segments, z);
  }
  return a;
}

Backprop DenseNetwork::backward(const ForwardCache& cache, const MatrixXd& upstream,
                               const MatrixXd* head_pre_grad) const {
  Backprop out;
  out.param_grad = VectorXd::Zero(params_.size());
  MatrixXd grad = upstream;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const auto& L = layers_[l];
    MatrixXd dz = activate_backward(L.segments, cache.pre[l], cache.post[l], grad);
    if (head_pre_grad != nullptr && l + 1 == static_cast<int>(layers_.size())) {
      dz += *head_pre_grad;
    }
    Eigen::Map<MatrixXd> dW(out.param_grad.data() + offsets_[l], L.out, L.in);
    Eigen::Map<VectorXd> db(
        out.param_grad.data() + offsets_[l] + static_cast<Eigen::Index>(L.out) * L.in, L.out);
    dW.noalias() = dz * cache.inputs[l].transpose();
    db = dz.rowwise().sum();
    grad.noalias() = weight(l).transpose() * dz;
  }
  out.input_grad = std::move(grad);
  return out;
}

bool DenseNetwork::operator==(const DenseNetwork& other) const {
  return layers_ == other.layers_ && params_.size() == other.params_.size() &&
         params_ == other.params_;
}

AdamState AdamState::for_size(Eigen::Index n, double lr) {
  AdamState s;
  s.m = VectorXd::Zero(n);
  s.v = VectorXd::Zero(n);
  s.lr = lr;
  return s;
}

bool AdamState::operator==(const AdamState& o) const {
  return m.size() == o.m.size() && v.size() == o.v.size() && m == o.m && v == o.v &&
         step == o.step && lr == o.lr && beta1 == o.beta1 && beta2 == o.beta2 && eps == o.eps;
}

void adam_step(AdamState& s, VectorXd& params, const VectorXd& grads, const std::string& what) {
  if (grads.size() != params.size() || s.m.size() != params.size()) {
    throw ConfigError("adam: shape mismatch for " + what);
  }
  for (Eigen::Index i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw DivergenceError("adam: non-finite gradient in " + what + " at index " +
                            std::to_string(i) + " (step " + std::to_string(s.step) + ")");
    }
  }
  ++s.step;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * grads;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * grads.cwiseAbs2();
  double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  params.array() -= s.lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + s.eps);
}

void soft_update(const DenseNetwork& online, DenseNetwork& target, double tau) {
  if (online.parameter_count() != target.parameter_count()) {
    throw ConfigError("soft_update: parameter counts differ");
  }
  target.parameters() = tau * online.parameters() + (1.0 - tau) * target.parameters();
}

}  // namespace crx::nn
