#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crx/types.hpp"

namespace crx::nn {

enum class Activation : std::uint32_t {
  Identity = 0,
  Relu = 1,
  Tanh = 2,
  Sigmoid = 3,
  Softmax = 4,       // normalized over the segment
  GatedSoftmax = 5,  // mean(sigmoid(z)) * softmax(z) over the segment
};

std::string to_string(Activation a);

/// A contiguous slice of a layer's outputs sharing one activation.
struct Segment {
  int offset = 0;
  int length = 0;
  Activation activation = Activation::Identity;

  bool operator==(const Segment&) const = default;
};

/// Applies the segment activations column-wise: each column is one sample.
MatrixXd activate(const std::vector<Segment>& segments, const MatrixXd& pre);

/// Vector-Jacobian product of activate(): given pre-activations, their
/// activated values and dL/d(post), returns dL/d(pre).
MatrixXd activate_backward(const std::vector<Segment>& segments, const MatrixXd& pre,
                           const MatrixXd& post, const MatrixXd& upstream);

struct LayerShape {
  int in = 0;
  int out = 0;
  std::vector<Segment> segments;  // must tile [0, out)

  bool operator==(const LayerShape&) const = default;
};

/// Per-layer intermediate values of a batched forward pass.
struct ForwardCache {
  std::vector<MatrixXd> inputs;  // input to each layer
  std::vector<MatrixXd> pre;     // W x + b
  std::vector<MatrixXd> post;    // activated
};

struct Backprop {
  VectorXd param_grad;  // flat, same layout as DenseNetwork::parameters()
  MatrixXd input_grad;  // dL/dx, one column per sample
};

/// Fully connected feed-forward network over a single flat parameter
/// vector. Layer l occupies W_l (out x in, column-major) followed by b_l.
class DenseNetwork {
 public:
  DenseNetwork() = default;

  /// Throws ConfigError when dimensions do not chain or a layer's segments
  /// do not tile its outputs. Parameters start at zero.
  explicit DenseNetwork(std::vector<LayerShape> layers);

  /// Hidden layers share one activation; the terminal layer uses `head`.
  /// Weights drawn uniform(+-1/sqrt(fan_in)), terminal weights and biases
  /// uniform(+-head_init).
  static DenseNetwork mlp(int input_dim, const std::vector<int>& hidden, Activation hidden_act,
                          int output_dim, std::vector<Segment> head, Rng& rng,
                          double head_init = 3e-3);

  int input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
  int output_dim() const { return layers_.empty() ? 0 : layers_.back().out; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  const std::vector<Segment>& head() const { return layers_.back().segments; }

  VectorXd& parameters() { return params_; }
  const VectorXd& parameters() const { return params_; }
  Eigen::Index parameter_count() const { return params_.size(); }

  Eigen::Map<const MatrixXd> weight(int layer) const;
  Eigen::Map<MatrixXd> weight(int layer);
  Eigen::Map<const VectorXd> bias(int layer) const;
  Eigen::Map<VectorXd> bias(int layer);

  /// x: input_dim x batch. Throws ConfigError on dimension mismatch.
  MatrixXd forward(const MatrixXd& x) const;
  MatrixXd forward(const MatrixXd& x, ForwardCache& cache) const;
  VectorXd forward(const VectorXd& x) const;

  /// Terminal pre-activation values (before the head segments run).
  MatrixXd logits(const MatrixXd& x) const;

  /// `head_pre_grad`, when given, is added to dL/d(terminal pre-activation),
  /// for losses defined on the logits themselves.
  Backprop backward(const ForwardCache& cache, const MatrixXd& upstream,
                    const MatrixXd* head_pre_grad = nullptr) const;

  bool operator==(const DenseNetwork& other) const;

 private:
  void check_input(const MatrixXd& x) const;

  std::vector<LayerShape> layers_;
  std::vector<Eigen::Index> offsets_;  // start of W_l in params_
  VectorXd params_;
};

/// Adaptive-moment optimizer state for one flat parameter vector.
struct AdamState {
  VectorXd m;
  VectorXd v;
  std::int64_t step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_size(Eigen::Index n, double lr);
  bool operator==(const AdamState& other) const;
};

/// In-place update. Throws DivergenceError naming `what` and the first
/// non-finite gradient entry.
void adam_step(AdamState& state, VectorXd& params, const VectorXd& grads,
               const std::string& what = "parameters");

/// target <- tau * online + (1 - tau) * target.
void soft_update(const DenseNetwork& online, DenseNetwork& target, double tau);

}  // namespace crx::nn
