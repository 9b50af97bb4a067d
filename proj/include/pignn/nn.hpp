#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "pignn/graph.hpp"

namespace pignn {

enum class Arch { gcn, sage_mean };

std::int32_t default_hidden_dim(Arch arch);  // 16 for gcn, 64 for sage_mean

// One learnable tensor with its Adam moment buffers.
struct Tensor {
    std::string name;
    Eigen::MatrixXd value;
    Eigen::MatrixXd m;  // first moment
    Eigen::MatrixXd v;  // second moment
};

// Two-layer model. Layer 1 produces the node embeddings used for pairwise
// scoring; layer 2 produces class logits.
//   gcn:       params = { w1, b1, w2, b2 }
//   sage_mean: params = { w_self1, w_nb1, b1, w_self2, w_nb2, b2 }
struct ModelState {
    Arch arch = Arch::gcn;
    std::int32_t in_dim = 0;
    std::int32_t hidden_dim = 0;
    std::int32_t out_dim = 0;
    std::vector<Tensor> params;
    std::int64_t step = 0;
    std::uint64_t init_seed = 0;
};

// Glorot-uniform weights, zero biases, zero moments; deterministic per seed.
ModelState init_model(Arch arch, std::int32_t in_dim, std::int32_t hidden_dim,
                      std::int32_t out_dim, std::uint64_t seed);

struct ForwardTrace {
    Eigen::MatrixXd pre_hidden;  // layer-1 pre-activation
    Eigen::MatrixXd hidden;      // ReLU output; the pairwise-scoring embeddings
    Eigen::MatrixXd agg_hidden;  // aggregated hidden state feeding layer 2
    Eigen::MatrixXd logits;
};

// Full-batch forward pass over the whole graph. Throws divergence_error if
// any activation goes non-finite, naming the layer.
ForwardTrace forward(const ModelState& model, const Graph& g);

struct LossGrad {
    double loss = 0.0;
    Eigen::MatrixXd grad;
};

// Mean negative log softmax over the masked nodes; the gradient has
// (softmax - onehot) / count on masked rows and zero elsewhere.
LossGrad cross_entropy(const Eigen::MatrixXd& logits, const std::vector<std::int32_t>& labels,
                       const std::vector<std::int32_t>& nodes);

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// Argmax accuracy over the given nodes; ties resolve to the lowest class id.
double accuracy(const Eigen::MatrixXd& logits, const std::vector<std::int32_t>& labels,
                const std::vector<std::int32_t>& nodes);

struct Gradients {
    std::vector<Eigen::MatrixXd> by_param;  // aligned with ModelState::params
};

// Exact reverse pass. grad_logits and grad_embeddings (w.r.t. the hidden
// embeddings) may be empty matrices, meaning zero upstream.
Gradients backward(const ModelState& model, const Graph& g, const ForwardTrace& trace,
                   const Eigen::MatrixXd& grad_logits, const Eigen::MatrixXd& grad_embeddings);

// Adam (beta1 = 0.9, beta2 = 0.999, eps = 1e-8) with L2 added to the
// gradient: g <- g + weight_decay * w. Throws divergence_error on a
// non-finite gradient, naming the parameter.
void adam_step(ModelState& model, const Gradients& grads, double lr, double weight_decay);

// Checkpoint: JSON manifest + one flat f64 array file next to it.
void save_model(const ModelState& model, const std::string& manifest_path);
ModelState load_model(const std::string& manifest_path);

}  // namespace pignn
