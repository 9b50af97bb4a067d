#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pignn/dataset.hpp"
#include "pignn/nn.hpp"
#include "pignn/noise.hpp"
#include "pignn/pi.hpp"

namespace pignn {

enum class MaskMode { generator, task_self, none };
enum class Method { vanilla, pi_no_ue, pi_gnn, pi_task_self };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct BetaConfig {
    bool auto_sparsity = true;  // |V|^2 / (|V|^2 - num_edges)^2
    double value = 0.0;
};

enum class NegativePolicyChoice { automatic, all_complement, sampled };

struct TrainConfig {
    std::int32_t total_epochs = 400;
    std::int32_t pretrain_epochs = 50;
    BetaConfig beta;
    double lr = 0.01;
    double weight_decay = 5e-4;
    Arch arch_task = Arch::gcn;
    Arch arch_mask = Arch::gcn;
    std::int32_t hidden_task = 16;
    std::int32_t hidden_mask = 16;
    PiSource pi_source = PiSource::adjacency;
    double random_pi_density = -1.0;  // < 0: match the graph's edge density
    MaskMode mask_mode = MaskMode::generator;
    NegativePolicyChoice negative_policy = NegativePolicyChoice::automatic;
    std::int32_t negatives_per_positive = 5;
    // The task model's pair term acts on its hidden embeddings, keeping the
    // classification head out of the pair objective. The mask generator is
    // scored at its output: its hidden layer is post-ReLU, so pair dots
    // there are non-negative, sigma >= 0.5 on every pair, and a pair-only
    // model collapses to zero embeddings with every confidence pinned at
    // 0.5.
    bool task_pi_on_logits = false;
    bool mask_pi_on_logits = true;
    bool pi_mean = false;  // average the pair loss instead of summing
    std::uint64_t seed = 1;
    bool deterministic = false;
};

void apply_method(TrainConfig& cfg, Method m);
void validate(const TrainConfig& cfg);

struct EpochLog {
    std::int32_t epoch = 0;
    double loss_cls = 0.0;
    double loss_pi_weighted = 0.0;  // task model's mask-weighted pair loss
    double loss_pi_mask = 0.0;      // mask generator's pair loss
    double acc_train = 0.0;
    double acc_val = 0.0;
    double acc_test = 0.0;
    double mean_mask = 1.0;
};

struct RunResult {
    TrainConfig config;
    double beta_used = 0.0;
    std::vector<EpochLog> epochs;
    double final_train_acc = 0.0;
    double final_val_acc = 0.0;
    double final_test_acc = 0.0;
    std::int32_t best_val_epoch = 0;
    double best_val_acc = 0.0;
    double test_acc_at_best_val = 0.0;
    double wall_clock_sec = 0.0;  // zeroed in deterministic mode
};

std::string run_result_to_json(const RunResult& r, int indent = 2);

// |V|^2 / (|V|^2 - num_edges)^2
double beta_prime(std::int64_t num_nodes, std::int64_t num_edges);

// Per scored pair: sigma(h_i . h_j) when the pair label is positive,
// 1 - sigma(h_i . h_j) when negative. Shape follows the label set's policy.
PairWeights confidence_mask(const Eigen::MatrixXd& embeddings, const PiLabelSet& labels);

// Builds the PI label set the config asks for (propagating the corrupted
// train labels first for the label-comparison source).
PiLabelSet build_pi_labels(const Dataset& ds, const std::vector<std::int32_t>& corrupted,
                           const TrainConfig& cfg);

struct TrainOutput {
    ModelState task_model;
    std::optional<ModelState> mask_model;
    RunResult result;
};

// Full-batch training of the task model, optionally alongside a mask
// generator trained on the pair loss alone. During the pretraining epochs
// (epoch <= pretrain_epochs) the pair weights are all ones; afterwards they
// come from the configured mask source, recomputed every epoch from the
// pre-update embeddings and treated as constants. fixed_pi_weights, when
// given, overrides the mask entirely (used for confidence-split studies).
TrainOutput train(const Dataset& ds, const std::vector<std::int32_t>& corrupted,
                  const TrainConfig& cfg, const PairWeights* fixed_pi_weights = nullptr);

// Trains one model on the unweighted pair loss only (a standalone mask
// generator); class labels are never read.
ModelState train_pi_only(const Dataset& ds, const PiLabelSet& labels, const TrainConfig& cfg);

double evaluate(const ModelState& model, const Dataset& ds, Role role);

struct MaskReport {
    std::vector<std::int64_t> histogram;  // 64 bins over [0, 1]
    double mask_mean = 0.0;
    bool compared = false;
    double top_half_acc = 0.0;
    double bottom_half_acc = 0.0;
};

// Histogram of confidence values for a trained mask generator and, when
// run_comparison is set, clean-test accuracies of two task models trained
// with the pair loss restricted to the top / bottom half of the
// confidence-ranked pairs.
MaskReport mask_analysis(const ModelState& mask_model, const Dataset& ds,
                         const std::vector<std::int32_t>& corrupted, const PiLabelSet& labels,
                         const TrainConfig& cfg, bool run_comparison);

}  // namespace pignn
