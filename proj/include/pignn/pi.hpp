#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "pignn/graph.hpp"

namespace pignn {

enum class PiSource { adjacency, label_comparison, random };
enum class NegativePolicy { all_complement, sampled };

// Largest pair population scored densely; above this the sampled negative
// policy is required.
constexpr std::int64_t kMaxDensePairs = std::int64_t{1} << 25;

// Binary supervision over unordered node pairs. Positives are explicit and
// sorted; negatives are either the full complement (scored via a dense
// gram-matrix pass) or an explicit sample whose loss contribution is
// rescaled to stand in for the full complement.
struct PiLabelSet {
    std::int32_t num_nodes = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> positives;  // i < j, sorted
    PiSource source = PiSource::adjacency;
    NegativePolicy policy = NegativePolicy::all_complement;
    std::vector<std::pair<std::int32_t, std::int32_t>> sampled_negatives;
    double negative_scale = 1.0;  // true negative count / sampled count

    std::int64_t total_pairs() const {
        const std::int64_t n = num_nodes;
        return n * (n - 1) / 2;
    }
    std::int64_t num_true_negatives() const {
        return total_pairs() - static_cast<std::int64_t>(positives.size());
    }
    // Pairs that actually receive a loss term / confidence weight.
    std::int64_t num_scored_pairs() const {
        return policy == NegativePolicy::all_complement
                   ? total_pairs()
                   : static_cast<std::int64_t>(positives.size() + sampled_negatives.size());
    }
};

PiLabelSet pi_labels_from_adjacency(const Graph& g,
                                    NegativePolicy policy = NegativePolicy::all_complement,
                                    std::int32_t negatives_per_positive = 5,
                                    std::uint64_t seed = 0);

// Zhu-Ghahramani style propagation: F <- D^-1 A F with seed rows clamped to
// their one-hot labels, stopping on max-abs change < tol or max_iter.
// seed_labels uses -1 for unlabeled nodes. Nodes unreachable from any seed
// keep a uniform distribution; argmax ties resolve to the lowest class id.
std::vector<std::int32_t> label_propagation(const Graph& g,
                                            const std::vector<std::int32_t>& seed_labels,
                                            std::int32_t num_classes, std::int32_t max_iter = 100,
                                            double tol = 1e-6);

// Positive pairs are same-label pairs under a full label assignment.
PiLabelSet pi_labels_from_label_comparison(const std::vector<std::int32_t>& labels,
                                           NegativePolicy policy = NegativePolicy::all_complement,
                                           std::int32_t negatives_per_positive = 5,
                                           std::uint64_t seed = 0);

// Each unordered pair positive independently with probability `density`.
PiLabelSet pi_labels_random(std::int32_t num_nodes, double density, std::uint64_t seed,
                            NegativePolicy policy = NegativePolicy::all_complement,
                            std::int32_t negatives_per_positive = 5);

// Per-pair weights in [0, 1]. `ones` is the implicit all-ones weighting;
// `dense` is a full symmetric matrix with zero diagonal (entry (i, j) is the
// weight of the unordered pair); `per_pair` aligns with the label set's
// positives followed by its sampled negatives.
struct PairWeights {
    enum class Mode { ones, dense, per_pair };
    Mode mode = Mode::ones;
    Eigen::MatrixXd dense;
    Eigen::VectorXd per_pair;

    static PairWeights all_ones() { return {}; }
    double at(std::int32_t i, std::int32_t j) const {
        return mode == Mode::ones ? 1.0 : dense(i, j);
    }
    double mean(const PiLabelSet& labels) const;
};

struct PiLoss {
    double loss = 0.0;
    Eigen::MatrixXd grad;  // w.r.t. the embedding matrix
};

// Binary cross entropy with logits over pair dot products:
//   sum_{(i,j) positive} -w_ij log sigma(h_i . h_j)
// + sum_{(i,j) negative} -w_ij log(1 - sigma(h_i . h_j)),
// a sum over pairs unless mean_over_pairs divides by the pair population.
PiLoss pi_loss(const Eigen::MatrixXd& embeddings, const PiLabelSet& labels,
               const PairWeights& weights, bool mean_over_pairs = false);

}  // namespace pignn
