#include "pignn/pi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "pignn/rng.hpp"

namespace pignn {

namespace {

void check_dense_cap(std::int32_t num_nodes, NegativePolicy policy) {
    const std::int64_t pairs = static_cast<std::int64_t>(num_nodes) * (num_nodes - 1) / 2;
    if (policy == NegativePolicy::all_complement && pairs > kMaxDensePairs) {
        throw std::invalid_argument(
            "pair population " + std::to_string(pairs) + " exceeds the dense cap (" +
            std::to_string(kMaxDensePairs) + "); use the sampled negative policy");
    }
}

void sample_negatives(PiLabelSet& set, std::int32_t negatives_per_positive, std::uint64_t seed) {
    if (negatives_per_positive < 1) {
        throw std::invalid_argument("sampled policy needs negatives_per_positive >= 1");
    }
    const std::int64_t n = set.num_nodes;
    const std::int64_t wanted = std::min<std::int64_t>(
        static_cast<std::int64_t>(set.positives.size()) * negatives_per_positive,
        set.num_true_negatives());

    std::unordered_set<std::int64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(wanted) * 2);
    Rng rng(seed, 0x6e6567ULL);
    while (static_cast<std::int64_t>(set.sampled_negatives.size()) < wanted) {
        auto i = static_cast<std::int32_t>(rng.below(n));
        auto j = static_cast<std::int32_t>(rng.below(n));
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        const std::int64_t key = static_cast<std::int64_t>(i) * n + j;
        if (chosen.count(key)) continue;
        if (std::binary_search(set.positives.begin(), set.positives.end(),
                               std::make_pair(i, j))) {
            continue;
        }
        chosen.insert(key);
        set.sampled_negatives.emplace_back(i, j);
    }
    std::sort(set.sampled_negatives.begin(), set.sampled_negatives.end());
    set.negative_scale =
        wanted > 0 ? static_cast<double>(set.num_true_negatives()) / static_cast<double>(wanted)
                   : 1.0;
}

void finish(PiLabelSet& set, NegativePolicy policy, std::int32_t negatives_per_positive,
            std::uint64_t seed) {
    set.policy = policy;
    if (policy == NegativePolicy::sampled) {
        sample_negatives(set, negatives_per_positive, seed);
    }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

PiLabelSet pi_labels_from_adjacency(const Graph& g, NegativePolicy policy,
                                    std::int32_t negatives_per_positive, std::uint64_t seed) {
    check_dense_cap(g.num_nodes(), policy);
    PiLabelSet set;
    set.num_nodes = g.num_nodes();
    set.source = PiSource::adjacency;
    set.positives.reserve(static_cast<std::size_t>(g.num_edges()));
    for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
        for (std::int32_t k = g.row_offsets()[i]; k < g.row_offsets()[i + 1]; ++k) {
            const std::int32_t j = g.col_indices()[k];
            if (i < j) set.positives.emplace_back(i, j);
        }
    }
    finish(set, policy, negatives_per_positive, seed);
    return set;
}

std::vector<std::int32_t> label_propagation(const Graph& g,
                                            const std::vector<std::int32_t>& seed_labels,
                                            std::int32_t num_classes, std::int32_t max_iter,
                                            double tol) {
    const std::int32_t n = g.num_nodes();
    if (seed_labels.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("label_propagation: seed label size mismatch");
    }

    Eigen::MatrixXd f = Eigen::MatrixXd::Constant(n, num_classes, 1.0 / num_classes);
    for (std::int32_t v = 0; v < n; ++v) {
        if (seed_labels[v] >= 0) {
            f.row(v).setZero();
            f(v, seed_labels[v]) = 1.0;
        }
    }

    const SparseMat& p = g.neighbor_mean();
    for (std::int32_t it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd next = p * f;
        for (std::int32_t v = 0; v < n; ++v) {
            if (seed_labels[v] >= 0) {
                next.row(v).setZero();
                next(v, seed_labels[v]) = 1.0;
            } else if (g.degree(v) == 0) {
                next.row(v) = f.row(v);  // no mass flows into isolated nodes
            }
        }
        const double delta = (next - f).cwiseAbs().maxCoeff();
        f = std::move(next);
        if (delta < tol) break;
    }

    std::vector<std::int32_t> out(static_cast<std::size_t>(n));
    for (std::int32_t v = 0; v < n; ++v) {
        std::int32_t best = 0;
        for (std::int32_t c = 1; c < num_classes; ++c) {
            if (f(v, c) > f(v, best)) best = c;
        }
        out[v] = best;
    }
    return out;
}

PiLabelSet pi_labels_from_label_comparison(const std::vector<std::int32_t>& labels,
                                           NegativePolicy policy,
                                           std::int32_t negatives_per_positive,
                                           std::uint64_t seed) {
    const auto n = static_cast<std::int32_t>(labels.size());
    check_dense_cap(n, policy);
    PiLabelSet set;
    set.num_nodes = n;
    set.source = PiSource::label_comparison;
    for (std::int32_t i = 0; i < n; ++i) {
        for (std::int32_t j = i + 1; j < n; ++j) {
            if (labels[i] == labels[j]) set.positives.emplace_back(i, j);
        }
    }
    finish(set, policy, negatives_per_positive, seed);
    return set;
}

PiLabelSet pi_labels_random(std::int32_t num_nodes, double density, std::uint64_t seed,
                            NegativePolicy policy, std::int32_t negatives_per_positive) {
    if (density < 0.0 || density > 1.0) {
        throw std::invalid_argument("pi_labels_random: density must be in [0, 1]");
    }
    check_dense_cap(num_nodes, policy);
    PiLabelSet set;
    set.num_nodes = num_nodes;
    set.source = PiSource::random;
    Rng rng(seed, 0x7069ULL);
    for (std::int32_t i = 0; i < num_nodes; ++i) {
        for (std::int32_t j = i + 1; j < num_nodes; ++j) {
            if (rng.uniform() < density) set.positives.emplace_back(i, j);
        }
    }
    finish(set, policy, negatives_per_positive, seed);
    return set;
}

double PairWeights::mean(const PiLabelSet& labels) const {
    switch (mode) {
        case Mode::ones:
            return 1.0;
        case Mode::dense:
            return labels.total_pairs() > 0
                       ? dense.sum() / 2.0 / static_cast<double>(labels.total_pairs())
                       : 0.0;
        case Mode::per_pair:
            return per_pair.size() > 0 ? per_pair.mean() : 0.0;
    }
    return 1.0;
}

PiLoss pi_loss(const Eigen::MatrixXd& embeddings, const PiLabelSet& labels,
               const PairWeights& weights, bool mean_over_pairs) {
    const std::int32_t n = labels.num_nodes;
    if (embeddings.rows() != n) {
        throw std::invalid_argument("pi_loss: embedding rows do not match the pair label set");
    }

    PiLoss out;
    if (labels.policy == NegativePolicy::all_complement) {
        if (weights.mode == PairWeights::Mode::per_pair) {
            throw std::invalid_argument("pi_loss: per-pair weights need the sampled policy");
        }
        // Dense pass over the full gram matrix; every off-diagonal entry is a
        // negative pair unless listed in positives. sum_{i<j} softplus(s_ij)
        // is half the full softplus sum because S is symmetric.
        Eigen::MatrixXd s(n, n);
        s.noalias() = embeddings * embeddings.transpose();

        Eigen::MatrixXd residual;  // becomes the pair-residual matrix G
        double loss = 0.0;
        if (weights.mode == PairWeights::Mode::ones) {
            const Eigen::ArrayXXd sp =
                s.array().max(0.0) + (-s.array().abs()).exp().log1p();
            loss = 0.5 * (sp.sum() - sp.matrix().diagonal().sum());
            residual = (((-s.array()).exp() + 1.0).inverse()).matrix();
            residual.diagonal().setZero();
            for (const auto& [i, j] : labels.positives) {
                loss -= s(i, j);
                residual(i, j) -= 1.0;
                residual(j, i) -= 1.0;
            }
        } else {
            const Eigen::MatrixXd& w = weights.dense;
            if (w.rows() != n || w.cols() != n) {
                throw std::invalid_argument("pi_loss: dense weight shape mismatch");
            }
            loss = 0.5 * (w.array() * (s.array().max(0.0) + (-s.array().abs()).exp().log1p()))
                             .sum();
            residual = (w.array() * ((-s.array()).exp() + 1.0).inverse()).matrix();
            residual.diagonal().setZero();
            for (const auto& [i, j] : labels.positives) {
                loss -= w(i, j) * s(i, j);
                residual(i, j) -= w(i, j);
                residual(j, i) -= w(j, i);
            }
        }
        out.loss = loss;
        out.grad.noalias() = residual * embeddings;
    } else {
        if (weights.mode == PairWeights::Mode::dense) {
            throw std::invalid_argument("pi_loss: dense weights need the all-complement policy");
        }
        const bool per_pair = weights.mode == PairWeights::Mode::per_pair;
        const auto num_pos = static_cast<std::int64_t>(labels.positives.size());
        if (per_pair &&
            weights.per_pair.size() != num_pos + static_cast<std::int64_t>(
                                                     labels.sampled_negatives.size())) {
            throw std::invalid_argument("pi_loss: per-pair weight length mismatch");
        }
        out.grad = Eigen::MatrixXd::Zero(n, embeddings.cols());
        double loss = 0.0;
        std::int64_t idx = 0;
        for (const auto& [i, j] : labels.positives) {
            const double w = per_pair ? weights.per_pair(idx) : 1.0;
            ++idx;
            const double s = embeddings.row(i).dot(embeddings.row(j));
            loss += w * softplus(-s);
            const double coeff = w * (sigmoid(s) - 1.0);
            out.grad.row(i) += coeff * embeddings.row(j);
            out.grad.row(j) += coeff * embeddings.row(i);
        }
        for (const auto& [i, j] : labels.sampled_negatives) {
            const double w = (per_pair ? weights.per_pair(idx) : 1.0) * labels.negative_scale;
            ++idx;
            const double s = embeddings.row(i).dot(embeddings.row(j));
            loss += w * softplus(s);
            const double coeff = w * sigmoid(s);
            out.grad.row(i) += coeff * embeddings.row(j);
            out.grad.row(j) += coeff * embeddings.row(i);
        }
        out.loss = loss;
    }

    if (mean_over_pairs && labels.total_pairs() > 0) {
        const double scale = 1.0 / static_cast<double>(labels.total_pairs());
        out.loss *= scale;
        out.grad *= scale;
    }
    return out;
}

}  // namespace pignn
