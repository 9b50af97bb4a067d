#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "pignn/graph.hpp"

namespace pignn {

enum class NoiseKind { symmetric, pair_flip };

// Stream tag deriving a corruption seed from a run seed (rng.hpp
// derive_stream), so one run seed covers init and corruption coherently.
constexpr std::uint64_t kNoiseSeedStream = 0x6e6f697365ULL;

// Row-stochastic class transition matrix: q(i, j) = Pr(observed = j | true = i).
struct TransitionMatrix {
    Eigen::MatrixXd q;
    NoiseKind kind = NoiseKind::symmetric;
    double eps = 0.0;

    std::int32_t num_classes() const { return static_cast<std::int32_t>(q.rows()); }
};

// Diagonal 1 - eps, every off-diagonal eps / (n - 1).
TransitionMatrix symmetric_matrix(std::int32_t n, double eps);

// Diagonal 1 - eps, probability eps of flipping to the cyclically next class.
TransitionMatrix pair_flip_matrix(std::int32_t n, double eps);

// Samples an observed label for every train (and, unless clean_val, val)
// node from the matrix row of its clean label. Each node draws from an
// independent stream keyed on (seed, node), so the result does not depend
// on processing order. Test and unused nodes are untouched.
std::vector<std::int32_t> corrupt_labels(const std::vector<std::int32_t>& clean,
                                         const TransitionMatrix& q, const Split& split,
                                         std::uint64_t seed, bool clean_val = false);

}  // namespace pignn
