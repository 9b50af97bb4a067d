#include "pignn/noise.hpp"

#include <stdexcept>
#include <string>

#include "pignn/rng.hpp"

namespace pignn {

namespace {

void check_args(std::int32_t n, double eps) {
    if (n < 2) throw std::invalid_argument("transition matrix needs n >= 2 classes");
    if (eps < 0.0 || eps >= 1.0) {
        throw std::invalid_argument("noise rate must be in [0, 1), got " + std::to_string(eps));
    }
}

}  // namespace

TransitionMatrix symmetric_matrix(std::int32_t n, double eps) {
    check_args(n, eps);
    TransitionMatrix t;
    t.kind = NoiseKind::symmetric;
    t.eps = eps;
    t.q = Eigen::MatrixXd::Constant(n, n, eps / static_cast<double>(n - 1));
    t.q.diagonal().setConstant(1.0 - eps);
    return t;
}

TransitionMatrix pair_flip_matrix(std::int32_t n, double eps) {
    check_args(n, eps);
    TransitionMatrix t;
    t.kind = NoiseKind::pair_flip;
    t.eps = eps;
    t.q = Eigen::MatrixXd::Zero(n, n);
    for (std::int32_t i = 0; i < n; ++i) {
        t.q(i, i) = 1.0 - eps;
        t.q(i, (i + 1) % n) = eps;
    }
    return t;
}

std::vector<std::int32_t> corrupt_labels(const std::vector<std::int32_t>& clean,
                                         const TransitionMatrix& q, const Split& split,
                                         std::uint64_t seed, bool clean_val) {
    if (split.roles.size() != clean.size()) {
        throw std::invalid_argument("corrupt_labels: split/label size mismatch");
    }
    const std::int32_t n = q.num_classes();
    std::vector<std::int32_t> out = clean;
    for (std::size_t v = 0; v < clean.size(); ++v) {
        const Role r = split.roles[v];
        const bool affected = r == Role::train || (r == Role::val && !clean_val);
        if (!affected) continue;
        const std::int32_t y = clean[v];
        if (y < 0 || y >= n) {
            throw std::invalid_argument("corrupt_labels: label out of range at node " +
                                        std::to_string(v));
        }
        // Inverse-CDF draw on a per-node stream.
        Rng rng(seed, static_cast<std::uint64_t>(v));
        const double u = rng.uniform();
        double acc = 0.0;
        std::int32_t drawn = n - 1;
        for (std::int32_t c = 0; c < n; ++c) {
            acc += q.q(y, c);
            if (u < acc) {
                drawn = c;
                break;
            }
        }
        out[v] = drawn;
    }
    return out;
}

}  // namespace pignn
