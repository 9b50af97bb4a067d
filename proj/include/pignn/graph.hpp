#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace pignn {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int32_t>;

// Immutable undirected graph: symmetric deduplicated CSR structure plus a
// dense node-feature matrix. Cheap to copy (shared immutable state); the
// normalized operators and their products with the features are built
// lazily and cached thread-safely.
class Graph {
public:
    Graph() = default;
    Graph(std::int32_t num_nodes, std::vector<std::int32_t> row_offsets,
          std::vector<std::int32_t> col_indices, Eigen::MatrixXd features);

    std::int32_t num_nodes() const { return impl_ ? impl_->num_nodes : 0; }
    // Undirected edge count (each stored twice in CSR).
    std::int64_t num_edges() const {
        return impl_ ? static_cast<std::int64_t>(impl_->cols.size()) / 2 : 0;
    }
    const std::vector<std::int32_t>& row_offsets() const { return impl_->offsets; }
    const std::vector<std::int32_t>& col_indices() const { return impl_->cols; }
    std::int32_t degree(std::int32_t v) const {
        return impl_->offsets[v + 1] - impl_->offsets[v];
    }
    bool has_edge(std::int32_t i, std::int32_t j) const;
    const Eigen::MatrixXd& features() const { return impl_->features; }
    std::int32_t feature_dim() const {
        return static_cast<std::int32_t>(impl_->features.cols());
    }

    // Self-loop renormalized operator: D~^{-1/2} (A + I) D~^{-1/2}.
    const SparseMat& normalized() const;
    // Row-normalized neighbor mean D^{-1} A; isolated nodes get a zero row.
    const SparseMat& neighbor_mean() const;
    // Cached products with the feature matrix (graph-constant across epochs).
    const Eigen::MatrixXd& normalized_features() const;
    const Eigen::MatrixXd& neighbor_mean_features() const;

private:
    struct Impl {
        std::int32_t num_nodes = 0;
        std::vector<std::int32_t> offsets;
        std::vector<std::int32_t> cols;
        Eigen::MatrixXd features;

        mutable std::once_flag norm_once, mean_once, norm_feat_once, mean_feat_once;
        mutable SparseMat norm_adj, mean_adj;
        mutable Eigen::MatrixXd norm_feats, mean_feats;
    };
    std::shared_ptr<const Impl> impl_;
};

// Symmetrizes, deduplicates and drops self-loops from an arbitrary edge
// list. Throws std::invalid_argument on out-of-range endpoints or a feature
// row-count mismatch.
Graph build_graph(const std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
                  std::int32_t num_nodes, Eigen::MatrixXd features);

// D~^{-1/2} (A + I) D~^{-1/2} built from scratch (the Graph caches one).
SparseMat normalize_adjacency(const Graph& g);

enum class Role : std::uint8_t { train = 0, val = 1, test = 2, unused = 3 };

struct Split {
    std::vector<Role> roles;

    std::int64_t count(Role r) const;
    std::vector<std::int32_t> nodes_with(Role r) const;
};

// First train_k nodes of each class (in node order) go to train, the next
// val_k to val, the rest to test. Throws if some class is too small.
Split make_split_per_class(const std::vector<std::int32_t>& labels,
                           std::int32_t num_classes, std::int32_t train_k,
                           std::int32_t val_k);

// Explicit index sets; everything unlisted is unused. Throws on overlap,
// out-of-range indices, or an empty train set.
Split make_split_explicit(std::int32_t num_nodes,
                          const std::vector<std::int32_t>& train,
                          const std::vector<std::int32_t>& val,
                          const std::vector<std::int32_t>& test);

}  // namespace pignn
