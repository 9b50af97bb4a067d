#include "pignn/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pignn {

Graph::Graph(std::int32_t num_nodes, std::vector<std::int32_t> row_offsets,
             std::vector<std::int32_t> col_indices, Eigen::MatrixXd features) {
    auto impl = std::make_shared<Impl>();
    impl->num_nodes = num_nodes;
    impl->offsets = std::move(row_offsets);
    impl->cols = std::move(col_indices);
    impl->features = std::move(features);
    impl_ = std::move(impl);
}

bool Graph::has_edge(std::int32_t i, std::int32_t j) const {
    const auto& off = impl_->offsets;
    const auto& cols = impl_->cols;
    return std::binary_search(cols.begin() + off[i], cols.begin() + off[i + 1], j);
}

Graph build_graph(const std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
                  std::int32_t num_nodes, Eigen::MatrixXd features) {
    if (num_nodes < 0) throw std::invalid_argument("build_graph: negative node count");
    if (features.rows() != num_nodes) {
        throw std::invalid_argument(
            "build_graph: feature rows (" + std::to_string(features.rows()) +
            ") != num_nodes (" + std::to_string(num_nodes) + ")");
    }

    std::vector<std::pair<std::int32_t, std::int32_t>> sym;
    sym.reserve(edges.size() * 2);
    for (const auto& [i, j] : edges) {
        if (i < 0 || i >= num_nodes || j < 0 || j >= num_nodes) {
            throw std::invalid_argument("build_graph: edge endpoint out of range: (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
        }
        if (i == j) continue;  // self-loops handled by normalization, not storage
        sym.emplace_back(i, j);
        sym.emplace_back(j, i);
    }
    std::sort(sym.begin(), sym.end());
    sym.erase(std::unique(sym.begin(), sym.end()), sym.end());

    std::vector<std::int32_t> offsets(static_cast<std::size_t>(num_nodes) + 1, 0);
    std::vector<std::int32_t> cols;
    cols.reserve(sym.size());
    for (const auto& [i, j] : sym) {
        ++offsets[static_cast<std::size_t>(i) + 1];
        cols.push_back(j);
    }
    for (std::int32_t v = 0; v < num_nodes; ++v) offsets[v + 1] += offsets[v];

    return Graph(num_nodes, std::move(offsets), std::move(cols), std::move(features));
}

SparseMat normalize_adjacency(const Graph& g) {
    const std::int32_t n = g.num_nodes();
    const auto& off = g.row_offsets();
    const auto& cols = g.col_indices();

    Eigen::VectorXd inv_sqrt_deg(n);
    for (std::int32_t v = 0; v < n; ++v) {
        inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)) + 1.0);
    }

    std::vector<Eigen::Triplet<double, std::int32_t>> trips;
    trips.reserve(cols.size() + static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i) {
        trips.emplace_back(i, i, inv_sqrt_deg[i] * inv_sqrt_deg[i]);
        for (std::int32_t k = off[i]; k < off[i + 1]; ++k) {
            const std::int32_t j = cols[k];
            trips.emplace_back(i, j, inv_sqrt_deg[i] * inv_sqrt_deg[j]);
        }
    }
    SparseMat m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

const SparseMat& Graph::normalized() const {
    std::call_once(impl_->norm_once, [this] { impl_->norm_adj = normalize_adjacency(*this); });
    return impl_->norm_adj;
}

const SparseMat& Graph::neighbor_mean() const {
    std::call_once(impl_->mean_once, [this] {
        const std::int32_t n = impl_->num_nodes;
        std::vector<Eigen::Triplet<double, std::int32_t>> trips;
        trips.reserve(impl_->cols.size());
        for (std::int32_t i = 0; i < n; ++i) {
            const std::int32_t deg = degree(i);
            if (deg == 0) continue;
            const double w = 1.0 / static_cast<double>(deg);
            for (std::int32_t k = impl_->offsets[i]; k < impl_->offsets[i + 1]; ++k) {
                trips.emplace_back(i, impl_->cols[k], w);
            }
        }
        SparseMat m(n, n);
        m.setFromTriplets(trips.begin(), trips.end());
        m.makeCompressed();
        impl_->mean_adj = std::move(m);
    });
    return impl_->mean_adj;
}

const Eigen::MatrixXd& Graph::normalized_features() const {
    std::call_once(impl_->norm_feat_once,
                   [this] { impl_->norm_feats = normalized() * impl_->features; });
    return impl_->norm_feats;
}

const Eigen::MatrixXd& Graph::neighbor_mean_features() const {
    std::call_once(impl_->mean_feat_once,
                   [this] { impl_->mean_feats = neighbor_mean() * impl_->features; });
    return impl_->mean_feats;
}

std::int64_t Split::count(Role r) const {
    return std::count(roles.begin(), roles.end(), r);
}

std::vector<std::int32_t> Split::nodes_with(Role r) const {
    std::vector<std::int32_t> out;
    for (std::size_t v = 0; v < roles.size(); ++v) {
        if (roles[v] == r) out.push_back(static_cast<std::int32_t>(v));
    }
    return out;
}

Split make_split_per_class(const std::vector<std::int32_t>& labels,
                           std::int32_t num_classes, std::int32_t train_k,
                           std::int32_t val_k) {
    if (train_k < 1 || val_k < 0) {
        throw std::invalid_argument("make_split_per_class: need train_k >= 1, val_k >= 0");
    }
    std::vector<std::int64_t> class_size(num_classes, 0);
    for (std::int32_t y : labels) {
        if (y < 0 || y >= num_classes) {
            throw std::invalid_argument("make_split_per_class: label out of range");
        }
        ++class_size[y];
    }
    for (std::int32_t c = 0; c < num_classes; ++c) {
        if (class_size[c] < train_k + val_k) {
            throw std::invalid_argument("make_split_per_class: class " + std::to_string(c) +
                                        " has only " + std::to_string(class_size[c]) +
                                        " nodes, needs " + std::to_string(train_k + val_k));
        }
    }

    Split s;
    s.roles.assign(labels.size(), Role::test);
    std::vector<std::int32_t> seen(num_classes, 0);
    for (std::size_t v = 0; v < labels.size(); ++v) {
        const std::int32_t c = labels[v];
        if (seen[c] < train_k) {
            s.roles[v] = Role::train;
        } else if (seen[c] < train_k + val_k) {
            s.roles[v] = Role::val;
        }
        ++seen[c];
    }
    return s;
}

Split make_split_explicit(std::int32_t num_nodes,
                          const std::vector<std::int32_t>& train,
                          const std::vector<std::int32_t>& val,
                          const std::vector<std::int32_t>& test) {
    Split s;
    s.roles.assign(static_cast<std::size_t>(num_nodes), Role::unused);
    auto assign = [&](const std::vector<std::int32_t>& nodes, Role r, const char* name) {
        for (std::int32_t v : nodes) {
            if (v < 0 || v >= num_nodes) {
                throw std::invalid_argument(std::string("make_split_explicit: ") + name +
                                            " index out of range: " + std::to_string(v));
            }
            if (s.roles[v] != Role::unused) {
                throw std::invalid_argument("make_split_explicit: node " + std::to_string(v) +
                                            " assigned to two roles");
            }
            s.roles[v] = r;
        }
    };
    assign(train, Role::train, "train");
    assign(val, Role::val, "val");
    assign(test, Role::test, "test");
    if (train.empty()) throw std::invalid_argument("make_split_explicit: empty train set");
    return s;
}

}  // namespace pignn
