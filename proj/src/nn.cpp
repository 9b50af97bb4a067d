#include "pignn/nn.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pignn/errors.hpp"
#include "pignn/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace pignn {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

Eigen::MatrixXd glorot(std::int64_t rows, std::int64_t cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r) {
        for (std::int64_t c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
    }
    return w;
}

Tensor make_weight(const std::string& name, std::int64_t rows, std::int64_t cols, Rng& rng) {
    Tensor t;
    t.name = name;
    t.value = glorot(rows, cols, rng);
    t.m = Eigen::MatrixXd::Zero(rows, cols);
    t.v = Eigen::MatrixXd::Zero(rows, cols);
    return t;
}

Tensor make_bias(const std::string& name, std::int64_t cols) {
    Tensor t;
    t.name = name;
    t.value = Eigen::MatrixXd::Zero(1, cols);
    t.m = Eigen::MatrixXd::Zero(1, cols);
    t.v = Eigen::MatrixXd::Zero(1, cols);
    return t;
}

void check_finite(const Eigen::MatrixXd& x, const char* what) {
    if (!x.allFinite()) {
        throw divergence_error(std::string("non-finite activations in ") + what);
    }
}

bool empty(const Eigen::MatrixXd& x) { return x.size() == 0; }

}  // namespace

std::int32_t default_hidden_dim(Arch arch) { return arch == Arch::gcn ? 16 : 64; }

ModelState init_model(Arch arch, std::int32_t in_dim, std::int32_t hidden_dim,
                      std::int32_t out_dim, std::uint64_t seed) {
    if (in_dim < 1 || hidden_dim < 1 || out_dim < 1) {
        throw std::invalid_argument("init_model: zero-sized layer");
    }
    ModelState m;
    m.arch = arch;
    m.in_dim = in_dim;
    m.hidden_dim = hidden_dim;
    m.out_dim = out_dim;
    m.init_seed = seed;
    Rng rng(seed, 0x6d6f64656cULL);
    if (arch == Arch::gcn) {
        m.params.push_back(make_weight("w1", in_dim, hidden_dim, rng));
        m.params.push_back(make_bias("b1", hidden_dim));
        m.params.push_back(make_weight("w2", hidden_dim, out_dim, rng));
        m.params.push_back(make_bias("b2", out_dim));
    } else {
        m.params.push_back(make_weight("w_self1", in_dim, hidden_dim, rng));
        m.params.push_back(make_weight("w_nb1", in_dim, hidden_dim, rng));
        m.params.push_back(make_bias("b1", hidden_dim));
        m.params.push_back(make_weight("w_self2", hidden_dim, out_dim, rng));
        m.params.push_back(make_weight("w_nb2", hidden_dim, out_dim, rng));
        m.params.push_back(make_bias("b2", out_dim));
    }
    return m;
}

ForwardTrace forward(const ModelState& model, const Graph& g) {
    if (g.feature_dim() != model.in_dim) {
        throw std::invalid_argument("forward: feature dim " + std::to_string(g.feature_dim()) +
                                    " does not match model input dim " +
                                    std::to_string(model.in_dim));
    }
    ForwardTrace t;
    if (model.arch == Arch::gcn) {
        const auto& p = model.params;
        const Eigen::MatrixXd& px = g.normalized_features();  // A_hat X, cached
        t.pre_hidden = px * p[0].value;
        t.pre_hidden.rowwise() += p[1].value.row(0);
        check_finite(t.pre_hidden, "layer 1 (gcn)");
        t.hidden = t.pre_hidden.cwiseMax(0.0);
        t.agg_hidden = g.normalized() * t.hidden;
        t.logits = t.agg_hidden * p[2].value;
        t.logits.rowwise() += p[3].value.row(0);
        check_finite(t.logits, "layer 2 (gcn)");
    } else {
        const auto& p = model.params;
        const Eigen::MatrixXd& mx = g.neighbor_mean_features();  // D^-1 A X, cached
        t.pre_hidden = g.features() * p[0].value + mx * p[1].value;
        t.pre_hidden.rowwise() += p[2].value.row(0);
        check_finite(t.pre_hidden, "layer 1 (sage_mean)");
        t.hidden = t.pre_hidden.cwiseMax(0.0);
        t.agg_hidden = g.neighbor_mean() * t.hidden;
        t.logits = t.hidden * p[3].value + t.agg_hidden * p[4].value;
        t.logits.rowwise() += p[5].value.row(0);
        check_finite(t.logits, "layer 2 (sage_mean)");
    }
    return t;
}

LossGrad cross_entropy(const Eigen::MatrixXd& logits, const std::vector<std::int32_t>& labels,
                       const std::vector<std::int32_t>& nodes) {
    if (nodes.empty()) throw std::invalid_argument("cross_entropy: empty node mask");
    const auto count = static_cast<double>(nodes.size());

    LossGrad out;
    out.grad = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());
    for (const std::int32_t v : nodes) {
        const auto row = logits.row(v);
        const double mx = row.maxCoeff();
        const double lse = mx + std::log((row.array() - mx).exp().sum());
        out.loss += lse - row(labels[v]);
        out.grad.row(v) = (row.array() - lse).exp() / count;
        out.grad(v, labels[v]) -= 1.0 / count;
    }
    out.loss /= count;
    return out;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const auto row = logits.row(r);
        const double mx = row.maxCoeff();
        const Eigen::ArrayXd e = (row.array() - mx).exp();
        out.row(r) = e / e.sum();
    }
    return out;
}

double accuracy(const Eigen::MatrixXd& logits, const std::vector<std::int32_t>& labels,
                const std::vector<std::int32_t>& nodes) {
    if (nodes.empty()) throw std::invalid_argument("accuracy: empty node set");
    std::int64_t hits = 0;
    for (const std::int32_t v : nodes) {
        std::int32_t best = 0;
        for (std::int32_t c = 1; c < logits.cols(); ++c) {
            if (logits(v, c) > logits(v, best)) best = c;
        }
        if (best == labels[v]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

Gradients backward(const ModelState& model, const Graph& g, const ForwardTrace& trace,
                   const Eigen::MatrixXd& grad_logits, const Eigen::MatrixXd& grad_embeddings) {
    if (!empty(grad_logits) && (grad_logits.rows() != trace.logits.rows() ||
                                grad_logits.cols() != trace.logits.cols())) {
        throw std::invalid_argument("backward: grad_logits shape mismatch");
    }
    if (!empty(grad_embeddings) && (grad_embeddings.rows() != trace.hidden.rows() ||
                                    grad_embeddings.cols() != trace.hidden.cols())) {
        throw std::invalid_argument("backward: grad_embeddings shape mismatch");
    }

    Gradients out;
    out.by_param.resize(model.params.size());
    Eigen::MatrixXd d_hidden =
        empty(grad_embeddings)
            ? Eigen::MatrixXd::Zero(trace.hidden.rows(), trace.hidden.cols()).eval()
            : grad_embeddings;

    if (model.arch == Arch::gcn) {
        if (!empty(grad_logits)) {
            out.by_param[2] = trace.agg_hidden.transpose() * grad_logits;
            out.by_param[3] = grad_logits.colwise().sum();
            d_hidden.noalias() +=
                g.normalized().transpose() * (grad_logits * model.params[2].value.transpose());
        } else {
            out.by_param[2] = Eigen::MatrixXd::Zero(model.hidden_dim, model.out_dim);
            out.by_param[3] = Eigen::MatrixXd::Zero(1, model.out_dim);
        }
        const Eigen::MatrixXd d_pre =
            (trace.pre_hidden.array() > 0.0).cast<double>() * d_hidden.array();
        out.by_param[0] = g.normalized_features().transpose() * d_pre;
        out.by_param[1] = d_pre.colwise().sum();
    } else {
        if (!empty(grad_logits)) {
            out.by_param[3] = trace.hidden.transpose() * grad_logits;
            out.by_param[4] = trace.agg_hidden.transpose() * grad_logits;
            out.by_param[5] = grad_logits.colwise().sum();
            d_hidden.noalias() += grad_logits * model.params[3].value.transpose();
            d_hidden.noalias() +=
                g.neighbor_mean().transpose() * (grad_logits * model.params[4].value.transpose());
        } else {
            out.by_param[3] = Eigen::MatrixXd::Zero(model.hidden_dim, model.out_dim);
            out.by_param[4] = Eigen::MatrixXd::Zero(model.hidden_dim, model.out_dim);
            out.by_param[5] = Eigen::MatrixXd::Zero(1, model.out_dim);
        }
        const Eigen::MatrixXd d_pre =
            (trace.pre_hidden.array() > 0.0).cast<double>() * d_hidden.array();
        out.by_param[0] = g.features().transpose() * d_pre;
        out.by_param[1] = g.neighbor_mean_features().transpose() * d_pre;
        out.by_param[2] = d_pre.colwise().sum();
    }
    return out;
}

void adam_step(ModelState& model, const Gradients& grads, double lr, double weight_decay) {
    if (grads.by_param.size() != model.params.size()) {
        throw std::invalid_argument("adam_step: gradient count mismatch");
    }
    model.step += 1;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(model.step));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(model.step));
    for (std::size_t i = 0; i < model.params.size(); ++i) {
        Tensor& p = model.params[i];
        const Eigen::MatrixXd& g = grads.by_param[i];
        if (g.rows() != p.value.rows() || g.cols() != p.value.cols()) {
            throw std::invalid_argument("adam_step: shape mismatch for " + p.name);
        }
        if (!g.allFinite()) {
            throw divergence_error("non-finite gradient for parameter " + p.name);
        }
        const Eigen::ArrayXXd eff = g.array() + weight_decay * p.value.array();
        p.m.array() = kAdamBeta1 * p.m.array() + (1.0 - kAdamBeta1) * eff;
        p.v.array() = kAdamBeta2 * p.v.array() + (1.0 - kAdamBeta2) * eff.square();
        p.value.array() -= lr * (p.m.array() / bc1) / ((p.v.array() / bc2).sqrt() + kAdamEps);
    }
}

void save_model(const ModelState& model, const std::string& manifest_path) {
    const fs::path mpath(manifest_path);
    const fs::path dpath = fs::path(mpath).replace_extension(".bin");

    std::vector<double> flat;
    json tensors = json::array();
    for (const Tensor& p : model.params) {
        tensors.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
        for (const Eigen::MatrixXd* mat : {&p.value, &p.m, &p.v}) {
            for (Eigen::Index r = 0; r < mat->rows(); ++r) {
                for (Eigen::Index c = 0; c < mat->cols(); ++c) flat.push_back((*mat)(r, c));
            }
        }
    }
    {
        std::ofstream out(dpath, std::ios::binary);
        if (!out) throw io_error("cannot write " + dpath.string());
        out.write(reinterpret_cast<const char*>(flat.data()),
                  static_cast<std::streamsize>(flat.size() * sizeof(double)));
    }

    std::uint64_t h = 1469598103934665603ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(flat.data());
    for (std::size_t i = 0; i < flat.size() * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }

    json manifest;
    manifest["version"] = 1;
    manifest["arch"] = model.arch == Arch::gcn ? "gcn" : "sage_mean";
    manifest["in_dim"] = model.in_dim;
    manifest["hidden_dim"] = model.hidden_dim;
    manifest["out_dim"] = model.out_dim;
    manifest["step"] = model.step;
    manifest["init_seed"] = model.init_seed;
    manifest["tensors"] = std::move(tensors);
    manifest["data"] = dpath.filename().string();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    manifest["fnv1a"] = hex;

    std::ofstream out(mpath);
    if (!out) throw io_error("cannot write " + mpath.string());
    out << manifest.dump(2) << "\n";
}

ModelState load_model(const std::string& manifest_path) {
    const fs::path mpath(manifest_path);
    json manifest;
    {
        std::ifstream in(mpath);
        if (!in) throw io_error("cannot open " + mpath.string());
        try {
            in >> manifest;
        } catch (const json::exception& e) {
            throw io_error("bad checkpoint manifest: " + std::string(e.what()));
        }
    }
    if (manifest.at("version").get<int>() != 1) {
        throw io_error("unsupported checkpoint version in " + mpath.string());
    }

    const fs::path dpath = mpath.parent_path() / manifest.at("data").get<std::string>();
    std::ifstream in(dpath, std::ios::binary | std::ios::ate);
    if (!in) throw io_error("cannot open " + dpath.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<double> flat(bytes / sizeof(double));
    in.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw io_error("short read: " + dpath.string());

    std::uint64_t h = 1469598103934665603ULL;
    const auto* raw = reinterpret_cast<const unsigned char*>(flat.data());
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= raw[i];
        h *= 1099511628211ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    if (manifest.at("fnv1a").get<std::string>() != hex) {
        throw io_error("checksum mismatch: " + dpath.string());
    }

    ModelState model;
    model.arch = manifest.at("arch").get<std::string>() == "gcn" ? Arch::gcn : Arch::sage_mean;
    model.in_dim = manifest.at("in_dim").get<std::int32_t>();
    model.hidden_dim = manifest.at("hidden_dim").get<std::int32_t>();
    model.out_dim = manifest.at("out_dim").get<std::int32_t>();
    model.step = manifest.at("step").get<std::int64_t>();
    model.init_seed = manifest.at("init_seed").get<std::uint64_t>();

    std::size_t pos = 0;
    for (const auto& tj : manifest.at("tensors")) {
        Tensor t;
        t.name = tj.at("name").get<std::string>();
        const auto rows = tj.at("rows").get<Eigen::Index>();
        const auto cols = tj.at("cols").get<Eigen::Index>();
        for (Eigen::MatrixXd* mat : {&t.value, &t.m, &t.v}) {
            mat->resize(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    if (pos >= flat.size()) throw io_error("truncated checkpoint data");
                    (*mat)(r, c) = flat[pos++];
                }
            }
        }
        model.params.push_back(std::move(t));
    }
    if (pos != flat.size()) throw io_error("checkpoint data has trailing bytes");
    return model;
}

}  // namespace pignn
