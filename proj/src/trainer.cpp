#include "pignn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pignn/errors.hpp"
#include "pignn/rng.hpp"

using json = nlohmann::json;

namespace pignn {

namespace {

constexpr std::uint64_t kTaskInitStream = 1;
constexpr std::uint64_t kMaskInitStream = 2;

const Eigen::MatrixXd& pair_layer(const ForwardTrace& t, bool on_logits) {
    return on_logits ? t.logits : t.hidden;
}

NegativePolicy resolve_policy(const TrainConfig& cfg, std::int32_t num_nodes) {
    switch (cfg.negative_policy) {
        case NegativePolicyChoice::all_complement:
            return NegativePolicy::all_complement;
        case NegativePolicyChoice::sampled:
            return NegativePolicy::sampled;
        case NegativePolicyChoice::automatic:
            break;
    }
    return num_nodes <= 4000 ? NegativePolicy::all_complement : NegativePolicy::sampled;
}

struct StepResult {
    double pi_loss_value = 0.0;
};

// One optimizer step of a model trained on the pair loss alone.
StepResult step_pi_model(ModelState& model, const Graph& g, const ForwardTrace& trace,
                         const PiLabelSet& labels, const TrainConfig& cfg) {
    const PairWeights ones = PairWeights::all_ones();
    const PiLoss pl =
        pi_loss(pair_layer(trace, cfg.mask_pi_on_logits), labels, ones, cfg.pi_mean);
    const Eigen::MatrixXd none;
    const Gradients grads = cfg.mask_pi_on_logits ? backward(model, g, trace, pl.grad, none)
                                                  : backward(model, g, trace, none, pl.grad);
    adam_step(model, grads, cfg.lr, cfg.weight_decay);
    return {pl.loss};
}

}  // namespace

Method parse_method(const std::string& name) {
    if (name == "vanilla") return Method::vanilla;
    if (name == "pi_no_ue") return Method::pi_no_ue;
    if (name == "pi_gnn") return Method::pi_gnn;
    if (name == "pi_task_self") return Method::pi_task_self;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected vanilla|pi_no_ue|pi_gnn|pi_task_self)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::vanilla: return "vanilla";
        case Method::pi_no_ue: return "pi_no_ue";
        case Method::pi_gnn: return "pi_gnn";
        case Method::pi_task_self: return "pi_task_self";
    }
    return "?";
}

void apply_method(TrainConfig& cfg, Method m) {
    switch (m) {
        case Method::vanilla:
            cfg.beta = BetaConfig{false, 0.0};
            cfg.mask_mode = MaskMode::none;
            break;
        case Method::pi_no_ue:
            cfg.mask_mode = MaskMode::none;
            break;
        case Method::pi_gnn:
            cfg.mask_mode = MaskMode::generator;
            break;
        case Method::pi_task_self:
            cfg.mask_mode = MaskMode::task_self;
            break;
    }
}

void validate(const TrainConfig& cfg) {
    if (cfg.total_epochs < 1) throw std::invalid_argument("total_epochs must be >= 1");
    if (cfg.pretrain_epochs < 0 || cfg.pretrain_epochs > cfg.total_epochs) {
        throw std::invalid_argument("pretrain_epochs must lie in [0, total_epochs]");
    }
    if (!cfg.beta.auto_sparsity && cfg.beta.value < 0.0) {
        throw std::invalid_argument("beta must be >= 0");
    }
    if (cfg.lr <= 0.0) throw std::invalid_argument("lr must be > 0");
    if (cfg.weight_decay < 0.0) throw std::invalid_argument("weight_decay must be >= 0");
    if (cfg.hidden_task < 1 || cfg.hidden_mask < 1) {
        throw std::invalid_argument("hidden dims must be >= 1");
    }
}

double beta_prime(std::int64_t num_nodes, std::int64_t num_edges) {
    const double vv = static_cast<double>(num_nodes) * static_cast<double>(num_nodes);
    const double denom = vv - static_cast<double>(num_edges);
    if (denom <= 0.0) {
        throw std::invalid_argument("beta_prime: |V|^2 must exceed the edge count");
    }
    return vv / (denom * denom);
}

PairWeights confidence_mask(const Eigen::MatrixXd& embeddings, const PiLabelSet& labels) {
    const std::int32_t n = labels.num_nodes;
    if (embeddings.rows() != n) {
        throw std::invalid_argument("confidence_mask: embedding rows mismatch");
    }
    PairWeights w;
    if (labels.policy == NegativePolicy::all_complement) {
        w.mode = PairWeights::Mode::dense;
        Eigen::MatrixXd s(n, n);
        s.noalias() = embeddings * embeddings.transpose();
        // Negative pairs score 1 - sigma; positives overwrite with sigma.
        w.dense = (1.0 - (((-s.array()).exp() + 1.0).inverse())).matrix();
        w.dense.diagonal().setZero();
        for (const auto& [i, j] : labels.positives) {
            const double sig = 1.0 / (1.0 + std::exp(-s(i, j)));
            w.dense(i, j) = sig;
            w.dense(j, i) = sig;
        }
    } else {
        w.mode = PairWeights::Mode::per_pair;
        w.per_pair.resize(static_cast<Eigen::Index>(labels.num_scored_pairs()));
        Eigen::Index idx = 0;
        for (const auto& [i, j] : labels.positives) {
            const double s = embeddings.row(i).dot(embeddings.row(j));
            w.per_pair(idx++) = 1.0 / (1.0 + std::exp(-s));
        }
        for (const auto& [i, j] : labels.sampled_negatives) {
            const double s = embeddings.row(i).dot(embeddings.row(j));
            w.per_pair(idx++) = 1.0 - 1.0 / (1.0 + std::exp(-s));
        }
    }
    return w;
}

PiLabelSet build_pi_labels(const Dataset& ds, const std::vector<std::int32_t>& corrupted,
                           const TrainConfig& cfg) {
    const NegativePolicy policy = resolve_policy(cfg, ds.graph.num_nodes());
    const std::uint64_t seed = derive_stream(cfg.seed, 0x706c6273ULL);
    switch (cfg.pi_source) {
        case PiSource::adjacency:
            return pi_labels_from_adjacency(ds.graph, policy, cfg.negatives_per_positive, seed);
        case PiSource::label_comparison: {
            std::vector<std::int32_t> seeds(ds.clean_labels.size(), -1);
            for (std::size_t v = 0; v < seeds.size(); ++v) {
                if (ds.split.roles[v] == Role::train) seeds[v] = corrupted[v];
            }
            const auto propagated =
                label_propagation(ds.graph, seeds, ds.num_classes);
            return pi_labels_from_label_comparison(propagated, policy,
                                                   cfg.negatives_per_positive, seed);
        }
        case PiSource::random: {
            double density = cfg.random_pi_density;
            if (density < 0.0) {
                const auto pairs = static_cast<double>(ds.graph.num_nodes()) *
                                   (ds.graph.num_nodes() - 1) / 2.0;
                density = pairs > 0 ? static_cast<double>(ds.graph.num_edges()) / pairs : 0.0;
            }
            return pi_labels_random(ds.graph.num_nodes(), density, seed, policy,
                                    cfg.negatives_per_positive);
        }
    }
    throw std::invalid_argument("build_pi_labels: bad source");
}

TrainOutput train(const Dataset& ds, const std::vector<std::int32_t>& corrupted,
                  const TrainConfig& cfg, const PairWeights* fixed_pi_weights) {
    validate(cfg);
    if (corrupted.size() != ds.clean_labels.size()) {
        throw std::invalid_argument("train: corrupted label size mismatch");
    }
    const auto t_start = std::chrono::steady_clock::now();
    const Graph& g = ds.graph;
    const auto train_nodes = ds.split.nodes_with(Role::train);
    const auto val_nodes = ds.split.nodes_with(Role::val);
    const auto test_nodes = ds.split.nodes_with(Role::test);
    if (train_nodes.empty()) throw std::invalid_argument("train: empty train split");

    const double beta = cfg.beta.auto_sparsity ? beta_prime(g.num_nodes(), g.num_edges())
                                               : cfg.beta.value;
    const bool task_uses_pi = beta > 0.0;
    const bool needs_labels =
        task_uses_pi || cfg.mask_mode == MaskMode::generator || fixed_pi_weights != nullptr;

    PiLabelSet labels;
    if (needs_labels) labels = build_pi_labels(ds, corrupted, cfg);

    TrainOutput out;
    out.task_model = init_model(cfg.arch_task, g.feature_dim(), cfg.hidden_task, ds.num_classes,
                                derive_stream(cfg.seed, kTaskInitStream));
    if (cfg.mask_mode == MaskMode::generator) {
        out.mask_model = init_model(cfg.arch_mask, g.feature_dim(), cfg.hidden_mask,
                                    ds.num_classes, derive_stream(cfg.seed, kMaskInitStream));
    }

    RunResult& res = out.result;
    res.config = cfg;
    res.beta_used = beta;
    res.epochs.reserve(static_cast<std::size_t>(cfg.total_epochs));

    const PairWeights ones = PairWeights::all_ones();
    for (std::int32_t epoch = 0; epoch < cfg.total_epochs; ++epoch) {
        try {
        const ForwardTrace trace_t = forward(out.task_model, g);
        std::optional<ForwardTrace> trace_m;
        if (out.mask_model) trace_m = forward(*out.mask_model, g);

        // Pair weights for this epoch, from pre-update embeddings. The
        // generator's confidence is read at its own scoring layer; a
        // task_self mask is read at the layer the task model's pair term
        // acts on.
        const bool pretraining = epoch <= cfg.pretrain_epochs;
        const PairWeights* weights = &ones;
        PairWeights mask_weights;
        if (fixed_pi_weights != nullptr) {
            weights = fixed_pi_weights;
        } else if (!pretraining && task_uses_pi && cfg.mask_mode == MaskMode::generator) {
            mask_weights =
                confidence_mask(pair_layer(*trace_m, cfg.mask_pi_on_logits), labels);
            weights = &mask_weights;
        } else if (!pretraining && task_uses_pi && cfg.mask_mode == MaskMode::task_self) {
            mask_weights =
                confidence_mask(pair_layer(trace_t, cfg.task_pi_on_logits), labels);
            weights = &mask_weights;
        }

        // Task model: classification loss plus the weighted pair loss.
        const LossGrad ce = cross_entropy(trace_t.logits, corrupted, train_nodes);
        double pi_loss_t = 0.0;
        Eigen::MatrixXd grad_logits = ce.grad;
        Eigen::MatrixXd grad_emb;
        if (task_uses_pi) {
            const PiLoss pl = pi_loss(pair_layer(trace_t, cfg.task_pi_on_logits), labels,
                                      *weights, cfg.pi_mean);
            pi_loss_t = pl.loss;
            if (cfg.task_pi_on_logits) {
                grad_logits.noalias() += beta * pl.grad;
            } else {
                grad_emb = beta * pl.grad;
            }
        }
        if (!std::isfinite(ce.loss) || !std::isfinite(pi_loss_t)) {
            throw divergence_error("non-finite training loss");
        }
        const Gradients grads_t = backward(out.task_model, g, trace_t, grad_logits, grad_emb);
        adam_step(out.task_model, grads_t, cfg.lr, cfg.weight_decay);

        // Mask generator: unweighted pair loss only, stepped after the task
        // model, never touching class labels.
        double pi_loss_m = 0.0;
        if (out.mask_model) {
            const StepResult sr = step_pi_model(*out.mask_model, g, *trace_m, labels, cfg);
            pi_loss_m = sr.pi_loss_value;
            if (!std::isfinite(pi_loss_m)) {
                throw divergence_error("non-finite mask generator loss");
            }
        }

        EpochLog log;
        log.epoch = epoch;
        log.loss_cls = ce.loss;
        log.loss_pi_weighted = pi_loss_t;
        log.loss_pi_mask = pi_loss_m;
        log.acc_train = accuracy(trace_t.logits, ds.clean_labels, train_nodes);
        log.acc_val = val_nodes.empty() ? 0.0
                                        : accuracy(trace_t.logits, ds.clean_labels, val_nodes);
        log.acc_test = test_nodes.empty() ? 0.0
                                          : accuracy(trace_t.logits, ds.clean_labels, test_nodes);
        log.mean_mask = task_uses_pi || fixed_pi_weights ? weights->mean(labels) : 1.0;
        res.epochs.push_back(log);
        } catch (const divergence_error& e) {
            throw divergence_error("epoch " + std::to_string(epoch) + ": " + e.what());
        }
    }

    const ForwardTrace final_trace = forward(out.task_model, g);
    res.final_train_acc = accuracy(final_trace.logits, ds.clean_labels, train_nodes);
    res.final_val_acc =
        val_nodes.empty() ? 0.0 : accuracy(final_trace.logits, ds.clean_labels, val_nodes);
    res.final_test_acc =
        test_nodes.empty() ? 0.0 : accuracy(final_trace.logits, ds.clean_labels, test_nodes);

    res.best_val_epoch = 0;
    res.best_val_acc = 0.0;
    res.test_acc_at_best_val = res.final_test_acc;
    for (const EpochLog& log : res.epochs) {
        if (log.acc_val > res.best_val_acc) {
            res.best_val_acc = log.acc_val;
            res.best_val_epoch = log.epoch;
            res.test_acc_at_best_val = log.acc_test;
        }
    }

    if (!cfg.deterministic) {
        res.wall_clock_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    }
    return out;
}

ModelState train_pi_only(const Dataset& ds, const PiLabelSet& labels, const TrainConfig& cfg) {
    validate(cfg);
    ModelState model = init_model(cfg.arch_mask, ds.graph.feature_dim(), cfg.hidden_mask,
                                  ds.num_classes, derive_stream(cfg.seed, kMaskInitStream));
    for (std::int32_t epoch = 0; epoch < cfg.total_epochs; ++epoch) {
        try {
            const ForwardTrace trace = forward(model, ds.graph);
            const StepResult sr = step_pi_model(model, ds.graph, trace, labels, cfg);
            if (!std::isfinite(sr.pi_loss_value)) {
                throw divergence_error("non-finite mask generator loss");
            }
        } catch (const divergence_error& e) {
            throw divergence_error("epoch " + std::to_string(epoch) + ": " + e.what());
        }
    }
    return model;
}

double evaluate(const ModelState& model, const Dataset& ds, Role role) {
    const auto nodes = ds.split.nodes_with(role);
    if (nodes.empty()) throw std::invalid_argument("evaluate: no nodes with the requested role");
    const ForwardTrace trace = forward(model, ds.graph);
    return accuracy(trace.logits, ds.clean_labels, nodes);
}

MaskReport mask_analysis(const ModelState& mask_model, const Dataset& ds,
                         const std::vector<std::int32_t>& corrupted, const PiLabelSet& labels,
                         const TrainConfig& cfg, bool run_comparison) {
    const ForwardTrace trace = forward(mask_model, ds.graph);
    const PairWeights mask =
        confidence_mask(pair_layer(trace, cfg.mask_pi_on_logits), labels);

    MaskReport report;
    report.histogram.assign(64, 0);
    std::vector<double> values;
    if (mask.mode == PairWeights::Mode::dense) {
        const std::int32_t n = labels.num_nodes;
        values.reserve(static_cast<std::size_t>(labels.total_pairs()));
        for (std::int32_t i = 0; i < n; ++i) {
            for (std::int32_t j = i + 1; j < n; ++j) values.push_back(mask.dense(i, j));
        }
    } else {
        values.assign(mask.per_pair.data(), mask.per_pair.data() + mask.per_pair.size());
    }
    double sum = 0.0;
    for (const double v : values) {
        const auto bin = std::min<std::int64_t>(63, static_cast<std::int64_t>(v * 64.0));
        ++report.histogram[static_cast<std::size_t>(std::max<std::int64_t>(0, bin))];
        sum += v;
    }
    report.mask_mean = values.empty() ? 0.0 : sum / static_cast<double>(values.size());

    if (!run_comparison) return report;

    std::vector<double> sorted = values;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];

    auto binary_weights = [&](bool top) {
        PairWeights w;
        if (mask.mode == PairWeights::Mode::dense) {
            w.mode = PairWeights::Mode::dense;
            if (top) {
                w.dense = (mask.dense.array() >= median).cast<double>().matrix();
            } else {
                w.dense = (mask.dense.array() < median).cast<double>().matrix();
            }
            w.dense.diagonal().setZero();
        } else {
            w.mode = PairWeights::Mode::per_pair;
            if (top) {
                w.per_pair = (mask.per_pair.array() >= median).cast<double>().matrix();
            } else {
                w.per_pair = (mask.per_pair.array() < median).cast<double>().matrix();
            }
        }
        return w;
    };

    TrainConfig aux = cfg;
    aux.mask_mode = MaskMode::none;
    const PairWeights top = binary_weights(true);
    const PairWeights bottom = binary_weights(false);
    report.top_half_acc = train(ds, corrupted, aux, &top).result.final_test_acc;
    report.bottom_half_acc = train(ds, corrupted, aux, &bottom).result.final_test_acc;
    report.compared = true;
    return report;
}

std::string run_result_to_json(const RunResult& r, int indent) {
    const TrainConfig& c = r.config;
    json cfg;
    cfg["total_epochs"] = c.total_epochs;
    cfg["pretrain_epochs"] = c.pretrain_epochs;
    cfg["beta"] = c.beta.auto_sparsity ? json("auto") : json(c.beta.value);
    cfg["lr"] = c.lr;
    cfg["weight_decay"] = c.weight_decay;
    cfg["arch_task"] = c.arch_task == Arch::gcn ? "gcn" : "sage_mean";
    cfg["arch_mask"] = c.arch_mask == Arch::gcn ? "gcn" : "sage_mean";
    cfg["hidden_task"] = c.hidden_task;
    cfg["hidden_mask"] = c.hidden_mask;
    switch (c.pi_source) {
        case PiSource::adjacency: cfg["pi_source"] = "adjacency"; break;
        case PiSource::label_comparison: cfg["pi_source"] = "label_comparison"; break;
        case PiSource::random: cfg["pi_source"] = "random"; break;
    }
    switch (c.mask_mode) {
        case MaskMode::generator: cfg["mask_mode"] = "generator"; break;
        case MaskMode::task_self: cfg["mask_mode"] = "task_self"; break;
        case MaskMode::none: cfg["mask_mode"] = "none"; break;
    }
    cfg["pi_embeddings"] = c.task_pi_on_logits ? "logits" : "hidden";
    cfg["mask_embeddings"] = c.mask_pi_on_logits ? "logits" : "hidden";
    cfg["pi_mean"] = c.pi_mean;
    cfg["seed"] = c.seed;
    cfg["deterministic"] = c.deterministic;

    json epochs = json::array();
    for (const EpochLog& e : r.epochs) {
        epochs.push_back({{"epoch", e.epoch},
                          {"loss_cls", e.loss_cls},
                          {"loss_pi_weighted", e.loss_pi_weighted},
                          {"loss_pi_mask", e.loss_pi_mask},
                          {"acc_train", e.acc_train},
                          {"acc_val", e.acc_val},
                          {"acc_test", e.acc_test},
                          {"mean_mask", e.mean_mask}});
    }

    json j;
    j["config"] = std::move(cfg);
    j["beta_used"] = r.beta_used;
    j["epochs"] = std::move(epochs);
    j["final_train_acc"] = r.final_train_acc;
    j["final_val_acc"] = r.final_val_acc;
    j["final_test_acc"] = r.final_test_acc;
    j["best_val_epoch"] = r.best_val_epoch;
    j["best_val_acc"] = r.best_val_acc;
    j["test_acc_at_best_val"] = r.test_acc_at_best_val;
    j["wall_clock_sec"] = r.wall_clock_sec;
    return j.dump(indent);
}

}  // namespace pignn
