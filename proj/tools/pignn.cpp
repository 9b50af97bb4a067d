// Command-line front end: dataset preparation, noise injection, single
// training runs, multi-seed sweeps, and confidence-mask reports.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pignn/dataset.hpp"
#include "pignn/errors.hpp"
#include "pignn/noise.hpp"
#include "pignn/rng.hpp"
#include "pignn/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pignn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitIo = 3;

struct NoiseSpec {
    NoiseKind kind = NoiseKind::symmetric;
    double eps = 0.0;
};

NoiseSpec parse_noise(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("noise spec must be kind:eps, e.g. sym:0.6");
    }
    const std::string kind = text.substr(0, colon);
    NoiseSpec spec;
    if (kind == "sym" || kind == "symmetric") {
        spec.kind = NoiseKind::symmetric;
    } else if (kind == "pair" || kind == "pair_flip" || kind == "asym" || kind == "asymmetric") {
        spec.kind = NoiseKind::pair_flip;
    } else {
        throw std::invalid_argument("unknown noise kind '" + kind + "'");
    }
    spec.eps = std::stod(text.substr(colon + 1));
    return spec;
}

std::string noise_kind_name(NoiseKind k) {
    return k == NoiseKind::symmetric ? "symmetric" : "pair_flip";
}

TransitionMatrix make_matrix(const NoiseSpec& spec, std::int32_t num_classes) {
    return spec.kind == NoiseKind::symmetric ? symmetric_matrix(num_classes, spec.eps)
                                             : pair_flip_matrix(num_classes, spec.eps);
}

Arch parse_arch(const std::string& name) {
    if (name == "gcn") return Arch::gcn;
    if (name == "sage_mean" || name == "sage") return Arch::sage_mean;
    throw std::invalid_argument("unknown architecture '" + name + "' (gcn|sage_mean)");
}

PiSource parse_pi_source(const std::string& name) {
    if (name == "adjacency") return PiSource::adjacency;
    if (name == "label_comparison") return PiSource::label_comparison;
    if (name == "random") return PiSource::random;
    throw std::invalid_argument("unknown pi source '" + name +
                                "' (adjacency|label_comparison|random)");
}

NegativePolicyChoice parse_neg_policy(const std::string& name) {
    if (name == "auto") return NegativePolicyChoice::automatic;
    if (name == "all") return NegativePolicyChoice::all_complement;
    if (name == "sampled") return NegativePolicyChoice::sampled;
    throw std::invalid_argument("unknown negative policy '" + name + "' (auto|all|sampled)");
}

bool parse_pi_embeddings(const std::string& name) {
    if (name == "logits") return true;
    if (name == "hidden") return false;
    throw std::invalid_argument("unknown pair-embedding layer '" + name + "' (logits|hidden)");
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("PIGNN_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 1;
}

// Training flags shared by run / sweep / mask-report. Only flags the user
// actually passed override the config (so sweep spec files win otherwise).
struct TrainFlags {
    std::int32_t epochs = 400;
    std::int32_t pretrain = 50;
    std::string beta = "auto";
    double lr = 0.01;
    double weight_decay = 5e-4;
    std::string arch = "gcn";
    std::string mask_arch;
    std::int32_t hidden = 0;
    std::int32_t mask_hidden = 0;
    std::string pi_source = "adjacency";
    double pi_random_density = -1.0;
    std::string neg_policy = "auto";
    std::int32_t neg_per_pos = 5;
    bool pi_mean = false;
    std::string pi_embeddings = "hidden";
    std::string mask_embeddings = "logits";

    CLI::Option* o_epochs = nullptr;
    CLI::Option* o_pretrain = nullptr;
    CLI::Option* o_beta = nullptr;
    CLI::Option* o_lr = nullptr;
    CLI::Option* o_wd = nullptr;
    CLI::Option* o_arch = nullptr;
    CLI::Option* o_mask_arch = nullptr;
    CLI::Option* o_hidden = nullptr;
    CLI::Option* o_mask_hidden = nullptr;
    CLI::Option* o_pi_source = nullptr;
    CLI::Option* o_density = nullptr;
    CLI::Option* o_neg_policy = nullptr;
    CLI::Option* o_neg_per_pos = nullptr;
    CLI::Option* o_pi_mean = nullptr;
    CLI::Option* o_pi_embeddings = nullptr;
    CLI::Option* o_mask_embeddings = nullptr;

    void attach(CLI::App* cmd) {
        o_epochs = cmd->add_option("--epochs", epochs, "total training epochs");
        o_pretrain = cmd->add_option("--pretrain", pretrain, "mask pretraining epochs");
        o_beta = cmd->add_option("--beta", beta, "pair-loss weight: 'auto' or a number");
        o_lr = cmd->add_option("--lr", lr, "Adam learning rate");
        o_wd = cmd->add_option("--weight-decay", weight_decay, "L2 strength");
        o_arch = cmd->add_option("--arch", arch, "task model architecture (gcn|sage_mean)");
        o_mask_arch = cmd->add_option("--mask-arch", mask_arch,
                                      "mask generator architecture (defaults to --arch)");
        o_hidden = cmd->add_option("--hidden", hidden, "task hidden dim (default per arch)");
        o_mask_hidden = cmd->add_option("--mask-hidden", mask_hidden, "mask hidden dim");
        o_pi_source = cmd->add_option("--pi-source", pi_source,
                                      "pair labels: adjacency|label_comparison|random");
        o_density = cmd->add_option("--pi-random-density", pi_random_density,
                                    "positive density for random pair labels");
        o_neg_policy = cmd->add_option("--neg-policy", neg_policy,
                                       "negative pairs: auto|all|sampled");
        o_neg_per_pos = cmd->add_option("--neg-per-pos", neg_per_pos,
                                        "sampled negatives per positive");
        o_pi_mean = cmd->add_flag("--pi-mean", pi_mean, "average the pair loss over pairs");
        o_pi_embeddings = cmd->add_option(
            "--pi-embeddings", pi_embeddings, "task model layer scored for pairs: hidden|logits");
        o_mask_embeddings = cmd->add_option("--mask-embeddings", mask_embeddings,
                                            "mask generator layer scored for pairs");
    }

    void apply(TrainConfig& cfg) const {
        auto set_beta = [&](const std::string& text) {
            if (text == "auto") {
                cfg.beta = BetaConfig{true, 0.0};
            } else {
                cfg.beta = BetaConfig{false, std::stod(text)};
            }
        };
        if (o_epochs->count()) cfg.total_epochs = epochs;
        if (o_pretrain->count()) {
            cfg.pretrain_epochs = pretrain;
        } else {
            // The stock pretrain count only makes sense against the stock
            // epoch budget; scale the default down with a shorter run.
            cfg.pretrain_epochs = std::min(cfg.pretrain_epochs, cfg.total_epochs);
        }
        if (o_beta->count()) set_beta(beta);
        if (o_lr->count()) cfg.lr = lr;
        if (o_wd->count()) cfg.weight_decay = weight_decay;
        if (o_arch->count()) cfg.arch_task = parse_arch(arch);
        cfg.arch_mask = o_mask_arch->count() ? parse_arch(mask_arch) : cfg.arch_task;
        cfg.hidden_task = o_hidden->count() ? hidden : default_hidden_dim(cfg.arch_task);
        cfg.hidden_mask = o_mask_hidden->count() ? mask_hidden : default_hidden_dim(cfg.arch_mask);
        if (o_pi_source->count()) cfg.pi_source = parse_pi_source(pi_source);
        if (o_density->count()) cfg.random_pi_density = pi_random_density;
        if (o_neg_policy->count()) cfg.negative_policy = parse_neg_policy(neg_policy);
        if (o_neg_per_pos->count()) cfg.negatives_per_positive = neg_per_pos;
        if (o_pi_mean->count()) cfg.pi_mean = pi_mean;
        if (o_pi_embeddings->count()) cfg.task_pi_on_logits = parse_pi_embeddings(pi_embeddings);
        if (o_mask_embeddings->count()) {
            cfg.mask_pi_on_logits = parse_pi_embeddings(mask_embeddings);
        }
    }
};

TrainConfig config_from_json(const json& j) {
    TrainConfig cfg;
    if (j.contains("epochs")) cfg.total_epochs = j.at("epochs").get<std::int32_t>();
    if (j.contains("pretrain")) cfg.pretrain_epochs = j.at("pretrain").get<std::int32_t>();
    if (j.contains("beta")) {
        if (j.at("beta").is_string()) {
            if (j.at("beta").get<std::string>() != "auto") {
                throw std::invalid_argument("beta must be 'auto' or a number");
            }
            cfg.beta = BetaConfig{true, 0.0};
        } else {
            cfg.beta = BetaConfig{false, j.at("beta").get<double>()};
        }
    }
    if (j.contains("lr")) cfg.lr = j.at("lr").get<double>();
    if (j.contains("weight_decay")) cfg.weight_decay = j.at("weight_decay").get<double>();
    if (j.contains("arch")) cfg.arch_task = parse_arch(j.at("arch").get<std::string>());
    cfg.arch_mask = j.contains("mask_arch") ? parse_arch(j.at("mask_arch").get<std::string>())
                                            : cfg.arch_task;
    cfg.hidden_task = j.contains("hidden") ? j.at("hidden").get<std::int32_t>()
                                           : default_hidden_dim(cfg.arch_task);
    cfg.hidden_mask = j.contains("mask_hidden") ? j.at("mask_hidden").get<std::int32_t>()
                                                : default_hidden_dim(cfg.arch_mask);
    if (j.contains("pi_source")) cfg.pi_source = parse_pi_source(j.at("pi_source").get<std::string>());
    if (j.contains("pi_random_density")) cfg.random_pi_density = j.at("pi_random_density").get<double>();
    if (j.contains("neg_policy")) cfg.negative_policy = parse_neg_policy(j.at("neg_policy").get<std::string>());
    if (j.contains("neg_per_pos")) cfg.negatives_per_positive = j.at("neg_per_pos").get<std::int32_t>();
    if (j.contains("pi_mean")) cfg.pi_mean = j.at("pi_mean").get<bool>();
    if (j.contains("pi_embeddings")) {
        cfg.task_pi_on_logits = parse_pi_embeddings(j.at("pi_embeddings").get<std::string>());
    }
    if (j.contains("mask_embeddings")) {
        cfg.mask_pi_on_logits = parse_pi_embeddings(j.at("mask_embeddings").get<std::string>());
    }
    return cfg;
}

std::vector<std::int32_t> corrupted_for(const RunInputs& inputs,
                                        const std::optional<NoiseSpec>& noise,
                                        std::uint64_t run_seed, bool clean_val) {
    if (noise) {
        const TransitionMatrix q = make_matrix(*noise, inputs.dataset.num_classes);
        return corrupt_labels(inputs.dataset.clean_labels, q, inputs.dataset.split,
                              derive_stream(run_seed, kNoiseSeedStream), clean_val);
    }
    if (!inputs.corrupted_labels.empty()) return inputs.corrupted_labels;
    return inputs.dataset.clean_labels;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << text;
    if (!out) throw io_error("short write: " + path);
}

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_cell(double mean, double stddev) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f(%.2f)", mean, stddev);
    return buf;
}

// ---------------------------------------------------------------- prepare

int cmd_prepare(const std::vector<std::string>& sbm_kv, const std::string& content,
                const std::string& cites, const std::string& split_file,
                std::int32_t train_k, std::int32_t val_k,
                const std::string& noise_text, std::uint64_t noise_seed, bool clean_val,
                const std::string& out_dir) {
    Dataset ds;
    std::map<std::string, std::uint64_t> seeds;
    if (!sbm_kv.empty()) {
        SbmSpec spec;
        for (const std::string& kv : sbm_kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("--sbm expects key=value, got '" + kv + "'");
            }
            const std::string key = kv.substr(0, eq);
            const std::string val = kv.substr(eq + 1);
            if (key == "blocks") spec.num_blocks = std::stoi(val);
            else if (key == "size") spec.block_size = std::stoi(val);
            else if (key == "p-in" || key == "p_in") spec.p_in = std::stod(val);
            else if (key == "p-out" || key == "p_out") spec.p_out = std::stod(val);
            else if (key == "dim") spec.feature_dim = std::stoi(val);
            else if (key == "signal") spec.feature_signal = std::stod(val);
            else if (key == "seed") spec.rng_seed = std::strtoull(val.c_str(), nullptr, 10);
            else throw std::invalid_argument("unknown --sbm key '" + key + "'");
        }
        ds = generate_sbm(spec);
        seeds["sbm"] = spec.rng_seed;
    } else if (!content.empty() && !cites.empty()) {
        ds = load_raw_citation(content, cites);
        if (ds.dropped_edges > 0) {
            std::cerr << "[prepare] dropped " << ds.dropped_edges
                      << " edge rows with unknown node ids\n";
        }
    } else {
        throw std::invalid_argument("prepare needs either --sbm or --content/--cites");
    }

    if (!split_file.empty()) {
        std::ifstream in(split_file);
        if (!in) throw io_error("cannot open " + split_file);
        json j;
        in >> j;
        ds.split = make_split_explicit(
            ds.graph.num_nodes(), j.at("train").get<std::vector<std::int32_t>>(),
            j.value("val", std::vector<std::int32_t>{}),
            j.value("test", std::vector<std::int32_t>{}));
    } else {
        ds.split = make_split_per_class(ds.clean_labels, ds.num_classes, train_k, val_k);
    }

    std::vector<std::int32_t> corrupted;
    if (!noise_text.empty()) {
        const NoiseSpec spec = parse_noise(noise_text);
        const TransitionMatrix q = make_matrix(spec, ds.num_classes);
        corrupted = corrupt_labels(ds.clean_labels, q, ds.split, noise_seed, clean_val);
        seeds["noise"] = noise_seed;
    }

    save_run_inputs(ds, corrupted, out_dir, seeds);
    std::cerr << "[prepare] " << ds.name << ": " << ds.graph.num_nodes() << " nodes, "
              << ds.graph.num_edges() << " undirected edges, " << ds.num_classes
              << " classes\n";
    std::cout << (fs::path(out_dir) / "manifest.json").string() << "\n";
    return kExitOk;
}

// -------------------------------------------------------------------- run

int cmd_run(const std::string& data, const std::string& method_name_arg,
            const std::string& noise_text, bool clean_val, std::uint64_t seed,
            bool deterministic, const TrainFlags& flags, const std::string& out_path,
            const std::string& save_task, const std::string& save_mask) {
    const RunInputs inputs = load_run_inputs(data);

    TrainConfig cfg;
    cfg.seed = seed;
    cfg.deterministic = deterministic;
    flags.apply(cfg);
    apply_method(cfg, parse_method(method_name_arg));
    validate(cfg);

    std::optional<NoiseSpec> noise;
    if (!noise_text.empty()) noise = parse_noise(noise_text);
    const auto corrupted = corrupted_for(inputs, noise, seed, clean_val);

    std::cerr << "[run] " << inputs.dataset.name << " method=" << method_name_arg
              << " noise=" << (noise ? noise_text : std::string("none")) << " seed=" << seed
              << "\n";
    const TrainOutput out = train(inputs.dataset, corrupted, cfg);
    std::cerr << "[run] final test acc " << out.result.final_test_acc << "\n";

    if (!save_task.empty()) save_model(out.task_model, save_task);
    if (!save_mask.empty()) {
        if (!out.mask_model) {
            throw std::invalid_argument("--save-mask-model needs a method with a mask generator");
        }
        save_model(*out.mask_model, save_mask);
    }
    write_text(out_path, run_result_to_json(out.result) + "\n");
    return kExitOk;
}

// ------------------------------------------------------------------ sweep

struct SweepRow {
    Method method;
    NoiseSpec noise;
};

struct CellResult {
    bool ok = false;
    double acc = 0.0;
    double acc_best_val = 0.0;
    std::string error;
};

int cmd_sweep(const std::string& spec_path, std::int32_t jobs, bool deterministic,
              const TrainFlags& flags, const std::string& out_csv,
              const std::string& out_json) {
    json spec;
    {
        std::ifstream in(spec_path);
        if (!in) throw io_error("cannot open " + spec_path);
        try {
            in >> spec;
        } catch (const json::exception& e) {
            throw std::invalid_argument("bad sweep spec: " + std::string(e.what()));
        }
    }

    const RunInputs inputs = load_run_inputs(spec.at("dataset").get<std::string>());
    const Dataset& ds = inputs.dataset;
    // Warm the cached graph operators before sharing across workers.
    ds.graph.normalized_features();
    ds.graph.neighbor_mean_features();

    TrainConfig base = spec.contains("train") ? config_from_json(spec.at("train"))
                                              : TrainConfig{};
    flags.apply(base);
    base.deterministic = deterministic;
    const bool clean_val = spec.value("clean_val", false);

    std::vector<Method> methods;
    for (const auto& m : spec.at("methods")) methods.push_back(parse_method(m.get<std::string>()));
    if (methods.empty()) throw std::invalid_argument("sweep spec has no methods");

    std::vector<NoiseSpec> noises;
    for (const auto& block : spec.at("noise")) {
        NoiseSpec ns;
        ns.kind = parse_noise(block.at("kind").get<std::string>() + ":0").kind;
        for (const auto& e : block.at("eps")) {
            ns.eps = e.get<double>();
            noises.push_back(ns);
        }
    }
    if (noises.empty()) throw std::invalid_argument("sweep spec has no noise grid");

    std::vector<std::uint64_t> seeds;
    if (spec.contains("seeds")) {
        for (const auto& s : spec.at("seeds")) seeds.push_back(s.get<std::uint64_t>());
    } else {
        for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) throw std::invalid_argument("sweep spec has no seeds");

    std::vector<SweepRow> rows;
    for (const Method m : methods) {
        for (const NoiseSpec& ns : noises) rows.push_back({m, ns});
    }

    const std::size_t num_cells = rows.size() * seeds.size();
    std::vector<CellResult> cells(num_cells);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= num_cells) return;
            const SweepRow& row = rows[idx / seeds.size()];
            const std::uint64_t seed = seeds[idx % seeds.size()];
            TrainConfig cfg = base;
            cfg.seed = seed;
            apply_method(cfg, row.method);
            CellResult& cell = cells[idx];
            try {
                validate(cfg);
                TransitionMatrix q = make_matrix(row.noise, ds.num_classes);
                const auto corrupted =
                    row.noise.eps == 0.0
                        ? ds.clean_labels
                        : corrupt_labels(ds.clean_labels, q, ds.split,
                                         derive_stream(seed, kNoiseSeedStream), clean_val);
                const TrainOutput out = train(ds, corrupted, cfg);
                cell.ok = true;
                cell.acc = out.result.final_test_acc;
                cell.acc_best_val = out.result.test_acc_at_best_val;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            std::lock_guard<std::mutex> lock(log_mutex);
            std::cerr << "[sweep] " << method_name(row.method) << " "
                      << noise_kind_name(row.noise.kind) << ":" << row.noise.eps << " seed "
                      << seed << (cell.ok ? " acc " + format_g(cell.acc) : " FAILED: " + cell.error)
                      << "\n";
        }
    };

    if (jobs < 1) jobs = 1;
    std::vector<std::thread> pool;
    for (std::int32_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << "dataset,method,noise_kind,eps,mean_acc,std_acc,cell,num_seeds,per_seed_acc\n";
    json jout;
    jout["dataset"] = ds.name;
    jout["cells"] = json::array();
    std::size_t failures = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<double> accs;
        json cell_seeds = json::array(), cell_accs = json::array(), cell_fail = json::array();
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const CellResult& cell = cells[r * seeds.size() + s];
            if (cell.ok) {
                accs.push_back(cell.acc);
                cell_seeds.push_back(seeds[s]);
                cell_accs.push_back(cell.acc);
            } else {
                ++failures;
                cell_fail.push_back({{"seed", seeds[s]}, {"error", cell.error}});
            }
        }
        double mean = 0.0, stddev = 0.0;
        for (const double a : accs) mean += a;
        if (!accs.empty()) mean /= static_cast<double>(accs.size());
        for (const double a : accs) stddev += (a - mean) * (a - mean);
        if (!accs.empty()) stddev = std::sqrt(stddev / static_cast<double>(accs.size()));

        std::string per_seed;
        for (std::size_t i = 0; i < accs.size(); ++i) {
            if (i) per_seed += ";";
            per_seed += format_g(accs[i]);
        }
        csv << ds.name << "," << method_name(rows[r].method) << ","
            << noise_kind_name(rows[r].noise.kind) << "," << format_g(rows[r].noise.eps) << ","
            << format_g(mean) << "," << format_g(stddev) << "," << format_cell(mean, stddev)
            << "," << accs.size() << "," << per_seed << "\n";
        jout["cells"].push_back({{"method", method_name(rows[r].method)},
                                 {"noise_kind", noise_kind_name(rows[r].noise.kind)},
                                 {"eps", rows[r].noise.eps},
                                 {"seeds", cell_seeds},
                                 {"accs", cell_accs},
                                 {"failures", cell_fail},
                                 {"mean", mean},
                                 {"std", stddev}});
    }
    write_text(out_csv, csv.str());
    if (!out_json.empty()) write_text(out_json, jout.dump(2) + "\n");
    if (failures == num_cells) {
        std::cerr << "[sweep] every cell failed\n";
        return kExitDiverged;
    }
    return kExitOk;
}

// ------------------------------------------------------------ mask-report

int cmd_mask_report(const std::string& data, const std::string& noise_text, bool clean_val,
                    std::uint64_t seed, bool deterministic, const TrainFlags& flags,
                    const std::string& model_path, bool compare, const std::string& out_path,
                    const std::string& save_model_path) {
    const RunInputs inputs = load_run_inputs(data);

    TrainConfig cfg;
    cfg.seed = seed;
    cfg.deterministic = deterministic;
    flags.apply(cfg);
    validate(cfg);

    std::optional<NoiseSpec> noise;
    if (!noise_text.empty()) noise = parse_noise(noise_text);
    const auto corrupted = corrupted_for(inputs, noise, seed, clean_val);
    const PiLabelSet labels = build_pi_labels(inputs.dataset, corrupted, cfg);

    ModelState mask_model;
    if (!model_path.empty()) {
        mask_model = load_model(model_path);
    } else {
        std::cerr << "[mask-report] training mask generator for " << cfg.total_epochs
                  << " epochs\n";
        mask_model = train_pi_only(inputs.dataset, labels, cfg);
    }
    if (!save_model_path.empty()) save_model(mask_model, save_model_path);

    const MaskReport report =
        mask_analysis(mask_model, inputs.dataset, corrupted, labels, cfg, compare);

    std::ostringstream csv;
    csv << "bin,lo,hi,count\n";
    for (std::size_t b = 0; b < report.histogram.size(); ++b) {
        csv << b << "," << format_g(b / 64.0) << "," << format_g((b + 1) / 64.0) << ","
            << report.histogram[b] << "\n";
    }
    write_text(out_path, csv.str());

    if (compare) {
        json j;
        j["top_half_accuracy"] = report.top_half_acc;
        j["bottom_half_accuracy"] = report.bottom_half_acc;
        j["difference"] = report.top_half_acc - report.bottom_half_acc;
        std::cout << j.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pairwise-interaction regularized GNN training under noisy labels"};
    app.require_subcommand(1);

    // prepare
    auto* prepare = app.add_subcommand("prepare", "build dataset inputs on disk");
    std::vector<std::string> sbm_kv;
    std::string content, cites, split_file, prep_noise, prep_out = "inputs";
    std::int32_t train_k = 20, val_k = 20;
    std::uint64_t prep_noise_seed = 1;
    bool prep_clean_val = false;
    prepare->add_option("--sbm", sbm_kv,
                        "planted-partition spec: blocks= size= p-in= p-out= dim= signal= seed=");
    prepare->add_option("--content", content, "raw citation .content file");
    prepare->add_option("--cites", cites, "raw citation .cites file");
    prepare->add_option("--split-file", split_file, "explicit split JSON (train/val/test)");
    prepare->add_option("--train-k", train_k, "train nodes per class");
    prepare->add_option("--val-k", val_k, "val nodes per class");
    prepare->add_option("--noise", prep_noise, "persist corrupted labels, e.g. sym:0.6");
    prepare->add_option("--noise-seed", prep_noise_seed, "seed for persisted corruption");
    prepare->add_flag("--clean-val", prep_clean_val, "leave validation labels clean");
    prepare->add_option("--out", prep_out, "output directory");

    // run
    auto* run = app.add_subcommand("run", "one training run, result JSON to stdout/file");
    std::string run_data, run_method = "pi_gnn", run_noise, run_out, save_task, save_mask;
    std::uint64_t run_seed = default_seed();
    bool run_clean_val = false, run_det = false;
    TrainFlags run_flags;
    run->add_option("--data", run_data, "prepared input dir or manifest")->required();
    run->add_option("--method", run_method, "vanilla|pi_no_ue|pi_gnn|pi_task_self");
    run->add_option("--noise", run_noise, "corrupt labels inline, e.g. sym:0.6");
    run->add_flag("--clean-val", run_clean_val, "leave validation labels clean");
    run->add_option("--seed", run_seed, "run seed (default $PIGNN_SEED or 1)");
    run->add_flag("--deterministic", run_det, "byte-stable result JSON");
    run->add_option("--out", run_out, "result JSON path ('-' or empty: stdout)");
    run->add_option("--save-task-model", save_task, "checkpoint path for the task model");
    run->add_option("--save-mask-model", save_mask, "checkpoint path for the mask generator");
    run_flags.attach(run);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "method x noise x seed grid from a spec file");
    std::string sweep_spec, sweep_csv, sweep_json;
    std::int32_t sweep_jobs = static_cast<std::int32_t>(std::thread::hardware_concurrency());
    bool sweep_det = false;
    TrainFlags sweep_flags;
    sweep->add_option("--spec", sweep_spec, "sweep spec JSON")->required();
    sweep->add_option("--jobs", sweep_jobs, "parallel workers");
    sweep->add_flag("--deterministic", sweep_det, "deterministic per-cell results");
    sweep->add_option("--out-csv", sweep_csv, "table CSV ('-' or empty: stdout)");
    sweep->add_option("--out-json", sweep_json, "full per-cell JSON");
    sweep_flags.attach(sweep);

    // mask-report
    auto* mask = app.add_subcommand("mask-report", "confidence histogram and split study");
    std::string mask_data, mask_noise, mask_model_path, mask_out, mask_save;
    std::uint64_t mask_seed = default_seed();
    bool mask_clean_val = false, mask_compare = false, mask_det = false;
    TrainFlags mask_flags;
    mask->add_option("--data", mask_data, "prepared input dir or manifest")->required();
    mask->add_option("--noise", mask_noise, "corrupt labels inline, e.g. sym:0.6");
    mask->add_flag("--clean-val", mask_clean_val, "leave validation labels clean");
    mask->add_option("--seed", mask_seed, "seed (default $PIGNN_SEED or 1)");
    mask->add_flag("--deterministic", mask_det, "deterministic training");
    mask->add_option("--model", mask_model_path, "load a mask generator checkpoint");
    mask->add_flag("--compare", mask_compare,
                   "train on top/bottom-half confidence pairs and report both accuracies");
    mask->add_option("--out", mask_out, "histogram CSV ('-' or empty: stdout)");
    mask->add_option("--save-model", mask_save, "checkpoint the trained mask generator");
    mask_flags.attach(mask);

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed()) {
            return cmd_prepare(sbm_kv, content, cites, split_file, train_k, val_k, prep_noise,
                               prep_noise_seed, prep_clean_val, prep_out);
        }
        if (run->parsed()) {
            return cmd_run(run_data, run_method, run_noise, run_clean_val, run_seed, run_det,
                           run_flags, run_out, save_task, save_mask);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_spec, sweep_jobs, sweep_det, sweep_flags, sweep_csv,
                             sweep_json);
        }
        if (mask->parsed()) {
            return cmd_mask_report(mask_data, mask_noise, mask_clean_val, mask_seed, mask_det,
                                   mask_flags, mask_model_path, mask_compare, mask_out,
                                   mask_save);
        }
    } catch (const divergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
