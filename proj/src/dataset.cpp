#include "pignn/dataset.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pignn/errors.hpp"
#include "pignn/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "on-disk arrays are little-endian; big-endian hosts are unsupported");

namespace pignn {

namespace {

constexpr int kFormatVersion = 1;

std::uint64_t fnv1a(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_file(const fs::path& path, const void* data, std::size_t bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!out) throw io_error("short write: " + path.string());
}

std::vector<char> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw io_error("cannot open: " + path.string());
    const auto size = in.tellg();
    in.seekg(0);
    std::vector<char> buf(static_cast<std::size_t>(size));
    in.read(buf.data(), size);
    if (!in) throw io_error("short read: " + path.string());
    return buf;
}

json file_entry(const fs::path& dir, const std::string& name, const void* data,
                std::size_t bytes) {
    write_file(dir / name, data, bytes);
    return json{{"path", name}, {"bytes", bytes}, {"fnv1a", hex64(fnv1a(data, bytes))}};
}

std::vector<char> load_checked(const fs::path& dir, const json& entry) {
    const fs::path path = dir / entry.at("path").get<std::string>();
    auto buf = read_file(path);
    if (buf.size() != entry.at("bytes").get<std::size_t>() ||
        hex64(fnv1a(buf.data(), buf.size())) != entry.at("fnv1a").get<std::string>()) {
        throw io_error("checksum mismatch: " + path.string());
    }
    return buf;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) tokens.push_back(std::move(tok));
    return tokens;
}

}  // namespace

const PublishedStats* published_lcc_stats(const std::string& name) {
    static const std::map<std::string, PublishedStats> table = {
        {"cora", {2485, 5069, 7}},
        {"citeseer", {2110, 3668, 6}},
        {"pubmed", {19717, 44324, 3}},
    };
    const auto it = table.find(name);
    return it == table.end() ? nullptr : &it->second;
}

Dataset load_raw_citation(const std::string& content_path, const std::string& cites_path) {
    std::ifstream content(content_path);
    if (!content) throw io_error("cannot open: " + content_path);

    std::unordered_map<std::string, std::int32_t> node_ids;
    std::unordered_map<std::string, std::int32_t> class_ids;
    std::vector<std::vector<double>> rows;
    std::vector<std::int32_t> labels;
    std::string line;
    std::size_t line_no = 0;
    std::int64_t arity = -1;

    while (std::getline(content, line)) {
        ++line_no;
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (tokens.size() < 3) {
            throw io_error(content_path + ":" + std::to_string(line_no) +
                           ": malformed row (need id, features, class)");
        }
        const std::int64_t d = static_cast<std::int64_t>(tokens.size()) - 2;
        if (arity < 0) arity = d;
        if (d != arity) {
            throw io_error(content_path + ":" + std::to_string(line_no) +
                           ": feature arity " + std::to_string(d) + " != " +
                           std::to_string(arity));
        }
        if (!node_ids.emplace(tokens.front(), static_cast<std::int32_t>(rows.size())).second) {
            throw io_error(content_path + ":" + std::to_string(line_no) +
                           ": duplicate node id " + tokens.front());
        }
        std::vector<double> feats(static_cast<std::size_t>(d));
        for (std::int64_t k = 0; k < d; ++k) {
            try {
                feats[k] = std::stod(tokens[static_cast<std::size_t>(k) + 1]);
            } catch (const std::exception&) {
                throw io_error(content_path + ":" + std::to_string(line_no) +
                               ": bad feature value '" + tokens[k + 1] + "'");
            }
        }
        rows.push_back(std::move(feats));
        const auto [it, _] =
            class_ids.emplace(tokens.back(), static_cast<std::int32_t>(class_ids.size()));
        labels.push_back(it->second);
    }
    if (rows.empty()) throw io_error(content_path + ": no nodes");

    const auto n = static_cast<std::int32_t>(rows.size());
    Eigen::MatrixXd features(n, arity);
    for (std::int32_t v = 0; v < n; ++v) {
        for (std::int64_t k = 0; k < arity; ++k) features(v, k) = rows[v][k];
    }

    std::ifstream cites(cites_path);
    if (!cites) throw io_error("cannot open: " + cites_path);
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    std::int64_t dropped = 0;
    line_no = 0;
    while (std::getline(cites, line)) {
        ++line_no;
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 2) {
            throw io_error(cites_path + ":" + std::to_string(line_no) + ": malformed edge row");
        }
        const auto a = node_ids.find(tokens[0]);
        const auto b = node_ids.find(tokens[1]);
        if (a == node_ids.end() || b == node_ids.end()) {
            ++dropped;
            continue;
        }
        edges.emplace_back(a->second, b->second);
    }

    Dataset ds;
    ds.graph = build_graph(edges, n, std::move(features));
    ds.clean_labels = std::move(labels);
    ds.num_classes = static_cast<std::int32_t>(class_ids.size());
    ds.split.roles.assign(static_cast<std::size_t>(n), Role::unused);
    ds.name = fs::path(content_path).stem().string();
    ds.dropped_edges = dropped;
    return ds;
}

Dataset generate_sbm(const SbmSpec& spec) {
    if (spec.num_blocks < 1 || spec.block_size < 1) {
        throw std::invalid_argument("generate_sbm: need at least one block and one node");
    }
    if (!(spec.p_out <= spec.p_in) || spec.p_in > 1.0 || spec.p_out < 0.0) {
        throw std::invalid_argument("generate_sbm: need 0 <= p_out <= p_in <= 1");
    }
    if (spec.feature_signal < 0.0) {
        throw std::invalid_argument("generate_sbm: feature_signal must be >= 0");
    }
    const std::int32_t n = spec.num_blocks * spec.block_size;

    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    Rng edge_rng(spec.rng_seed, 0);
    for (std::int32_t i = 0; i < n; ++i) {
        const std::int32_t bi = i / spec.block_size;
        for (std::int32_t j = i + 1; j < n; ++j) {
            const double p = (bi == j / spec.block_size) ? spec.p_in : spec.p_out;
            if (edge_rng.uniform() < p) edges.emplace_back(i, j);
        }
    }

    // Coordinate c belongs to block floor(c * num_blocks / feature_dim).
    Rng feat_rng(spec.rng_seed, 1);
    Eigen::MatrixXd features(n, spec.feature_dim);
    for (std::int32_t v = 0; v < n; ++v) {
        const std::int32_t block = v / spec.block_size;
        for (std::int32_t c = 0; c < spec.feature_dim; ++c) {
            const std::int32_t owner = static_cast<std::int32_t>(
                static_cast<std::int64_t>(c) * spec.num_blocks / spec.feature_dim);
            features(v, c) = feat_rng.gaussian() + (owner == block ? spec.feature_signal : 0.0);
        }
    }

    Dataset ds;
    ds.graph = build_graph(edges, n, std::move(features));
    ds.clean_labels.resize(static_cast<std::size_t>(n));
    for (std::int32_t v = 0; v < n; ++v) ds.clean_labels[v] = v / spec.block_size;
    ds.num_classes = spec.num_blocks;
    ds.split.roles.assign(static_cast<std::size_t>(n), Role::unused);
    ds.name = "sbm" + std::to_string(spec.num_blocks) + "x" + std::to_string(spec.block_size);
    return ds;
}

void save_run_inputs(const Dataset& ds, const std::vector<std::int32_t>& corrupted_labels,
                     const std::string& dir, const std::map<std::string, std::uint64_t>& seeds) {
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw io_error("cannot create directory: " + root.string());

    const Graph& g = ds.graph;
    const std::int32_t n = g.num_nodes();

    // Each undirected edge stored once as (i, j) with i < j.
    std::vector<std::int32_t> edge_pairs;
    edge_pairs.reserve(static_cast<std::size_t>(g.num_edges()) * 2);
    for (std::int32_t i = 0; i < n; ++i) {
        for (std::int32_t k = g.row_offsets()[i]; k < g.row_offsets()[i + 1]; ++k) {
            const std::int32_t j = g.col_indices()[k];
            if (i < j) {
                edge_pairs.push_back(i);
                edge_pairs.push_back(j);
            }
        }
    }

    std::vector<double> feats(static_cast<std::size_t>(n) * g.feature_dim());
    for (std::int32_t v = 0; v < n; ++v) {
        for (std::int32_t c = 0; c < g.feature_dim(); ++c) {
            feats[static_cast<std::size_t>(v) * g.feature_dim() + c] = g.features()(v, c);
        }
    }

    std::vector<std::uint8_t> roles(ds.split.roles.size());
    for (std::size_t v = 0; v < roles.size(); ++v) {
        roles[v] = static_cast<std::uint8_t>(ds.split.roles[v]);
    }

    json files;
    files["edges"] = file_entry(root, "edges.bin", edge_pairs.data(),
                                edge_pairs.size() * sizeof(std::int32_t));
    files["features"] =
        file_entry(root, "features.bin", feats.data(), feats.size() * sizeof(double));
    files["clean_labels"] = file_entry(root, "clean_labels.bin", ds.clean_labels.data(),
                                       ds.clean_labels.size() * sizeof(std::int32_t));
    files["split"] = file_entry(root, "split.bin", roles.data(), roles.size());
    if (!corrupted_labels.empty()) {
        if (corrupted_labels.size() != ds.clean_labels.size()) {
            throw std::invalid_argument("save_run_inputs: corrupted label size mismatch");
        }
        files["corrupted_labels"] =
            file_entry(root, "corrupted_labels.bin", corrupted_labels.data(),
                       corrupted_labels.size() * sizeof(std::int32_t));
    }

    json manifest;
    manifest["version"] = kFormatVersion;
    manifest["name"] = ds.name;
    manifest["num_nodes"] = n;
    manifest["num_classes"] = ds.num_classes;
    manifest["feature_dim"] = g.feature_dim();
    manifest["undirected_edges"] = g.num_edges();
    manifest["dropped_edges"] = ds.dropped_edges;
    manifest["seeds"] = json::object();
    for (const auto& [k, v] : seeds) manifest["seeds"][k] = v;
    if (const auto* stats = published_lcc_stats(ds.name)) {
        manifest["published_lcc"] = {
            {"nodes", stats->nodes}, {"edges", stats->edges}, {"classes", stats->classes}};
    }
    manifest["files"] = std::move(files);

    std::ofstream out(root / "manifest.json");
    if (!out) throw io_error("cannot write manifest in " + root.string());
    out << manifest.dump(2) << "\n";
}

RunInputs load_run_inputs(const std::string& dir_or_manifest) {
    fs::path manifest_path(dir_or_manifest);
    if (fs::is_directory(manifest_path)) manifest_path /= "manifest.json";
    const fs::path root = manifest_path.parent_path();

    json manifest;
    {
        std::ifstream in(manifest_path);
        if (!in) throw io_error("cannot open: " + manifest_path.string());
        try {
            in >> manifest;
        } catch (const json::exception& e) {
            throw io_error("bad manifest " + manifest_path.string() + ": " + e.what());
        }
    }
    if (manifest.at("version").get<int>() != kFormatVersion) {
        throw io_error("unsupported input format version " +
                       manifest.at("version").dump() + " in " + manifest_path.string());
    }

    const auto n = manifest.at("num_nodes").get<std::int32_t>();
    const auto d = manifest.at("feature_dim").get<std::int32_t>();
    const auto& files = manifest.at("files");

    const auto edge_buf = load_checked(root, files.at("edges"));
    const auto* edge_ptr = reinterpret_cast<const std::int32_t*>(edge_buf.data());
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    edges.reserve(edge_buf.size() / (2 * sizeof(std::int32_t)));
    for (std::size_t k = 0; k + 1 < edge_buf.size() / sizeof(std::int32_t); k += 2) {
        edges.emplace_back(edge_ptr[k], edge_ptr[k + 1]);
    }

    const auto feat_buf = load_checked(root, files.at("features"));
    if (feat_buf.size() != static_cast<std::size_t>(n) * d * sizeof(double)) {
        throw io_error("feature array has wrong size in " + root.string());
    }
    const auto* feat_ptr = reinterpret_cast<const double*>(feat_buf.data());
    Eigen::MatrixXd features(n, d);
    for (std::int32_t v = 0; v < n; ++v) {
        for (std::int32_t c = 0; c < d; ++c) {
            features(v, c) = feat_ptr[static_cast<std::size_t>(v) * d + c];
        }
    }

    RunInputs out;
    out.dataset.graph = build_graph(edges, n, std::move(features));
    out.dataset.num_classes = manifest.at("num_classes").get<std::int32_t>();
    out.dataset.name = manifest.at("name").get<std::string>();
    out.dataset.dropped_edges = manifest.value("dropped_edges", std::int64_t{0});

    const auto label_buf = load_checked(root, files.at("clean_labels"));
    const auto* label_ptr = reinterpret_cast<const std::int32_t*>(label_buf.data());
    out.dataset.clean_labels.assign(label_ptr, label_ptr + label_buf.size() / sizeof(std::int32_t));
    if (out.dataset.clean_labels.size() != static_cast<std::size_t>(n)) {
        throw io_error("label array has wrong size in " + root.string());
    }

    const auto role_buf = load_checked(root, files.at("split"));
    if (role_buf.size() != static_cast<std::size_t>(n)) {
        throw io_error("split array has wrong size in " + root.string());
    }
    out.dataset.split.roles.resize(static_cast<std::size_t>(n));
    for (std::int32_t v = 0; v < n; ++v) {
        const auto r = static_cast<std::uint8_t>(role_buf[v]);
        if (r > static_cast<std::uint8_t>(Role::unused)) {
            throw io_error("bad split role in " + root.string());
        }
        out.dataset.split.roles[v] = static_cast<Role>(r);
    }

    if (files.contains("corrupted_labels")) {
        const auto buf = load_checked(root, files.at("corrupted_labels"));
        const auto* p = reinterpret_cast<const std::int32_t*>(buf.data());
        out.corrupted_labels.assign(p, p + buf.size() / sizeof(std::int32_t));
    }
    if (manifest.contains("seeds")) {
        for (const auto& [k, v] : manifest.at("seeds").items()) {
            out.seeds[k] = v.get<std::uint64_t>();
        }
    }
    return out;
}

}  // namespace pignn
