#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pignn/graph.hpp"

namespace pignn {

// Planted-partition generator parameters. Blocks are contiguous runs of
// block_size nodes; the clean label is the block id. Features are unit
// Gaussians with mean feature_signal on the coordinates owned by the
// node's block.
struct SbmSpec {
    std::int32_t num_blocks = 4;
    std::int32_t block_size = 250;
    double p_in = 0.02;
    double p_out = 0.002;
    std::int32_t feature_dim = 32;
    double feature_signal = 1.0;
    std::uint64_t rng_seed = 1;
};

struct Dataset {
    Graph graph;
    std::vector<std::int32_t> clean_labels;
    std::int32_t num_classes = 0;
    Split split;  // all-unused until a policy is applied
    std::string name;
    std::int64_t dropped_edges = 0;  // edge rows referencing unknown node ids
};

// Commonly reported largest-connected-component statistics for the public
// citation benchmarks, recorded alongside raw counts in saved manifests.
struct PublishedStats {
    std::int64_t nodes = 0;
    std::int64_t edges = 0;
    std::int32_t classes = 0;
};
const PublishedStats* published_lcc_stats(const std::string& name);

// Raw citation format: `.content` rows are `<id> <f_1..f_d> <class_name>`,
// `.cites` rows are `<id_a> <id_b>`. Node ids map to dense indices in file
// order, class names to ids in first-appearance order. Edges mentioning
// unknown ids are dropped and counted in Dataset::dropped_edges.
Dataset load_raw_citation(const std::string& content_path, const std::string& cites_path);

Dataset generate_sbm(const SbmSpec& spec);

// One JSON manifest plus flat little-endian binary arrays under `dir`.
// Round trips are bit-exact; every file carries an FNV-1a checksum.
void save_run_inputs(const Dataset& ds, const std::vector<std::int32_t>& corrupted_labels,
                     const std::string& dir,
                     const std::map<std::string, std::uint64_t>& seeds = {});

struct RunInputs {
    Dataset dataset;
    std::vector<std::int32_t> corrupted_labels;  // empty if none were saved
    std::map<std::string, std::uint64_t> seeds;
};
RunInputs load_run_inputs(const std::string& dir_or_manifest);

}  // namespace pignn
