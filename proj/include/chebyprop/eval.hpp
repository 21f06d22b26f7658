#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "chebyprop/graph.hpp"
#include "chebyprop/kernels.hpp"

namespace chebyprop {

// l1, l2 and degree-normalized infinity distances between an estimate and
// the reference vector.
struct ErrorReport {
    double l1 = 0.0;
    double l2 = 0.0;
    double deg_norm_inf = 0.0;
    NodeId argmax_node = 0; // node attaining the degree-normalized max
};

ErrorReport measure(const NodeVector& truth, const NodeVector& estimate,
                    const Graph& g);

struct GroundTruth {
    NodeVector values;
    std::string kernel_descriptor;
    NodeId source = 0;
    std::size_t truncation = 0;
};

// Power iteration driven far past convergence: N = ceil((1/alpha) ln 1e20)
// for PPR, N = ceil(2 t ln 1e20) for HKPR, tail below 1e-18 for custom.
std::size_t ground_truth_steps(const Kernel& kernel);
GroundTruth ground_truth(const Graph& g, const Kernel& kernel, NodeId source);

enum class SourceStrategy { Uniform, TopDegree };
SourceStrategy parse_source_strategy(const std::string& name);

// Uniform: sampled without replacement from the seeded generator.
// TopDegree: highest degrees first, ties broken by smaller node id.
std::vector<NodeId> select_sources(const Graph& g, SourceStrategy strategy,
                                   std::size_t count, std::uint64_t seed);

// Ground-truth cache file: magic "CPGT", version u32, descriptor (u32 length
// + bytes), source u64, n u64, then n little-endian doubles.
void write_truth_cache(const GroundTruth& truth, std::ostream& out);
GroundTruth read_truth_cache(std::istream& in);

// Cache filename keyed by (graph hash, kernel descriptor, source).
std::string truth_cache_filename(const Graph& g, const Kernel& kernel, NodeId source);

// Loads the cached truth when a valid file exists under cache_dir, otherwise
// computes and stores it. Empty cache_dir disables caching.
GroundTruth load_or_compute_truth(const Graph& g, const Kernel& kernel,
                                  NodeId source, const std::string& cache_dir,
                                  bool* was_cached = nullptr);

} // namespace chebyprop
