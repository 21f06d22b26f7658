#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace chebyprop {

using NodeId = std::uint32_t;

// Dense node-indexed real vector (length n, double precision throughout).
using NodeVector = std::vector<double>;

struct LoadOptions {
    char comment_char = '#';
};

// Immutable CSR adjacency of a simple undirected graph.
//
// Invariants established at construction:
//   - node ids contiguous in [0, n), every node has degree >= 1
//   - no self-loops, no duplicate edges, adjacency symmetric
//   - neighbor lists sorted ascending (deterministic iteration order)
class Graph {
public:
    NodeId node_count() const { return n_; }
    std::uint64_t edge_count() const { return m_; }
    std::uint64_t volume() const { return 2 * m_; }

    std::uint32_t degree(NodeId u) const { return degrees_[u]; }
    double inv_degree(NodeId u) const { return inv_degree_[u]; }

    std::span<const NodeId> neighbors(NodeId u) const {
        return {neighbors_.data() + offsets_[u],
                neighbors_.data() + offsets_[u + 1]};
    }

    const std::vector<std::uint64_t>& offsets() const { return offsets_; }
    const std::vector<NodeId>& neighbor_array() const { return neighbors_; }

    // Pre-compaction label of a compact id; empty when the graph was not
    // produced by the edge-list loader (e.g. read from a binary cache).
    const std::vector<std::int64_t>& original_ids() const { return original_ids_; }

    // FNV-1a over (n, m, offsets, neighbors); keys ground-truth cache files.
    std::uint64_t structure_hash() const { return hash_; }

    // Builds a graph from raw CSR arrays, validating every invariant.
    static Graph from_csr(std::vector<std::uint64_t> offsets,
                          std::vector<NodeId> neighbors,
                          std::vector<std::int64_t> original_ids = {});

private:
    Graph() = default;

    NodeId n_ = 0;
    std::uint64_t m_ = 0;
    std::vector<std::uint64_t> offsets_;
    std::vector<NodeId> neighbors_;
    std::vector<std::uint32_t> degrees_;
    std::vector<double> inv_degree_;
    std::vector<std::int64_t> original_ids_;
    std::uint64_t hash_ = 0;
};

// Node subset with its cached degree volume vol(S) = sum of member degrees.
struct NodeSet {
    std::vector<NodeId> members;
    std::uint64_t volume = 0;

    static NodeSet of(const Graph& g, std::vector<NodeId> members);
};

// Parses whitespace-separated "u v" pairs, one edge per line. Lines starting
// with the comment character and blank lines are ignored. Edges are
// symmetrized, deduplicated and stripped of self-loops; surviving node ids
// are compacted to [0, n) preserving first-seen order.
Graph load_edge_list(std::istream& in, const LoadOptions& options = {});
Graph load_edge_list_file(const std::string& path, const LoadOptions& options = {});

// Emits each undirected edge once, ordered so that reloading the output
// reproduces the same CSR (introduction edges first, then the remainder).
void write_edge_list(const Graph& g, std::ostream& out);

// Binary CSR cache: magic "CPGR", version u32, n u64, m u64,
// offsets u64[n+1], neighbors u32[2m]; little-endian, bit-exact round trip.
void write_csr_cache(const Graph& g, std::ostream& out);
Graph read_csr_cache(std::istream& in);

// y = A D^-1 x, i.e. y(v) = sum_{u in N(v)} x(u) / d_u.
NodeVector apply_walk(const Graph& g, const NodeVector& x);
void apply_walk_into(const Graph& g, const NodeVector& x, NodeVector& out);

// accum += scale * A D^-1 (x restricted to s); returns vol(s), the work done.
std::uint64_t apply_walk_from_subset(const Graph& g, const NodeVector& x,
                                     const NodeSet& s, double scale,
                                     NodeVector& accum);

} // namespace chebyprop
