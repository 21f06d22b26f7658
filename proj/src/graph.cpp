#include "chebyprop/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "chebyprop/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary cache formats assume a little-endian host");

namespace chebyprop {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError("unexpected end of binary stream");
    return v;
}

} // namespace

Graph Graph::from_csr(std::vector<std::uint64_t> offsets,
                      std::vector<NodeId> neighbors,
                      std::vector<std::int64_t> original_ids) {
    if (offsets.empty() || offsets.front() != 0)
        throw StructuralError("CSR offsets must start at 0");
    const std::size_t n = offsets.size() - 1;
    if (n == 0) throw StructuralError("empty graph after cleaning");
    if (n > std::numeric_limits<NodeId>::max())
        throw StructuralError("node count exceeds 32-bit id range");
    if (offsets.back() != neighbors.size())
        throw StructuralError("CSR offsets do not cover the neighbor array");
    if (neighbors.size() % 2 != 0)
        throw StructuralError("undirected CSR needs an even neighbor count");
    if (!original_ids.empty() && original_ids.size() != n)
        throw StructuralError("original-id table length mismatch");

    Graph g;
    g.n_ = static_cast<NodeId>(n);
    g.m_ = neighbors.size() / 2;
    g.offsets_ = std::move(offsets);
    g.neighbors_ = std::move(neighbors);
    g.original_ids_ = std::move(original_ids);

    g.degrees_.resize(n);
    g.inv_degree_.resize(n);
    for (std::size_t u = 0; u < n; ++u) {
        const std::uint64_t begin = g.offsets_[u], end = g.offsets_[u + 1];
        if (end < begin) throw StructuralError("CSR offsets not monotone");
        const std::uint64_t d = end - begin;
        if (d == 0) throw StructuralError("node with degree 0");
        g.degrees_[u] = static_cast<std::uint32_t>(d);
        g.inv_degree_[u] = 1.0 / static_cast<double>(d);
        for (std::uint64_t i = begin; i < end; ++i) {
            const NodeId v = g.neighbors_[i];
            if (v >= n) throw StructuralError("neighbor id out of range");
            if (v == u) throw StructuralError("self-loop in CSR");
            if (i > begin && g.neighbors_[i - 1] >= v)
                throw StructuralError("neighbor list not sorted/deduplicated");
        }
    }
    // Symmetry: every (u,v) slot must have a matching (v,u) slot.
    for (NodeId u = 0; u < g.n_; ++u) {
        for (NodeId v : g.neighbors(u)) {
            auto nb = g.neighbors(v);
            if (!std::binary_search(nb.begin(), nb.end(), u))
                throw StructuralError("adjacency not symmetric");
        }
    }

    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, &g.n_, sizeof(g.n_));
    h = fnv1a(h, &g.m_, sizeof(g.m_));
    h = fnv1a(h, g.offsets_.data(), g.offsets_.size() * sizeof(std::uint64_t));
    h = fnv1a(h, g.neighbors_.data(), g.neighbors_.size() * sizeof(NodeId));
    g.hash_ = h;
    return g;
}

NodeSet NodeSet::of(const Graph& g, std::vector<NodeId> members) {
    NodeSet s;
    s.members = std::move(members);
    for (NodeId u : s.members) s.volume += g.degree(u);
    return s;
}

Graph load_edge_list(std::istream& in, const LoadOptions& options) {
    std::unordered_map<std::int64_t, NodeId> id_of;
    std::vector<std::int64_t> first_seen;
    std::vector<std::pair<NodeId, NodeId>> half_edges;

    // Ids are interned only from surviving (non-loop) edges, so "first seen"
    // means first seen on a real edge and no isolated node can form.
    auto intern = [&](std::int64_t label) {
        auto [it, fresh] = id_of.try_emplace(label, static_cast<NodeId>(first_seen.size()));
        if (fresh) first_seen.push_back(label);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == options.comment_char) continue;

        std::int64_t a = 0, b = 0;
        std::istringstream fields(line);
        if (!(fields >> a >> b)) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected two integers, got \"" + line + "\"");
        }
        std::string extra;
        if (fields >> extra) {
            // Some SNAP exports carry a weight column; anything non-numeric
            // past the pair is still a malformed line.
            char* end = nullptr;
            std::strtod(extra.c_str(), &end);
            if (end == extra.c_str() || *end != '\0')
                throw ParseError("line " + std::to_string(line_no) +
                                 ": trailing garbage \"" + extra + "\"");
        }
        if (a == b) continue;
        const NodeId u = intern(a);
        const NodeId v = intern(b);
        half_edges.emplace_back(u, v);
        half_edges.emplace_back(v, u);
    }
    if (in.bad()) throw IoError("read failure while loading edge list");
    if (half_edges.empty()) throw StructuralError("empty graph after cleaning");

    std::sort(half_edges.begin(), half_edges.end());
    half_edges.erase(std::unique(half_edges.begin(), half_edges.end()),
                     half_edges.end());

    const NodeId n = static_cast<NodeId>(first_seen.size());
    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(n) + 1, 0);
    for (auto [u, v] : half_edges) ++offsets[u + 1];
    for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
    std::vector<NodeId> neighbors(half_edges.size());
    for (std::size_t i = 0; i < half_edges.size(); ++i) neighbors[i] = half_edges[i].second;

    return Graph::from_csr(std::move(offsets), std::move(neighbors),
                           std::move(first_seen));
}

Graph load_edge_list_file(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file: " + path);
    return load_edge_list(in, options);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    // One introducing edge per node is emitted first, in node order, so that
    // first-seen order on reload is 0,1,...,n-1 and reloading reproduces the
    // CSR exactly. For a loader-produced graph such an ordering always
    // exists: every node has either a smaller neighbor or neighbor id+1.
    const NodeId n = g.node_count();
    std::vector<char> seen(n, 0);
    std::vector<std::pair<NodeId, NodeId>> intro; // emitted in this order
    for (NodeId v = 0; v < n; ++v) {
        if (seen[v]) continue;
        auto nb = g.neighbors(v);
        const NodeId smallest = nb.front();
        if (smallest < v) {
            intro.emplace_back(smallest, v); // partner already introduced
        } else {
            intro.emplace_back(v, smallest); // introduces v, then its partner
            seen[smallest] = 1;
        }
        seen[v] = 1;
    }
    for (auto [a, b] : intro) out << a << '\t' << b << '\n';

    std::vector<std::pair<NodeId, NodeId>> skip;
    skip.reserve(intro.size());
    for (auto [a, b] : intro) skip.emplace_back(std::min(a, b), std::max(a, b));
    std::sort(skip.begin(), skip.end());

    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : g.neighbors(u)) {
            if (v <= u) continue;
            if (std::binary_search(skip.begin(), skip.end(), std::pair<NodeId, NodeId>{u, v}))
                continue;
            out << u << '\t' << v << '\n';
        }
    }
    if (!out) throw IoError("write failure while emitting edge list");
}

namespace {
constexpr char kCsrMagic[4] = {'C', 'P', 'G', 'R'};
constexpr std::uint32_t kCsrVersion = 1;
} // namespace

void write_csr_cache(const Graph& g, std::ostream& out) {
    out.write(kCsrMagic, 4);
    write_raw(out, kCsrVersion);
    write_raw(out, static_cast<std::uint64_t>(g.node_count()));
    write_raw(out, g.edge_count());
    out.write(reinterpret_cast<const char*>(g.offsets().data()),
              static_cast<std::streamsize>(g.offsets().size() * sizeof(std::uint64_t)));
    out.write(reinterpret_cast<const char*>(g.neighbor_array().data()),
              static_cast<std::streamsize>(g.neighbor_array().size() * sizeof(NodeId)));
    if (!out) throw IoError("write failure while emitting CSR cache");
}

Graph read_csr_cache(std::istream& in) {
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCsrMagic, 4) != 0)
        throw ParseError("bad CSR cache magic");
    const auto version = read_raw<std::uint32_t>(in);
    if (version != kCsrVersion)
        throw ParseError("unsupported CSR cache version " + std::to_string(version));
    const auto n = read_raw<std::uint64_t>(in);
    const auto m = read_raw<std::uint64_t>(in);
    if (n == 0 || n > std::numeric_limits<NodeId>::max())
        throw StructuralError("CSR cache node count out of range");

    std::vector<std::uint64_t> offsets(n + 1);
    in.read(reinterpret_cast<char*>(offsets.data()),
            static_cast<std::streamsize>(offsets.size() * sizeof(std::uint64_t)));
    std::vector<NodeId> neighbors(2 * m);
    in.read(reinterpret_cast<char*>(neighbors.data()),
            static_cast<std::streamsize>(neighbors.size() * sizeof(NodeId)));
    if (!in) throw ParseError("truncated CSR cache");
    return Graph::from_csr(std::move(offsets), std::move(neighbors));
}

void apply_walk_into(const Graph& g, const NodeVector& x, NodeVector& out) {
    const NodeId n = g.node_count();
    if (x.size() != n) throw ParameterError("apply_walk: vector length mismatch");
    out.assign(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
        const double xu = x[u];
        if (xu == 0.0) continue;
        const double w = xu * g.inv_degree(u);
        for (NodeId v : g.neighbors(u)) out[v] += w;
    }
}

NodeVector apply_walk(const Graph& g, const NodeVector& x) {
    NodeVector out;
    apply_walk_into(g, x, out);
    return out;
}

std::uint64_t apply_walk_from_subset(const Graph& g, const NodeVector& x,
                                     const NodeSet& s, double scale,
                                     NodeVector& accum) {
    const NodeId n = g.node_count();
    if (x.size() != n || accum.size() != n)
        throw ParameterError("apply_walk_from_subset: vector length mismatch");
    std::uint64_t work = 0;
    for (NodeId u : s.members) {
        const double w = scale * x[u] * g.inv_degree(u);
        for (NodeId v : g.neighbors(u)) accum[v] += w;
        work += g.degree(u);
    }
    return work;
}

} // namespace chebyprop
