#include "chebyprop/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "chebyprop/error.hpp"
#include "chebyprop/rng.hpp"
#include "chebyprop/solvers.hpp"

namespace chebyprop {

ErrorReport measure(const NodeVector& truth, const NodeVector& estimate,
                    const Graph& g) {
    const NodeId n = g.node_count();
    if (truth.size() != n || estimate.size() != n)
        throw ParameterError("measure: vector length mismatch");
    ErrorReport rep;
    double sq = 0.0;
    for (NodeId u = 0; u < n; ++u) {
        const double d = std::abs(truth[u] - estimate[u]);
        rep.l1 += d;
        sq += d * d;
        const double dn = d / static_cast<double>(g.degree(u));
        if (dn > rep.deg_norm_inf) {
            rep.deg_norm_inf = dn;
            rep.argmax_node = u;
        }
    }
    rep.l2 = std::sqrt(sq);
    return rep;
}

std::size_t ground_truth_steps(const Kernel& kernel) {
    const double target = std::log(1e20);
    switch (kernel.family()) {
    case KernelFamily::Ppr:
        return static_cast<std::size_t>(std::ceil(target / kernel.alpha()));
    case KernelFamily::Hkpr:
        return static_cast<std::size_t>(std::ceil(2.0 * kernel.t() * target));
    case KernelFamily::Custom:
        return plan_truncation(kernel, 1e-18).taylor_steps;
    }
    return 1;
}

GroundTruth ground_truth(const Graph& g, const Kernel& kernel, NodeId source) {
    GroundTruth truth;
    truth.truncation = ground_truth_steps(kernel);
    truth.values = power_method(g, kernel, source, truth.truncation).values;
    truth.kernel_descriptor = kernel.descriptor();
    truth.source = source;
    return truth;
}

SourceStrategy parse_source_strategy(const std::string& name) {
    if (name == "uniform") return SourceStrategy::Uniform;
    if (name == "topdeg") return SourceStrategy::TopDegree;
    throw ParameterError("unknown source strategy \"" + name + "\"");
}

std::vector<NodeId> select_sources(const Graph& g, SourceStrategy strategy,
                                   std::size_t count, std::uint64_t seed) {
    const NodeId n = g.node_count();
    if (count > n) throw ParameterError("select_sources: count exceeds node count");
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), NodeId{0});

    if (strategy == SourceStrategy::Uniform) {
        SplitMix64 rng(seed);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
            std::swap(ids[i], ids[j]);
        }
    } else {
        std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(count),
                          ids.end(), [&](NodeId a, NodeId b) {
                              if (g.degree(a) != g.degree(b))
                                  return g.degree(a) > g.degree(b);
                              return a < b;
                          });
    }
    ids.resize(count);
    return ids;
}

namespace {

constexpr char kTruthMagic[4] = {'C', 'P', 'G', 'T'};
constexpr std::uint32_t kTruthVersion = 1;

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError("unexpected end of truth cache");
    return v;
}

} // namespace

void write_truth_cache(const GroundTruth& truth, std::ostream& out) {
    out.write(kTruthMagic, 4);
    write_raw(out, kTruthVersion);
    write_raw(out, static_cast<std::uint32_t>(truth.kernel_descriptor.size()));
    out.write(truth.kernel_descriptor.data(),
              static_cast<std::streamsize>(truth.kernel_descriptor.size()));
    write_raw(out, static_cast<std::uint64_t>(truth.source));
    write_raw(out, static_cast<std::uint64_t>(truth.values.size()));
    out.write(reinterpret_cast<const char*>(truth.values.data()),
              static_cast<std::streamsize>(truth.values.size() * sizeof(double)));
    if (!out) throw IoError("write failure while emitting truth cache");
}

GroundTruth read_truth_cache(std::istream& in) {
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kTruthMagic, 4) != 0)
        throw ParseError("bad truth cache magic");
    const auto version = read_raw<std::uint32_t>(in);
    if (version != kTruthVersion)
        throw ParseError("unsupported truth cache version " + std::to_string(version));
    const auto desc_len = read_raw<std::uint32_t>(in);
    GroundTruth truth;
    truth.kernel_descriptor.resize(desc_len);
    in.read(truth.kernel_descriptor.data(), desc_len);
    if (!in) throw ParseError("truncated truth cache");
    truth.source = static_cast<NodeId>(read_raw<std::uint64_t>(in));
    const auto n = read_raw<std::uint64_t>(in);
    truth.values.resize(n);
    in.read(reinterpret_cast<char*>(truth.values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw ParseError("truncated truth cache");
    return truth;
}

std::string truth_cache_filename(const Graph& g, const Kernel& kernel, NodeId source) {
    std::string desc = kernel.descriptor();
    for (char& c : desc)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
    char hash_hex[17];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(g.structure_hash()));
    return std::string("cpgt-") + hash_hex + "-" + desc + "-s" + std::to_string(source) + ".bin";
}

GroundTruth load_or_compute_truth(const Graph& g, const Kernel& kernel,
                                  NodeId source, const std::string& cache_dir,
                                  bool* was_cached) {
    if (was_cached) *was_cached = false;
    if (source >= g.node_count())
        throw ParameterError("load_or_compute_truth: source out of range");

    std::filesystem::path path;
    if (!cache_dir.empty()) {
        path = std::filesystem::path(cache_dir) / truth_cache_filename(g, kernel, source);
        std::ifstream in(path, std::ios::binary);
        if (in) {
            try {
                GroundTruth cached = read_truth_cache(in);
                if (cached.kernel_descriptor == kernel.descriptor() &&
                    cached.source == source &&
                    cached.values.size() == g.node_count()) {
                    cached.truncation = ground_truth_steps(kernel);
                    if (was_cached) *was_cached = true;
                    return cached;
                }
            } catch (const ParseError&) {
                // Corrupt or stale cache entries are regenerated below.
            }
        }
    }

    GroundTruth truth = ground_truth(g, kernel, source);
    if (!cache_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cache_dir, ec);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (out) write_truth_cache(truth, out);
    }
    return truth;
}

} // namespace chebyprop
