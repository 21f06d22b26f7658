#include "chebyprop/bidirectional.hpp"

#include <charconv>
#include <chrono>
#include <cmath>

#include "chebyprop/error.hpp"
#include "chebyprop/kernels.hpp"

namespace chebyprop {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void check_unit_interval(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
        throw ParameterError(std::string(name) + " must lie in (0,1), got " + format_double(v));
}

} // namespace

RandomWalkConfig RandomWalkConfig::plan(std::size_t n_nodes, double alpha,
                                        double eps_r, double delta,
                                        std::uint64_t seed) {
    if (n_nodes < 2) throw ParameterError("walk planning needs n >= 2");
    check_unit_interval(alpha, "alpha");
    check_unit_interval(eps_r, "eps_r");
    check_unit_interval(delta, "delta");
    RandomWalkConfig cfg;
    cfg.alpha = alpha;
    cfg.eps_r = eps_r;
    cfg.delta = delta;
    const double w = 2.0 * (2.0 * eps_r / 3.0 + 2.0) *
                     std::log(static_cast<double>(n_nodes)) / (eps_r * eps_r * delta);
    cfg.walk_budget = static_cast<std::uint64_t>(std::ceil(w));
    cfg.r_max = std::sqrt(alpha) / static_cast<double>(cfg.walk_budget);
    cfg.seed = seed;
    return cfg;
}

double ResidualVector::max_degree_normalized(const Graph& g) const {
    double worst = 0.0;
    for (const auto& e : entries)
        worst = std::max(worst, std::abs(e.value) / static_cast<double>(g.degree(e.node)));
    return worst;
}

ResidualVector compute_residual(const Graph& g, double alpha,
                                const NodeVector& pi_hat, NodeId source) {
    check_unit_interval(alpha, "alpha");
    const NodeId n = g.node_count();
    if (pi_hat.size() != n) throw ParameterError("compute_residual: vector length mismatch");
    if (source >= n) throw ParameterError("compute_residual: source out of range");

    NodeVector walked = apply_walk(g, pi_hat);
    ResidualVector res;
    const double inv_alpha = 1.0 / alpha;
    for (NodeId u = 0; u < n; ++u) {
        double r = -inv_alpha * (pi_hat[u] - (1.0 - alpha) * walked[u]);
        if (u == source) r += 1.0;
        if (std::abs(r) > 1e-16) res.entries.push_back({u, r});
    }
    return res;
}

NodeId alpha_random_walk(const Graph& g, NodeId start, double alpha,
                         SplitMix64& rng, std::uint64_t* n_steps) {
    if (start >= g.node_count()) throw ParameterError("alpha_random_walk: start out of range");
    NodeId u = start;
    std::uint64_t visited = 1;
    while (rng.next_double() >= alpha) {
        const auto nb = g.neighbors(u);
        u = nb[rng.next_below(nb.size())];
        ++visited;
    }
    if (n_steps) *n_steps = visited;
    return u;
}

NodeVector walk_phase_increment(const Graph& g, const ResidualVector& residual,
                                double alpha, std::uint64_t walk_budget,
                                std::uint64_t seed, std::uint64_t* walks_done,
                                TerminalSampler sampler) {
    NodeVector increment(g.node_count(), 0.0);
    std::uint64_t walks = 0;
    for (const auto& [v, rv] : residual.entries) {
        const auto n_walks = static_cast<std::uint64_t>(
            std::ceil(std::abs(rv) * static_cast<double>(walk_budget)));
        if (n_walks == 0) continue;
        const double per_walk = rv / static_cast<double>(n_walks);
        SplitMix64 rng = SplitMix64::stream(seed, v);
        for (std::uint64_t i = 0; i < n_walks; ++i) {
            const NodeId terminal = sampler(g, v, alpha, rng, nullptr);
            increment[terminal] += per_walk;
        }
        walks += n_walks;
    }
    if (walks_done) *walks_done = walks;
    return increment;
}

Estimate cheby_push_rw(const Graph& g, double alpha, NodeId source,
                       const RandomWalkConfig& cfg, std::size_t cheby_steps,
                       TerminalSampler sampler) {
    const auto start = std::chrono::steady_clock::now();
    const RandomWalkConfig expect =
        RandomWalkConfig::plan(g.node_count(), cfg.alpha, cfg.eps_r, cfg.delta, cfg.seed);
    if (cfg.alpha != alpha || cfg.walk_budget != expect.walk_budget ||
        cfg.r_max != expect.r_max)
        throw ParameterError("cheby_push_rw: config violates its invariants");

    const Kernel kernel = Kernel::ppr(alpha);
    Estimate est = cheby_push(g, kernel, source, cheby_steps, cfg.r_max);

    const ResidualVector residual = compute_residual(g, alpha, est.values, source);
    std::uint64_t walks = 0;
    const NodeVector increment =
        walk_phase_increment(g, residual, alpha, cfg.walk_budget, cfg.seed, &walks, sampler);
    for (NodeId u = 0; u < g.node_count(); ++u) est.values[u] += increment[u];

    est.stats.walks = walks;
    est.stats.algorithm = "chebypush-rw";
    est.stats.params = "K=" + std::to_string(cheby_steps) +
                       ",eps_r=" + format_double(cfg.eps_r) +
                       ",delta=" + format_double(cfg.delta) +
                       ",seed=" + std::to_string(cfg.seed);
    est.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return est;
}

} // namespace chebyprop
