// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its elapsed time.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>

#include "chebyprop/bidirectional.hpp"
#include "chebyprop/eval.hpp"
#include "chebyprop/graph.hpp"
#include "chebyprop/kernels.hpp"
#include "chebyprop/solvers.hpp"
#include "oracles.hpp"

using namespace chebyprop;

namespace {

struct Criterion {
    int id;
    const char* name;
    bool ok = true;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Criterion(int id_, const char* name_) : id(id_), name(name_) {}
    ~Criterion() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[acceptance] C%02d %-34s %s (%.2fs)\n", id, name,
                    ok ? "PASS" : "FAIL", secs);
        std::fflush(stdout);
    }
};

#define ACC(criterion, cond)            \
    do {                                \
        const bool acc_ok_ = (cond);    \
        (criterion).ok &= acc_ok_;      \
        CHECK(acc_ok_);                 \
    } while (0)

std::uint32_t first_hit_l1(const Graph& g, const Kernel& kernel, NodeId s,
                           const NodeVector& truth, bool chebyshev,
                           std::size_t max_steps) {
    std::uint32_t hit = 0;
    const StepObserver obs = [&](std::uint32_t k, const NodeVector&,
                                 const NodeVector& est) {
        if (hit == 0 && oracles::l1_diff(est, truth) < 1e-5) hit = k + 1;
    };
    if (chebyshev)
        cheby_power(g, kernel, s, max_steps, obs);
    else
        power_method(g, kernel, s, max_steps, obs);
    return hit;
}

std::vector<NodeSet> random_subsets(const Graph& g, std::size_t count,
                                    std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<NodeSet> sets;
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<NodeId> members;
        for (NodeId u = 0; u < g.node_count(); ++u)
            if (rng.next_double() < 0.5) members.push_back(u);
        sets.push_back(NodeSet::of(g, std::move(members)));
    }
    return sets;
}

} // namespace

TEST_CASE("C1 coefficient identities") {
    Criterion c(1, "coefficient-identities");
    for (double alpha : {0.2, 0.1, 0.02}) {
        const auto plan = plan_truncation(Kernel::ppr(alpha), 5e-13);
        const auto coef = ppr_cheby_coeffs(alpha, plan.cheby_steps);
        double s = 0.0;
        for (double v : coef) s += v;
        ACC(c, std::abs(s - 1.0) <= 1e-12);
    }
    for (double t : {5.0, 20.0, 40.0}) {
        const auto plan = plan_truncation(Kernel::hkpr(t), 5e-13);
        const auto coef = hkpr_cheby_coeffs(t, plan.cheby_steps);
        double s = 0.0;
        for (double v : coef) s += v;
        ACC(c, std::abs(s - 1.0) <= 1e-12);
    }
}

TEST_CASE("C2 quadrature vs closed forms") {
    Criterion c(2, "quadrature-oracle");
    for (double alpha : {0.2, 0.02}) {
        const auto q = custom_cheby_coeffs(
            [&](double x) { return alpha / (1.0 - (1.0 - alpha) * x); }, 200);
        const auto r = ppr_cheby_coeffs(alpha, 200);
        double worst = 0.0;
        for (std::size_t k = 0; k <= 200; ++k)
            worst = std::max(worst, std::abs(q[k] - r[k]));
        ACC(c, worst <= 1e-10);
    }
    for (double t : {5.0, 20.0}) {
        const auto q = custom_cheby_coeffs(
            [&](double x) { return std::exp(-t * (1.0 - x)); }, 200);
        const auto r = hkpr_cheby_coeffs(t, 200);
        double worst = 0.0;
        for (std::size_t k = 0; k <= 200; ++k)
            worst = std::max(worst, std::abs(q[k] - r[k]));
        ACC(c, worst <= 1e-10);
    }
}

TEST_CASE("C3 convergence acceleration") {
    Criterion c(3, "convergence-acceleration");
    const auto plan = plan_truncation(Kernel::ppr(0.02), 1e-5);
    ACC(c, plan.cheby_steps < plan.taylor_steps);
    const double ratio = static_cast<double>(plan.cheby_steps) /
                         std::sqrt(static_cast<double>(plan.taylor_steps));
    std::printf("[acceptance]     alpha=0.02 eps=1e-5: K=%zu N=%zu K/sqrt(N)=%.2f\n",
                plan.cheby_steps, plan.taylor_steps, ratio);
    ACC(c, static_cast<double>(plan.cheby_steps) <=
               2.0 * std::sqrt(static_cast<double>(plan.taylor_steps)) * std::log(1e5));

    const Graph g = oracles::make_graph(10000, 20000, 2024);
    const NodeId s = 17;
    for (const Kernel& kernel : {Kernel::ppr(0.02), Kernel::hkpr(20.0)}) {
        const NodeVector truth = ground_truth(g, kernel, s).values;
        const auto taylor_hit = first_hit_l1(g, kernel, s, truth, false, 1200);
        const auto cheby_hit = first_hit_l1(g, kernel, s, truth, true, 300);
        ACC(c, taylor_hit > 0);
        ACC(c, cheby_hit > 0);
        ACC(c, cheby_hit < taylor_hit);
        std::printf("[acceptance]     %s: taylor hits 1e-5 at %u, chebyshev at %u\n",
                    kernel.descriptor().c_str(), taylor_hit, cheby_hit);
    }
}

TEST_CASE("C4 l2 error within the coefficient tail") {
    Criterion c(4, "l2-tail-bound");
    std::vector<Graph> graphs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        graphs.push_back(oracles::make_graph(200 * seed, 300 * seed, seed));
    graphs.push_back(oracles::path3_graph());

    for (const Graph& g : graphs) {
        const NodeId s = g.node_count() / 2;
        for (const Kernel& kernel : {Kernel::ppr(0.2), Kernel::hkpr(5.0)}) {
            const NodeVector truth = ground_truth(g, kernel, s).values;
            for (double eps : {1e-3, 1e-6}) {
                const auto plan = plan_truncation(kernel, eps);
                const auto est = cheby_power(g, kernel, s, plan.cheby_steps);
                ACC(c, oracles::l2_diff(truth, est.values) <= plan.tail_bound);
            }
        }
    }
}

TEST_CASE("C5 degree-normalized error within eps_a") {
    Criterion c(5, "degree-normalized-bound");
    const Graph g = oracles::make_graph(20000, 80000, 2025);
    std::printf("[acceptance]     synthetic graph: n=%u m=%llu\n", g.node_count(),
                static_cast<unsigned long long>(g.edge_count()));
    for (const Kernel& kernel : {Kernel::ppr(0.2), Kernel::hkpr(5.0)}) {
        for (NodeId s : {NodeId{3}, NodeId{4242}}) {
            const NodeVector truth = ground_truth(g, kernel, s).values;
            for (double eps_a : {1e-5, 1e-7, 1e-9}) {
                const auto plan = plan_truncation(kernel, eps_a / 2.0);
                const auto est = cheby_push(g, kernel, s, plan.cheby_steps, eps_a);
                const auto err = measure(truth, est.values, g);
                ACC(c, err.deg_norm_inf < eps_a);
            }
        }
    }
}

TEST_CASE("C6 deviation identity brute force") {
    Criterion c(6, "deviation-identity");
    SplitMix64 pick(99);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 6 + pick.next_below(15);           // 6..20
        const std::size_t k = 3 + pick.next_below(13);           // 3..15
        const Graph g = oracles::make_graph(n, n, 1000 + trial);
        const NodeId s = static_cast<NodeId>(pick.next_below(g.node_count()));
        const auto sets = random_subsets(g, k - 1, 5000 + trial);
        const auto res = subset_recurrence_dense(g, s, sets);

        const auto p = oracles::dense_walk_matrix(g);
        NodeVector e(g.node_count(), 0.0);
        e[s] = 1.0;
        const NodeVector r_k = oracles::dense_cheby_apply(p, e, k);
        NodeVector rhs = res.iterates[k];
        for (std::size_t l = 1; l < k; ++l) {
            const NodeVector prop =
                oracles::dense_cheby_apply(p, res.deviations[l - 1], k - l);
            for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += 2.0 * prop[i];
        }
        ACC(c, oracles::linf_diff(r_k, rhs) <= 1e-10);
    }
}

TEST_CASE("C7 local state matches the dense recurrence") {
    Criterion c(7, "local-state-identity");
    for (std::uint64_t seed = 300; seed < 312; ++seed) {
        const Graph g = oracles::make_graph(16 + seed % 10, 20, seed);
        const Kernel kernel = seed % 2 == 0 ? Kernel::ppr(0.2) : Kernel::hkpr(5.0);
        const std::size_t K = 12;
        ChebyPushTrace trace;
        cheby_push(g, kernel, static_cast<NodeId>(seed % g.node_count()), K,
                   1e-2, &trace);
        std::vector<NodeSet> sets;
        for (const auto& s : trace.pushed_sets) sets.push_back(NodeSet::of(g, s));
        const auto res = subset_recurrence_dense(
            g, static_cast<NodeId>(seed % g.node_count()), sets);
        for (std::size_t k = 1; k <= K; ++k)
            ACC(c, oracles::linf_diff(trace.residual_after_swap[k - 1],
                                      res.iterates[k + 1]) <= 1e-12);
    }
}

TEST_CASE("C8 worked star-graph trace") {
    Criterion c(8, "star-graph-trace");
    const Graph g = oracles::star_graph();
    // f = (T_1 + T_2)/2 gives step thresholds 0.2 and 0.4: the hub pushes at
    // step 1, only the two heavy leaves push at step 2.
    const Kernel kernel = Kernel::custom({-0.5, 0.5, 1.0});
    ChebyPushTrace trace;
    cheby_push(g, kernel, 1, 2, 1.6, &trace);

    const NodeVector& r2 = trace.residual_after_swap[0];
    ACC(c, std::abs(r2[0] - 0.0) <= 1e-15);
    ACC(c, std::abs(r2[1] - (-1.0 / 3.0)) <= 1e-15);
    ACC(c, std::abs(r2[2] - 2.0 / 3.0) <= 1e-15);
    ACC(c, std::abs(r2[3] - 2.0 / 3.0) <= 1e-15);

    const NodeVector& r3 = trace.residual_after_swap[1];
    ACC(c, std::abs(r3[0] - 5.0 / 3.0) <= 1e-15);
    ACC(c, std::abs(r3[1] - 0.0) <= 1e-15);
    ACC(c, std::abs(r3[2] - 0.0) <= 1e-15);
    ACC(c, std::abs(r3[3] - 0.0) <= 1e-15);
}

TEST_CASE("C9 zero-threshold degeneracies") {
    Criterion c(9, "zero-threshold-degeneracy");
    for (std::uint64_t seed = 400; seed < 403; ++seed) {
        const Graph g = oracles::make_graph(120, 200, seed);
        const NodeId s = static_cast<NodeId>(seed % g.node_count());
        for (const Kernel& kernel : {Kernel::ppr(0.2), Kernel::hkpr(5.0)}) {
            const auto local = cheby_push(g, kernel, s, 30, 0.0);
            const auto global = cheby_power(g, kernel, s, 30);
            ACC(c, oracles::linf_diff(local.values, global.values) <= 1e-12);

            const auto pushed = push(g, kernel, s, 40, {});
            const auto powered = power_method(g, kernel, s, 40);
            ACC(c, oracles::linf_diff(pushed.values, powered.values) <= 1e-12);
        }
    }
}

TEST_CASE("C10 residual bound and invariant") {
    Criterion c(10, "residual-bound-and-invariant");
    {
        const Graph g = oracles::make_graph(2000, 4000, 77);
        const double alpha = 0.2;
        const auto cfg =
            RandomWalkConfig::plan(g.node_count(), alpha, 0.5, 1.0 / g.node_count(), 7);
        const Kernel kernel = Kernel::ppr(alpha);
        const auto plan = plan_truncation(kernel, cfg.r_max);
        for (NodeId s : {NodeId{0}, NodeId{999}}) {
            const auto phase1 = cheby_push(g, kernel, s, plan.cheby_steps, cfg.r_max);
            const auto residual = compute_residual(g, alpha, phase1.values, s);
            ACC(c, residual.max_degree_normalized(g) <= cfg.r_max);
        }
    }
    {
        const Graph g = oracles::make_graph(5, 4, 21);
        const double alpha = 0.2;
        const NodeId s = 1;
        const auto est = cheby_push(g, Kernel::ppr(alpha), s, 6, 0.01);
        const auto residual = compute_residual(g, alpha, est.values, s);
        const NodeVector pi_s = oracles::dense_ppr_source(g, alpha, s);
        NodeVector reconstructed = est.values;
        for (const auto& [v, rv] : residual.entries) {
            const NodeVector pi_v = oracles::dense_ppr_source(g, alpha, v);
            for (NodeId u = 0; u < g.node_count(); ++u)
                reconstructed[u] += rv * pi_v[u];
        }
        ACC(c, oracles::linf_diff(pi_s, reconstructed) <= 1e-10);
    }
}

TEST_CASE("C11 bidirectional relative-error guarantee") {
    Criterion c(11, "bidirectional-guarantee");
    const Graph g = oracles::make_graph(1000, 2000, 88);
    const double alpha = 0.2, eps_r = 0.5;
    const double delta = 1.0 / static_cast<double>(g.node_count());
    const NodeId s = 31;
    const NodeVector truth = ground_truth(g, Kernel::ppr(alpha), s).values;

    std::size_t significant = 0, violations = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto cfg = RandomWalkConfig::plan(g.node_count(), alpha, eps_r, delta, seed);
        const auto plan = plan_truncation(Kernel::ppr(alpha), cfg.r_max);
        const auto est = cheby_push_rw(g, alpha, s, cfg, plan.cheby_steps);
        for (NodeId u = 0; u < g.node_count(); ++u) {
            if (truth[u] <= delta) continue;
            ++significant;
            if (std::abs(truth[u] - est.values[u]) >= eps_r * truth[u]) ++violations;
        }
    }
    std::printf("[acceptance]     %zu significant nodes across seeds, %zu violations\n",
                significant, violations);
    ACC(c, significant > 0);
    ACC(c, static_cast<double>(violations) <= 0.01 * static_cast<double>(significant));
}

TEST_CASE("C12 generalized propagation via conjugation") {
    Criterion c(12, "generalized-propagation");
    std::vector<Graph> graphs = {oracles::path3_graph(), oracles::make_graph(5, 4, 61),
                                 oracles::make_graph(8, 8, 62),
                                 oracles::make_graph(10, 12, 63)};
    for (const Graph& g : graphs) {
        const NodeVector x = oracles::random_vector(g.node_count(), 64, 0.0, 1.0);
        const auto m = oracles::dense_symmetric_matrix(g);
        {
            const Kernel kernel = Kernel::ppr(0.2);
            GpParams params{.steps = plan_truncation(kernel, 1e-13).cheby_steps,
                            .eps_a = 0.0,
                            .thresholds = {}};
            const NodeVector z =
                general_gp_vector(g, kernel, 0.5, x, Algorithm::ChebyPower, params);
            const NodeVector exact = oracles::dense_ppr(m, 0.2, x);
            ACC(c, oracles::linf_diff(z, exact) <= 1e-10);
        }
        {
            const Kernel kernel = Kernel::hkpr(5.0);
            GpParams params{.steps = plan_truncation(kernel, 1e-13).cheby_steps,
                            .eps_a = 0.0,
                            .thresholds = {}};
            const NodeVector z =
                general_gp_vector(g, kernel, 0.5, x, Algorithm::ChebyPower, params);
            const NodeVector exact =
                oracles::dense_series(m, kernel.taylor_coeffs(400), x);
            ACC(c, oracles::linf_diff(z, exact) <= 1e-10);
        }
    }
}

TEST_CASE("C13 residual mass conservation") {
    Criterion c(13, "residual-mass-conservation");
    for (std::uint64_t seed = 500; seed < 503; ++seed) {
        const Graph g = oracles::make_graph(200, 350, seed);
        double worst = 0.0;
        cheby_power(g, Kernel::ppr(0.2), static_cast<NodeId>(seed % g.node_count()), 50,
                    [&](std::uint32_t, const NodeVector& r, const NodeVector&) {
                        worst = std::max(worst, std::abs(oracles::sum(r) - 1.0));
                    });
        ACC(c, worst <= 1e-9);
    }
}
