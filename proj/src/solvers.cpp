#include "chebyprop/solvers.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>

#include "chebyprop/error.hpp"

namespace chebyprop {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

NodeVector unit_vector(const Graph& g, NodeId source) {
    if (source >= g.node_count())
        throw ParameterError("source node " + std::to_string(source) + " out of range");
    NodeVector e(g.node_count(), 0.0);
    e[source] = 1.0;
    return e;
}

void check_seed(const Graph& g, const NodeVector& seed) {
    if (seed.size() != g.node_count())
        throw ParameterError("seed vector length mismatch");
}

// Membership-tracked sparse buffer over a dense vector: nodes enter `list`
// the first time they are touched and stay until explicitly cleared.
struct TrackedBuffer {
    NodeVector values;
    std::vector<NodeId> list;
    std::vector<std::uint8_t> member;

    explicit TrackedBuffer(std::size_t n) : values(n, 0.0), member(n, 0) {}

    void track(NodeId u) {
        if (!member[u]) {
            member[u] = 1;
            list.push_back(u);
        }
    }

    void clear() {
        for (NodeId u : list) {
            values[u] = 0.0;
            member[u] = 0;
        }
        list.clear();
    }
};

} // namespace

std::string algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::PwMethod: return "pw";
    case Algorithm::Push: return "push";
    case Algorithm::ChebyPower: return "chebypower";
    case Algorithm::ChebyPush: return "chebypush";
    case Algorithm::ChebyPushRw: return "chebypush-rw";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "pw") return Algorithm::PwMethod;
    if (name == "push") return Algorithm::Push;
    if (name == "chebypower") return Algorithm::ChebyPower;
    if (name == "chebypush") return Algorithm::ChebyPush;
    if (name == "chebypush-rw") return Algorithm::ChebyPushRw;
    throw ParameterError("unknown algorithm \"" + name + "\"");
}

Estimate power_method_vec(const Graph& g, const Kernel& kernel,
                          const NodeVector& seed, std::size_t n_steps,
                          const StepObserver& observer) {
    check_seed(g, seed);
    if (n_steps < 1) throw ParameterError("power_method: n_steps must be >= 1");
    const auto start = Clock::now();
    const NodeId n = g.node_count();
    const auto zeta = kernel.taylor_coeffs(n_steps - 1);

    Estimate est;
    est.values.assign(n, 0.0);
    NodeVector r = seed, next(n, 0.0);
    std::uint64_t work = 0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double z = zeta[k];
        for (NodeId u = 0; u < n; ++u) est.values[u] += z * r[u];
        if (observer) observer(static_cast<std::uint32_t>(k), r, est.values);
        if (k + 1 < n_steps) {
            apply_walk_into(g, r, next);
            r.swap(next);
            work += g.volume();
        }
    }
    est.stats.iterations = static_cast<std::uint32_t>(n_steps);
    est.stats.push_work = work;
    est.stats.algorithm = "pw";
    est.stats.params = "N=" + std::to_string(n_steps);
    est.stats.wall_seconds = seconds_since(start);
    return est;
}

Estimate power_method(const Graph& g, const Kernel& kernel, NodeId source,
                      std::size_t n_steps, const StepObserver& observer) {
    return power_method_vec(g, kernel, unit_vector(g, source), n_steps, observer);
}

std::vector<double> taylor_push_thresholds(const Kernel& kernel,
                                           std::size_t n_steps, double eps_a) {
    if (n_steps < 1) throw ParameterError("taylor_push_thresholds: n_steps must be >= 1");
    if (eps_a < 0.0) throw ParameterError("taylor_push_thresholds: eps_a must be >= 0");
    const auto zeta = kernel.taylor_coeffs(n_steps - 1);
    std::vector<double> suffix(n_steps + 1, 0.0);
    for (std::size_t k = n_steps; k-- > 0;)
        suffix[k] = suffix[k + 1] + std::abs(zeta[k]);
    std::vector<double> eps(n_steps, 0.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
        eps[k] = suffix[k] > 0.0
                     ? eps_a / (static_cast<double>(n_steps) * suffix[k])
                     : std::numeric_limits<double>::infinity();
    }
    return eps;
}

Estimate push_vec(const Graph& g, const Kernel& kernel, const NodeVector& seed,
                  std::size_t n_steps, const std::vector<double>& step_thresholds) {
    check_seed(g, seed);
    if (n_steps < 1) throw ParameterError("push: n_steps must be >= 1");
    for (double e : step_thresholds)
        if (!(e >= 0.0)) throw ParameterError("push: thresholds must be nonnegative");
    const auto start = Clock::now();
    const NodeId n = g.node_count();
    const auto zeta = kernel.taylor_coeffs(n_steps - 1);
    auto threshold_at = [&](std::size_t k) {
        if (step_thresholds.empty()) return 0.0;
        return k < step_thresholds.size() ? step_thresholds[k] : step_thresholds.back();
    };

    Estimate est;
    est.values.assign(n, 0.0);
    TrackedBuffer cur(n), next(n);
    for (NodeId u = 0; u < n; ++u) {
        if (seed[u] != 0.0) {
            cur.values[u] = seed[u];
            cur.track(u);
        }
    }

    std::uint64_t work = 0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double z = zeta[k];
        const double eps_k = threshold_at(k);
        for (NodeId u : cur.list) {
            const double ru = cur.values[u];
            if (!(ru > eps_k * static_cast<double>(g.degree(u)))) continue;
            est.values[u] += z * ru;
            const double w = ru * g.inv_degree(u);
            for (NodeId v : g.neighbors(u)) {
                next.track(v);
                next.values[v] += w;
            }
            cur.values[u] = 0.0;
            work += g.degree(u);
        }
        // Mass that failed the threshold stays behind and never propagates.
        cur.clear();
        std::swap(cur, next);
    }
    est.stats.iterations = static_cast<std::uint32_t>(n_steps);
    est.stats.push_work = work;
    est.stats.algorithm = "push";
    est.stats.params = "N=" + std::to_string(n_steps);
    est.stats.wall_seconds = seconds_since(start);
    return est;
}

Estimate push(const Graph& g, const Kernel& kernel, NodeId source,
              std::size_t n_steps, const std::vector<double>& step_thresholds) {
    return push_vec(g, kernel, unit_vector(g, source), n_steps, step_thresholds);
}

Estimate cheby_power_vec(const Graph& g, const Kernel& kernel,
                         const NodeVector& seed, std::size_t cheby_steps,
                         const StepObserver& observer) {
    check_seed(g, seed);
    if (cheby_steps < 1) throw ParameterError("cheby_power: cheby_steps must be >= 1");
    const auto start = Clock::now();
    const NodeId n = g.node_count();
    const std::size_t K = cheby_steps;
    const auto c = kernel.cheby_coeffs(K);

    Estimate est;
    est.values.assign(n, 0.0);
    for (NodeId u = 0; u < n; ++u) est.values[u] = c[0] * seed[u];

    NodeVector r_prev = seed;          // T_{k-1}(P) seed
    NodeVector r_cur = apply_walk(g, seed); // T_k(P) seed
    NodeVector tmp(n, 0.0);
    std::uint64_t work = g.volume();
    if (observer) observer(0, r_prev, est.values);

    for (std::size_t k = 1; k < K; ++k) {
        for (NodeId u = 0; u < n; ++u) est.values[u] += c[k] * r_cur[u];
        if (observer) observer(static_cast<std::uint32_t>(k), r_cur, est.values);
        apply_walk_into(g, r_cur, tmp);
        for (NodeId u = 0; u < n; ++u) r_prev[u] = 2.0 * tmp[u] - r_prev[u];
        r_prev.swap(r_cur);
        work += g.volume();
    }
    for (NodeId u = 0; u < n; ++u) est.values[u] += c[K] * r_cur[u];
    if (observer) observer(static_cast<std::uint32_t>(K), r_cur, est.values);

    est.stats.iterations = static_cast<std::uint32_t>(K);
    est.stats.push_work = work;
    est.stats.algorithm = "chebypower";
    est.stats.params = "K=" + std::to_string(K);
    est.stats.wall_seconds = seconds_since(start);
    return est;
}

Estimate cheby_power(const Graph& g, const Kernel& kernel, NodeId source,
                     std::size_t cheby_steps, const StepObserver& observer) {
    return cheby_power_vec(g, kernel, unit_vector(g, source), cheby_steps, observer);
}

Estimate cheby_push_vec(const Graph& g, const Kernel& kernel,
                        const NodeVector& seed, std::size_t cheby_steps,
                        double eps_a, ChebyPushTrace* trace) {
    check_seed(g, seed);
    if (cheby_steps < 1) throw ParameterError("cheby_push: cheby_steps must be >= 1");
    if (!(eps_a >= 0.0)) throw ParameterError("cheby_push: eps_a must be >= 0");
    const auto start = Clock::now();
    const NodeId n = g.node_count();
    const std::size_t K = cheby_steps;
    const auto c = kernel.cheby_coeffs(K);
    std::vector<double> suffix(K + 2, 0.0); // suffix[k] = sum_{l=k}^{K} |c_l|
    for (std::size_t k = K + 1; k-- > 1;) suffix[k] = suffix[k + 1] + std::abs(c[k]);

    Estimate est;
    est.values.assign(n, 0.0);
    for (NodeId u = 0; u < n; ++u) est.values[u] = c[0] * seed[u];

    TrackedBuffer cur(n), next(n);
    std::uint64_t work = 0;
    for (NodeId u = 0; u < n; ++u) {
        if (seed[u] == 0.0) continue;
        next.values[u] = -seed[u]; // r_new = -seed
        next.track(u);
        const double w = seed[u] * g.inv_degree(u); // r_cur = P seed
        for (NodeId v : g.neighbors(u)) {
            cur.track(v);
            cur.values[v] += w;
        }
        work += g.degree(u);
    }

    for (std::size_t k = 1; k <= K; ++k) {
        // Remaining-coefficient mass scales the per-step budget; once it
        // underflows to 0 nothing representable is left to gain by pushing.
        const double eps_k = suffix[k] > 0.0
                                 ? eps_a / (4.0 * static_cast<double>(K) * suffix[k])
                                 : std::numeric_limits<double>::infinity();
        std::vector<NodeId> pushed;
        const std::size_t tracked = cur.list.size(); // pushes only touch `next`
        for (std::size_t i = 0; i < tracked; ++i) {
            const NodeId u = cur.list[i];
            const double ru = cur.values[u];
            if (!(std::abs(ru) > eps_k * static_cast<double>(g.degree(u)))) continue;
            est.values[u] += c[k] * ru;
            const double w = 2.0 * ru * g.inv_degree(u);
            for (NodeId v : g.neighbors(u)) {
                next.track(v);
                next.values[v] += w;
            }
            cur.values[u] = -ru;
            work += g.degree(u);
            if (trace) pushed.push_back(u);
        }
        std::swap(cur, next);
        if (trace) {
            trace->pushed_sets.push_back(std::move(pushed));
            trace->residual_after_swap.push_back(cur.values);
        }
    }

    est.stats.iterations = static_cast<std::uint32_t>(K);
    est.stats.push_work = work;
    est.stats.algorithm = "chebypush";
    est.stats.params = "K=" + std::to_string(K) + ",eps_a=" + format_double(eps_a);
    est.stats.wall_seconds = seconds_since(start);
    return est;
}

Estimate cheby_push(const Graph& g, const Kernel& kernel, NodeId source,
                    std::size_t cheby_steps, double eps_a, ChebyPushTrace* trace) {
    return cheby_push_vec(g, kernel, unit_vector(g, source), cheby_steps, eps_a, trace);
}

SubsetRecurrenceResult subset_recurrence_dense(const Graph& g, NodeId source,
                                               const std::vector<NodeSet>& sets) {
    const NodeId n = g.node_count();
    if (source >= n) throw ParameterError("subset_recurrence_dense: source out of range");
    const std::size_t L = sets.size();

    // Independent gather-style restricted walk, deliberately not sharing the
    // scatter code path used by the solvers.
    std::vector<std::uint8_t> mask(n, 0);
    auto restricted_walk = [&](const NodeVector& x, const NodeSet& s) {
        for (NodeId u : s.members) mask[u] = 1;
        NodeVector out(n, 0.0);
        for (NodeId v = 0; v < n; ++v) {
            double acc = 0.0;
            for (NodeId u : g.neighbors(v))
                if (mask[u]) acc += x[u] * g.inv_degree(u);
            out[v] = acc;
        }
        for (NodeId u : s.members) mask[u] = 0;
        return out;
    };
    auto split = [&](const NodeVector& x, const NodeSet& s) {
        for (NodeId u : s.members) mask[u] = 1;
        NodeVector inside(n, 0.0), outside(n, 0.0);
        for (NodeId v = 0; v < n; ++v) (mask[v] ? inside[v] : outside[v]) = x[v];
        for (NodeId u : s.members) mask[u] = 0;
        return std::pair{inside, outside};
    };

    SubsetRecurrenceResult res;
    res.iterates.reserve(L + 2);
    NodeVector e(n, 0.0);
    e[source] = 1.0;
    res.iterates.push_back(e);
    res.iterates.push_back(apply_walk(g, e));

    for (std::size_t k = 1; k <= L; ++k) {
        const NodeVector& r_k = res.iterates[k];
        NodeVector next = restricted_walk(r_k, sets[k - 1]);
        for (NodeId u = 0; u < n; ++u) next[u] *= 2.0;
        if (k == 1) {
            // S_0 = V: the k-1 term is just -r_0.
            for (NodeId u = 0; u < n; ++u) next[u] -= res.iterates[0][u];
        } else {
            auto [inside, outside] = split(res.iterates[k - 1], sets[k - 2]);
            for (NodeId u = 0; u < n; ++u) next[u] += outside[u] - inside[u];
        }
        auto parts = split(r_k, sets[k - 1]);
        res.deviations.push_back(std::move(parts.second));
        res.iterates.push_back(std::move(next));
    }
    return res;
}

namespace {

Estimate run_solver_vec(const Graph& g, const Kernel& kernel,
                        const NodeVector& seed, Algorithm algo,
                        const GpParams& params) {
    switch (algo) {
    case Algorithm::PwMethod:
        return power_method_vec(g, kernel, seed, params.steps);
    case Algorithm::Push:
        return push_vec(g, kernel, seed, params.steps, params.thresholds);
    case Algorithm::ChebyPower:
        return cheby_power_vec(g, kernel, seed, params.steps);
    case Algorithm::ChebyPush:
        return cheby_push_vec(g, kernel, seed, params.steps, params.eps_a);
    case Algorithm::ChebyPushRw:
        break;
    }
    throw ParameterError("general_gp_vector: unsupported algorithm");
}

} // namespace

NodeVector general_gp_vector(const Graph& g, const Kernel& kernel, double a,
                             const NodeVector& x, Algorithm algo,
                             const GpParams& params) {
    check_seed(g, x);
    const NodeId n = g.node_count();
    NodeVector scaled(n);
    for (NodeId u = 0; u < n; ++u)
        scaled[u] = std::pow(static_cast<double>(g.degree(u)), a) * x[u];
    Estimate est = run_solver_vec(g, kernel, scaled, algo, params);
    NodeVector z(n);
    for (NodeId u = 0; u < n; ++u)
        z[u] = std::pow(static_cast<double>(g.degree(u)), -a) * est.values[u];
    return z;
}

std::vector<NodeVector> general_gp_matrix(const Graph& g, const Kernel& kernel,
                                          double a,
                                          const std::vector<NodeVector>& columns,
                                          Algorithm algo, const GpParams& params) {
    std::vector<NodeVector> out;
    out.reserve(columns.size());
    for (const auto& x : columns)
        out.push_back(general_gp_vector(g, kernel, a, x, algo, params));
    return out;
}

} // namespace chebyprop
