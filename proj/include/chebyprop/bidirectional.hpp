#pragma once

#include <cstdint>
#include <vector>

#include "chebyprop/graph.hpp"
#include "chebyprop/rng.hpp"
#include "chebyprop/solvers.hpp"

namespace chebyprop {

// Walk-phase configuration. Built by plan() so that the invariants
//   walk_budget = ceil(2 (2 eps_r/3 + 2) ln n / (eps_r^2 delta))
//   r_max = sqrt(alpha) / walk_budget
// hold; violating them is rejected by cheby_push_rw.
struct RandomWalkConfig {
    double alpha = 0.2;
    double eps_r = 0.5;   // target relative error
    double delta = 0.0;   // significance threshold
    std::uint64_t walk_budget = 0; // W
    double r_max = 0.0;            // push threshold
    std::uint64_t seed = 0;

    static RandomWalkConfig plan(std::size_t n_nodes, double alpha, double eps_r,
                                 double delta, std::uint64_t seed);
};

struct ResidualEntry {
    NodeId node;
    double value; // signed
};

// Sparse signed residual, sorted by node id (deterministic iteration).
struct ResidualVector {
    std::vector<ResidualEntry> entries;

    double max_degree_normalized(const Graph& g) const;
};

// r = e_s - (1/alpha) [I - (1-alpha) P] pi_hat; entries below 1e-16 absolute
// are dropped.
ResidualVector compute_residual(const Graph& g, double alpha,
                                const NodeVector& pi_hat, NodeId source);

// One alpha-walk: stop with probability alpha at each visited node, otherwise
// hop to a uniform neighbor. Returns the terminal; n_steps (when given)
// counts the visited nodes including the start.
NodeId alpha_random_walk(const Graph& g, NodeId start, double alpha,
                         SplitMix64& rng, std::uint64_t* n_steps = nullptr);

using TerminalSampler = NodeId (*)(const Graph&, NodeId, double, SplitMix64&,
                                   std::uint64_t*);

// Monte-Carlo correction: for each residual entry v, launches
// W_v = ceil(|r(v)| W) walks from v with a stream derived from (seed, v) and
// adds r(v)/W_v at each terminal. Returns the signed increment vector.
NodeVector walk_phase_increment(const Graph& g, const ResidualVector& residual,
                                double alpha, std::uint64_t walk_budget,
                                std::uint64_t seed,
                                std::uint64_t* walks_done = nullptr,
                                TerminalSampler sampler = &alpha_random_walk);

// Two-phase SSPPR estimator: cheby_push at threshold r_max, then random-walk
// refinement of the residual. Identical seeds give bit-identical output.
Estimate cheby_push_rw(const Graph& g, double alpha, NodeId source,
                       const RandomWalkConfig& cfg, std::size_t cheby_steps,
                       TerminalSampler sampler = &alpha_random_walk);

} // namespace chebyprop
