#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chebyprop/graph.hpp"
#include "chebyprop/kernels.hpp"

namespace chebyprop {

enum class Algorithm { PwMethod, Push, ChebyPower, ChebyPush, ChebyPushRw };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct SolveStats {
    std::uint32_t iterations = 0;
    std::uint64_t push_work = 0; // total degree volume processed
    std::uint64_t walks = 0;     // second-phase walks (bidirectional only)
    double wall_seconds = 0.0;
    std::string algorithm;
    std::string params;
};

struct Estimate {
    NodeVector values;
    SolveStats stats;
};

// Called after each iteration with the current residual and partial estimate.
using StepObserver =
    std::function<void(std::uint32_t step, const NodeVector& residual,
                       const NodeVector& estimate)>;

// y_hat = sum_{k=0}^{N-1} zeta_k P^k seed via dense power iteration.
Estimate power_method(const Graph& g, const Kernel& kernel, NodeId source,
                      std::size_t n_steps, const StepObserver& observer = {});
Estimate power_method_vec(const Graph& g, const Kernel& kernel,
                          const NodeVector& seed, std::size_t n_steps,
                          const StepObserver& observer = {});

// Taylor-basis push: at step k only nodes with r_k(u) > eps_k d_u propagate;
// untouched residual mass is retained in r_k and never spreads.
// step_thresholds[k] is eps_k; the last entry repeats, empty means all zero.
Estimate push(const Graph& g, const Kernel& kernel, NodeId source,
              std::size_t n_steps, const std::vector<double>& step_thresholds);
Estimate push_vec(const Graph& g, const Kernel& kernel, const NodeVector& seed,
                  std::size_t n_steps, const std::vector<double>& step_thresholds);

// Threshold schedule making the pruned Taylor mass stay below eps_a overall,
// mirroring the Chebyshev schedule: eps_k = eps_a / (N * sum_{l>=k} zeta_l).
std::vector<double> taylor_push_thresholds(const Kernel& kernel,
                                           std::size_t n_steps, double eps_a);

// y_hat = sum_{k=0}^{K} c_k T_k(P) seed via the three-term recurrence
// r_{k+1} = 2 P r_k - r_{k-1}.
Estimate cheby_power(const Graph& g, const Kernel& kernel, NodeId source,
                     std::size_t cheby_steps, const StepObserver& observer = {});
Estimate cheby_power_vec(const Graph& g, const Kernel& kernel,
                         const NodeVector& seed, std::size_t cheby_steps,
                         const StepObserver& observer = {});

// Per-iteration record of the localized recurrence, for validation on small
// graphs: the realized push sets S_k and the r_cur state after each swap.
struct ChebyPushTrace {
    std::vector<std::vector<NodeId>> pushed_sets;
    std::vector<NodeVector> residual_after_swap;
};

// Local two-buffer implementation of the subset Chebyshev recurrence.
// Starting from y_hat = c_0 seed, r_cur = P seed, r_new = -seed, iteration k
// (k = 1..K) pushes every tracked node with |r_cur(u)| > eps_k d_u, where
// eps_k = eps_a / (4 K sum_{l=k}^{K} |c_l|), then swaps the buffers.
// With eps_a = 0 the output matches cheby_power at the same K.
Estimate cheby_push(const Graph& g, const Kernel& kernel, NodeId source,
                    std::size_t cheby_steps, double eps_a,
                    ChebyPushTrace* trace = nullptr);
Estimate cheby_push_vec(const Graph& g, const Kernel& kernel,
                        const NodeVector& seed, std::size_t cheby_steps,
                        double eps_a, ChebyPushTrace* trace = nullptr);

// Literal dense evaluation of the subset recurrence
//   r_{k+1} = 2 P (r_k|_{S_k}) - r_{k-1}|_{S_{k-1}} + r_{k-1}|_{V-S_{k-1}},
// used as a reference for the local implementation. sets[i] is S_{i+1};
// S_0 = V implicitly. Returns iterates r_0 .. r_{L+1} for L = sets.size()
// and the per-step deviations delta_1 .. delta_L (r_l outside S_l).
struct SubsetRecurrenceResult {
    std::vector<NodeVector> iterates;
    std::vector<NodeVector> deviations;
};
SubsetRecurrenceResult subset_recurrence_dense(const Graph& g, NodeId source,
                                               const std::vector<NodeSet>& sets);

// Solver parameters for the generalized-propagation wrapper.
struct GpParams {
    std::size_t steps = 1;              // N or K depending on the algorithm
    double eps_a = 0.0;                 // cheby_push threshold
    std::vector<double> thresholds;     // push schedule (empty = exact)
};

// z = D^-a f(P) D^a x evaluated with the chosen solver (a + b = 1 convention).
NodeVector general_gp_vector(const Graph& g, const Kernel& kernel, double a,
                             const NodeVector& x, Algorithm algo,
                             const GpParams& params);
std::vector<NodeVector> general_gp_matrix(const Graph& g, const Kernel& kernel,
                                          double a,
                                          const std::vector<NodeVector>& columns,
                                          Algorithm algo, const GpParams& params);

} // namespace chebyprop
