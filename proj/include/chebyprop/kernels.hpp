#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace chebyprop {

enum class KernelFamily { Ppr, Hkpr, Custom };

// A propagation function f identified by its family, able to produce the
// power-basis coefficients zeta_k and the Chebyshev-basis coefficients c_k
// of its expansion on [-1, 1].
class Kernel {
public:
    static Kernel ppr(double alpha);
    static Kernel hkpr(double t);
    static Kernel custom(std::vector<double> taylor);

    KernelFamily family() const { return family_; }
    double alpha() const;
    double t() const;
    const std::vector<double>& custom_taylor() const;

    // zeta_0 .. zeta_max_index (length max_index + 1).
    std::vector<double> taylor_coeffs(std::size_t max_index) const;
    // c_0 .. c_max_index (length max_index + 1).
    std::vector<double> cheby_coeffs(std::size_t max_index) const;

    // Scalar f(x) on [-1, 1].
    double eval(double x) const;

    // Canonical spec string, e.g. "ppr:alpha=0.2".
    std::string descriptor() const;

private:
    Kernel() = default;
    KernelFamily family_ = KernelFamily::Ppr;
    double param_ = 0.0;
    std::vector<double> taylor_;
};

// Truncation steps achieving a target tolerance via exact tail sums.
// cheby_steps K keeps terms c_0..c_K with tail sum_{k>K} |c_k| < epsilon;
// taylor_steps N keeps terms zeta_0..zeta_{N-1} with tail sum_{k>=N} < epsilon
// (each matches what the corresponding iteration actually accumulates).
struct TruncationPlan {
    std::size_t cheby_steps = 1;  // K
    std::size_t taylor_steps = 1; // N
    double epsilon = 0.0;
    double tail_bound = 0.0; // achieved Chebyshev tail at K
};

// [gamma, 2*gamma*beta, 2*gamma*beta^2, ...] with
// gamma = alpha/sqrt(2*alpha - alpha^2), beta = (1-alpha)/(1+sqrt(2*alpha-alpha^2)).
std::vector<double> ppr_cheby_coeffs(double alpha, std::size_t max_index);

// [e^-t I_0(t), 2 e^-t I_1(t), ...] via Miller's backward recurrence,
// normalized with e^-t (I_0 + 2 sum_{k>=1} I_k) = 1.
std::vector<double> hkpr_cheby_coeffs(double t, std::size_t max_index);

// Chebyshev coefficients of an arbitrary scalar f by Gauss-Chebyshev
// quadrature, doubling the node count until successive estimates agree to
// 1e-12 absolute (node cap 2^16).
std::vector<double> custom_cheby_coeffs(const std::function<double(double)>& f,
                                        std::size_t max_index);

TruncationPlan plan_truncation(const Kernel& kernel, double epsilon);

// Parses "ppr:alpha=0.2", "hkpr:t=5" or "custom:file=coeffs.json" (a JSON
// array of Taylor coefficients).
Kernel parse_kernel_spec(const std::string& spec);

} // namespace chebyprop
