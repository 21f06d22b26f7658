#include "chebyprop/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "chebyprop/error.hpp"

namespace chebyprop {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void check_ppr_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ParameterError("ppr: alpha must lie in (0,1), got " + format_double(alpha));
}

void check_hkpr_t(double t) {
    if (!(t > 0.0)) throw ParameterError("hkpr: t must be positive, got " + format_double(t));
}

} // namespace

Kernel Kernel::ppr(double alpha) {
    check_ppr_alpha(alpha);
    Kernel k;
    k.family_ = KernelFamily::Ppr;
    k.param_ = alpha;
    return k;
}

Kernel Kernel::hkpr(double t) {
    check_hkpr_t(t);
    Kernel k;
    k.family_ = KernelFamily::Hkpr;
    k.param_ = t;
    return k;
}

Kernel Kernel::custom(std::vector<double> taylor) {
    if (taylor.empty()) throw ParameterError("custom kernel needs at least one Taylor coefficient");
    for (double z : taylor)
        if (!std::isfinite(z)) throw ParameterError("custom kernel: non-finite Taylor coefficient");
    Kernel k;
    k.family_ = KernelFamily::Custom;
    k.taylor_ = std::move(taylor);
    return k;
}

double Kernel::alpha() const {
    if (family_ != KernelFamily::Ppr) throw ParameterError("kernel is not ppr");
    return param_;
}

double Kernel::t() const {
    if (family_ != KernelFamily::Hkpr) throw ParameterError("kernel is not hkpr");
    return param_;
}

const std::vector<double>& Kernel::custom_taylor() const {
    if (family_ != KernelFamily::Custom) throw ParameterError("kernel is not custom");
    return taylor_;
}

std::vector<double> Kernel::taylor_coeffs(std::size_t max_index) const {
    std::vector<double> zeta(max_index + 1, 0.0);
    switch (family_) {
    case KernelFamily::Ppr: {
        double z = param_; // alpha * (1-alpha)^k, built iteratively
        for (std::size_t k = 0; k <= max_index; ++k) {
            zeta[k] = z;
            z *= 1.0 - param_;
        }
        break;
    }
    case KernelFamily::Hkpr: {
        double z = std::exp(-param_); // e^-t t^k / k!, built iteratively
        for (std::size_t k = 0; k <= max_index; ++k) {
            zeta[k] = z;
            z *= param_ / static_cast<double>(k + 1);
        }
        break;
    }
    case KernelFamily::Custom:
        for (std::size_t k = 0; k <= max_index && k < taylor_.size(); ++k)
            zeta[k] = taylor_[k];
        break;
    }
    return zeta;
}

std::vector<double> Kernel::cheby_coeffs(std::size_t max_index) const {
    switch (family_) {
    case KernelFamily::Ppr:
        return ppr_cheby_coeffs(param_, max_index);
    case KernelFamily::Hkpr:
        return hkpr_cheby_coeffs(param_, max_index);
    case KernelFamily::Custom:
        return custom_cheby_coeffs([this](double x) { return eval(x); }, max_index);
    }
    return {};
}

double Kernel::eval(double x) const {
    switch (family_) {
    case KernelFamily::Ppr:
        return param_ / (1.0 - (1.0 - param_) * x);
    case KernelFamily::Hkpr:
        return std::exp(-param_ * (1.0 - x));
    case KernelFamily::Custom: {
        double acc = 0.0;
        for (std::size_t k = taylor_.size(); k-- > 0;) acc = acc * x + taylor_[k];
        return acc;
    }
    }
    return 0.0;
}

std::string Kernel::descriptor() const {
    switch (family_) {
    case KernelFamily::Ppr:
        return "ppr:alpha=" + format_double(param_);
    case KernelFamily::Hkpr:
        return "hkpr:t=" + format_double(param_);
    case KernelFamily::Custom: {
        // Content hash so distinct coefficient files key distinct caches.
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (double z : taylor_) {
            std::uint64_t bits;
            std::memcpy(&bits, &z, sizeof(bits));
            for (int i = 0; i < 8; ++i) {
                h ^= (bits >> (8 * i)) & 0xff;
                h *= 0x100000001b3ull;
            }
        }
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
        return "custom:k=" + std::to_string(taylor_.size()) + ":h=" + hex;
    }
    }
    return {};
}

std::vector<double> ppr_cheby_coeffs(double alpha, std::size_t max_index) {
    check_ppr_alpha(alpha);
    const double root = std::sqrt(2.0 * alpha - alpha * alpha);
    const double gamma = alpha / root;
    const double beta = (1.0 - alpha) / (1.0 + root); // = (1 - root)/(1 - alpha)
    std::vector<double> c(max_index + 1);
    c[0] = gamma;
    double term = 2.0 * gamma;
    for (std::size_t k = 1; k <= max_index; ++k) {
        term *= beta;
        c[k] = term;
    }
    return c;
}

std::vector<double> hkpr_cheby_coeffs(double t, std::size_t max_index) {
    check_hkpr_t(t);
    // Backward recurrence I_{n-1} = I_{n+1} + (2n/t) I_n from a trial start
    // well above max_index; the values grow toward n = 0, so rescale when
    // they approach the double range.
    const std::size_t start =
        std::max(max_index, static_cast<std::size_t>(std::ceil(t))) + 40;
    std::vector<double> f(start + 2, 0.0);
    f[start] = 1e-30;
    for (std::size_t n = start; n >= 1; --n) {
        f[n - 1] = f[n + 1] + (2.0 * static_cast<double>(n) / t) * f[n];
        if (f[n - 1] > 1e280) {
            for (std::size_t j = n - 1; j <= start + 1; ++j) f[j] *= 1e-280;
        }
    }
    // e^-t (I_0 + 2 sum I_k) = 1 fixes the scale directly in e^-t units.
    double norm = f[0];
    for (std::size_t k = 1; k <= start; ++k) norm += 2.0 * f[k];
    std::vector<double> c(max_index + 1);
    c[0] = f[0] / norm;
    for (std::size_t k = 1; k <= max_index; ++k) c[k] = 2.0 * f[k] / norm;
    return c;
}

std::vector<double> custom_cheby_coeffs(const std::function<double(double)>& f,
                                        std::size_t max_index) {
    constexpr std::size_t node_cap = 1u << 16;
    const double pi = std::numbers::pi;

    std::vector<double> prev;
    std::size_t nodes = 64;
    while (nodes < 2 * (max_index + 1)) nodes *= 2;

    for (; nodes <= node_cap; nodes *= 2) {
        std::vector<double> theta(nodes), fx(nodes);
        for (std::size_t j = 0; j < nodes; ++j) {
            theta[j] = pi * (static_cast<double>(j) + 0.5) / static_cast<double>(nodes);
            fx[j] = f(std::cos(theta[j]));
            if (!std::isfinite(fx[j]))
                throw ParameterError("custom_cheby_coeffs: f not finite on [-1,1]");
        }
        std::vector<double> c(max_index + 1, 0.0);
        for (std::size_t k = 0; k <= max_index; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < nodes; ++j)
                acc += fx[j] * std::cos(static_cast<double>(k) * theta[j]);
            c[k] = (k == 0 ? 1.0 : 2.0) * acc / static_cast<double>(nodes);
        }
        if (!prev.empty()) {
            double diff = 0.0;
            for (std::size_t k = 0; k <= max_index; ++k)
                diff = std::max(diff, std::abs(c[k] - prev[k]));
            if (diff <= 1e-12) return c;
        }
        prev = std::move(c);
    }
    throw NumericalError("custom_cheby_coeffs: quadrature did not converge at 2^16 nodes");
}

namespace {

constexpr std::size_t kTruncationCap = 1000000;

// Smallest K >= 1 with sum_{k>K} |c_k| < eps, given the coefficients are
// nonnegative with total mass `total` (1 for PPR/HKPR).
std::size_t cheby_steps_from_prefix(const std::vector<double>& c, double eps,
                                    double* tail_out) {
    double prefix = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        prefix += c[k];
        const double tail = std::max(0.0, 1.0 - prefix);
        if (k >= 1 && tail < eps) {
            if (tail_out) *tail_out = tail;
            return k;
        }
    }
    return 0; // caller grows the horizon
}

} // namespace

TruncationPlan plan_truncation(const Kernel& kernel, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ParameterError("plan_truncation: epsilon must lie in (0,1)");

    TruncationPlan plan;
    plan.epsilon = epsilon;

    switch (kernel.family()) {
    case KernelFamily::Ppr: {
        const double alpha = kernel.alpha();
        const double root = std::sqrt(2.0 * alpha - alpha * alpha);
        const double gamma = alpha / root;
        const double beta = (1.0 - alpha) / (1.0 + root);
        auto cheby_tail = [&](std::size_t K) {
            // 2 gamma beta^{K+1} / (1 - beta)
            return 2.0 * gamma / (1.0 - beta) *
                   std::exp(static_cast<double>(K + 1) * std::log(beta));
        };
        std::size_t K = 1;
        while (cheby_tail(K) >= epsilon) {
            if (++K > kTruncationCap)
                throw ParameterError("plan_truncation: Chebyshev tail stuck above epsilon");
        }
        plan.cheby_steps = K;
        plan.tail_bound = cheby_tail(K);

        // Taylor tail after N terms is (1-alpha)^N.
        std::size_t N = 1;
        double tail = 1.0 - alpha;
        while (tail >= epsilon) {
            tail *= 1.0 - alpha;
            if (++N > kTruncationCap)
                throw ParameterError("plan_truncation: Taylor tail stuck above epsilon");
        }
        plan.taylor_steps = N;
        break;
    }
    case KernelFamily::Hkpr:
    case KernelFamily::Custom: {
        // Coefficients are nonnegative and sum to 1; scan prefix sums on a
        // growing horizon.
        const std::size_t horizon_cap =
            kernel.family() == KernelFamily::Custom ? 8192 : kTruncationCap;
        std::size_t horizon = 64;
        for (;;) {
            const auto c = kernel.cheby_coeffs(horizon);
            double tail = 0.0;
            if (std::size_t K = cheby_steps_from_prefix(c, epsilon, &tail); K > 0) {
                plan.cheby_steps = K;
                plan.tail_bound = tail;
                break;
            }
            if (horizon >= horizon_cap)
                throw ParameterError("plan_truncation: Chebyshev tail stuck above epsilon");
            horizon = std::min(horizon * 2, horizon_cap);
        }

        if (kernel.family() == KernelFamily::Hkpr) {
            const double t = kernel.t();
            double z = std::exp(-t), prefix = 0.0;
            std::size_t N = 0;
            for (;;) {
                prefix += z;
                ++N;
                if (1.0 - prefix < epsilon) break;
                if (N > kTruncationCap)
                    throw ParameterError("plan_truncation: Taylor tail stuck above epsilon");
                z *= t / static_cast<double>(N);
            }
            plan.taylor_steps = std::max<std::size_t>(N, 1);
        } else {
            const auto& zeta = kernel.custom_taylor();
            std::vector<double> suffix(zeta.size() + 1, 0.0);
            for (std::size_t k = zeta.size(); k-- > 0;)
                suffix[k] = suffix[k + 1] + std::abs(zeta[k]);
            std::size_t N = zeta.size();
            for (std::size_t k = 1; k <= zeta.size(); ++k) {
                if (suffix[k] < epsilon) {
                    N = k;
                    break;
                }
            }
            plan.taylor_steps = std::max<std::size_t>(N, 1);
        }
        break;
    }
    }
    return plan;
}

Kernel parse_kernel_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    const auto eq = rest.find('=');
    const std::string key = rest.substr(0, eq);
    const std::string value = eq == std::string::npos ? "" : rest.substr(eq + 1);

    auto parse_value = [&](const char* expected_key) {
        if (key != expected_key || value.empty())
            throw ParameterError("bad kernel spec \"" + spec + "\"");
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size())
            throw ParameterError("bad kernel parameter in \"" + spec + "\"");
        return v;
    };

    if (family == "ppr") return Kernel::ppr(parse_value("alpha"));
    if (family == "hkpr") return Kernel::hkpr(parse_value("t"));
    if (family == "custom") {
        if (key != "file" || value.empty())
            throw ParameterError("bad kernel spec \"" + spec + "\"");
        std::ifstream in(value);
        if (!in) throw IoError("cannot open coefficient file: " + value);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("bad coefficient file " + value + ": " + e.what());
        }
        if (!j.is_array()) throw ParseError("coefficient file must hold a JSON array");
        std::vector<double> taylor;
        for (const auto& v2 : j) {
            if (!v2.is_number()) throw ParseError("coefficient file must hold numbers");
            taylor.push_back(v2.get<double>());
        }
        return Kernel::custom(std::move(taylor));
    }
    throw ParameterError("unknown kernel family in \"" + spec + "\"");
}

} // namespace chebyprop
