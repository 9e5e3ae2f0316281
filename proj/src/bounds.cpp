#include "sbc/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbc {

std::uint64_t nhat_count(double m_hat, double delta, double beta_s) {
    if (!(m_hat > 0.0)) throw std::invalid_argument("nhat_count: m_hat must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("nhat_count: delta must be > 0");
    if (!(beta_s > 0.0 && beta_s <= 1.0))
        throw std::invalid_argument("nhat_count: beta_s must lie in (0, 1]");
    double q = m_hat / (delta * delta * beta_s);
    double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, r)) q = r;
    double c = std::ceil(q);
    if (c > 9.2e18) throw std::invalid_argument("nhat_count: count overflows 64 bits");
    return static_cast<std::uint64_t>(c);
}

double log_binomial_tail(std::uint64_t n, double p, int dims) {
    if (p >= 1.0) return n <= static_cast<std::uint64_t>(dims) ? 0.0
                                                              : -std::numeric_limits<double>::infinity();
    if (p <= 0.0) return 0.0;
    double nd = static_cast<double>(n);
    double log_p = std::log(p);
    double log_1mp = std::log1p(-p);
    int top = static_cast<int>(std::min<std::uint64_t>(n, static_cast<std::uint64_t>(dims)));
    // log-sum-exp over the tail terms; direct products under/overflow at
    // N ~ 1e7 and p ~ 1e-6.
    double max_term = -std::numeric_limits<double>::infinity();
    double terms[128];
    for (int i = 0; i <= top; ++i) {
        double lc = std::lgamma(nd + 1.0) - std::lgamma(static_cast<double>(i) + 1.0) -
                    std::lgamma(nd - static_cast<double>(i) + 1.0);
        double t = lc + static_cast<double>(i) * log_p + (nd - static_cast<double>(i)) * log_1mp;
        terms[i] = t;
        if (t > max_term) max_term = t;
    }
    double acc = 0.0;
    for (int i = 0; i <= top; ++i) acc += std::exp(terms[i] - max_term);
    return max_term + std::log(acc);
}

std::uint64_t scenario_sample_count(double eps_bar, double beta, int dims) {
    if (!(eps_bar > 0.0)) throw std::invalid_argument(
            "scenario_sample_count: eps_bar = 0 admits no finite sample count");
    if (eps_bar > 1.0) throw std::invalid_argument("scenario_sample_count: eps_bar must be <= 1");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("scenario_sample_count: beta must lie in (0, 1]");
    if (dims < 0 || dims > 120)
        throw std::invalid_argument("scenario_sample_count: dims out of supported range [0, 120]");

    double log_beta = std::log(beta);
    auto ok = [&](std::uint64_t n) { return log_binomial_tail(n, eps_bar, dims) <= log_beta; };

    std::uint64_t lo = static_cast<std::uint64_t>(dims) + 1;
    if (ok(lo)) return lo;  // tail(N) = 1 for N <= dims, so lo is minimal if it passes
    std::uint64_t hi = lo;
    while (!ok(hi)) {
        if (hi > (std::uint64_t{1} << 62))
            throw std::invalid_argument("scenario_sample_count: no sample count below 2^62");
        hi *= 2;
    }
    lo = hi / 2;  // tail(lo) > beta, tail(hi) <= beta
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (ok(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

std::uint64_t scenario_sample_count_kappa(double eps_bar, double beta, int dims, std::uint64_t m) {
    if (m < 1) throw std::invalid_argument("scenario_sample_count_kappa: grid cardinality must be >= 1");
    return scenario_sample_count(eps_bar, beta / static_cast<double>(m), dims);
}

namespace {

void check_nonneg(const LipschitzParams& p) {
    if (p.state_norm < 0 || p.input_norm < 0 || p.growth_state < 0 || p.growth_input < 0 ||
        p.growth_offset < 0 || p.jacobian_state < 0 || p.jacobian_input < 0 ||
        p.barrier_norm < 0 || p.controller_norm_sum < 0)
        throw std::invalid_argument("lipschitz: all parameters must be non-negative");
}

}  // namespace

double lipschitz_quadratic(const LipschitzParams& p) {
    check_nonneg(p);
    if (!(p.state_norm > 0)) throw std::invalid_argument("lipschitz: state_norm must be > 0");
    return 2.0 * p.barrier_norm *
           (p.growth_state * p.state_norm * p.jacobian_state +
            p.growth_offset * p.jacobian_state + p.state_norm);
}

ControlLipschitz lipschitz_control(const LipschitzParams& p) {
    check_nonneg(p);
    if (!(p.state_norm > 0)) throw std::invalid_argument("lipschitz: state_norm must be > 0");
    if (p.input_dim < 1) throw std::invalid_argument("lipschitz: input_dim must be >= 1");
    double drift = 2.0 * p.barrier_norm *
                   (p.growth_state * p.state_norm + p.growth_input * p.input_norm +
                    p.growth_offset);
    ControlLipschitz out;
    out.state_part = drift * p.jacobian_state + p.state_norm * p.barrier_norm +
                     p.state_norm * p.controller_norm_sum;
    out.input_part = drift * p.jacobian_input + std::sqrt(static_cast<double>(p.input_dim));
    out.combined = std::hypot(out.state_part, out.input_part);
    return out;
}

SafetyBound safety_lower_bound(double c, double lambda, int horizon) {
    if (!(lambda > 1.0)) throw std::invalid_argument("safety bound: lambda must be > 1");
    if (c < 0.0) throw std::invalid_argument("safety bound: c must be >= 0");
    if (horizon < 0) throw std::invalid_argument("safety bound: horizon must be >= 0");
    SafetyBound b;
    b.raw = 1.0 - (1.0 + c * static_cast<double>(horizon)) / lambda;
    b.clamped = std::max(b.raw, 0.0);
    return b;
}

SafetyBound safety_lower_bound_kappa(double c, double lambda, double kappa, int horizon) {
    if (!(lambda > 1.0)) throw std::invalid_argument("safety bound: lambda must be > 1");
    if (c < 0.0) throw std::invalid_argument("safety bound: c must be >= 0");
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("safety bound: kappa must lie in (0, 1)");
    if (horizon < 0) throw std::invalid_argument("safety bound: horizon must be >= 0");
    double rho;
    if (lambda >= c / kappa) {
        rho = 1.0 - (1.0 - 1.0 / lambda) * (1.0 - c / lambda);
    } else {
        double decay = std::pow(1.0 - kappa, static_cast<double>(horizon));
        rho = decay / lambda + c / (kappa * lambda) * (1.0 - decay);
    }
    SafetyBound b;
    b.raw = 1.0 - rho;
    b.clamped = std::max(b.raw, 0.0);
    return b;
}

}  // namespace sbc
