#pragma once

#include <cstdint>

namespace sbc {

// Chebyshev count for the empirical-mean approximation of the expected
// one-step barrier value: ceil(M_hat / (delta^2 * beta_s)). Quotients
// within 1e-9 relative of an integer snap to it before the ceiling, so
// decimal inputs like 0.05 do not push an exact count up by one.
std::uint64_t nhat_count(double m_hat, double delta, double beta_s);

// log of the binomial lower tail  sum_{i=0}^{dims} C(N,i) p^i (1-p)^(N-i),
// evaluated via log-gamma; exposed for the oracle tests.
double log_binomial_tail(std::uint64_t n, double p, int dims);

// Least N with the binomial tail <= beta. The tail is non-increasing in N
// (property-tested); minimality is found by exponential bracketing followed
// by binary search. eps_bar = 0 has no finite N and throws.
std::uint64_t scenario_sample_count(double eps_bar, double beta, int dims);

// Same threshold with the confidence budget split over an M-point grid:
// tail <= beta / M.
std::uint64_t scenario_sample_count_kappa(double eps_bar, double beta, int dims, std::uint64_t m);

struct LipschitzParams {
    double state_norm = 0.0;        // bound on ||x|| over X
    double input_norm = 0.0;        // bound on ||u|| over U
    double growth_state = 0.0;      // L1 in ||f_a|| <= L1||x|| + L2||u|| + L3
    double growth_input = 0.0;      // L2
    double growth_offset = 0.0;     // L3 (or L2 of the autonomous form)
    double jacobian_state = 0.0;    // bound on ||J_x||
    double jacobian_input = 0.0;    // bound on ||J_u||
    double barrier_norm = 0.0;      // enforced cap on ||P||
    double controller_norm_sum = 0.0;  // enforced cap on sum_l ||P_l||
    int input_dim = 0;
};

// Quadratic-barrier bound for an additive-noise autonomous system:
// 2 ||P|| (L1 * L * Lhat + L2 * Lhat + L). Affine dynamics x+ = Ax + B + w
// admit growth_state = jacobian_state = ||A|| and growth_offset = ||B||.
double lipschitz_quadratic(const LipschitzParams& p);

struct ControlLipschitz {
    double state_part = 0.0;  // sensitivity in x
    double input_part = 0.0;  // sensitivity in u
    double combined = 0.0;    // sqrt(state^2 + input^2)
};

// Controlled-system analogue over (x, u); see the struct for components.
ControlLipschitz lipschitz_control(const LipschitzParams& p);

struct SafetyBound {
    double raw = 0.0;      // may be negative: no information
    double clamped = 0.0;  // max(raw, 0) for reporting
};

// 1 - (1 + c*H) / lambda; lambda > 1, c >= 0.
SafetyBound safety_lower_bound(double c, double lambda, int horizon);

// Contractive variant, kappa in (0, 1):
//   lambda >= c/kappa: rho = 1 - (1 - 1/lambda)(1 - c/lambda)
//   otherwise:         rho = (1/lambda)(1-kappa)^H + c/(kappa*lambda) (1 - (1-kappa)^H)
// returning 1 - rho. The first branch is taken at equality.
SafetyBound safety_lower_bound_kappa(double c, double lambda, double kappa, int horizon);

}  // namespace sbc
