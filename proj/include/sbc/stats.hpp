#pragma once

#include <cstdint>

namespace sbc {

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// One-sided Clopper-Pearson lower confidence bound for a binomial
// proportion: the largest p_low with P(Bin(n, p_low) >= k) <= alpha.
// k = 0 gives 0; k = n gives alpha^(1/n).
double clopper_pearson_lower(std::uint64_t successes, std::uint64_t trials, double alpha);

}  // namespace sbc
