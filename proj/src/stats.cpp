#include "sbc/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace sbc {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-15;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(b) - std::lgamma(a) +
                          b * std::log1p(-x) + a * std::log(x)) *
                     beta_cf(b, a, 1.0 - x) / b;
}

double clopper_pearson_lower(std::uint64_t successes, std::uint64_t trials, double alpha) {
    if (trials == 0) throw std::invalid_argument("clopper_pearson_lower: trials must be >= 1");
    if (successes > trials)
        throw std::invalid_argument("clopper_pearson_lower: successes exceed trials");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("clopper_pearson_lower: alpha must lie in (0, 1)");
    if (successes == 0) return 0.0;
    if (successes == trials)
        return std::pow(alpha, 1.0 / static_cast<double>(trials));

    // p_low solves I_p(k, n-k+1) = alpha; bisection is plenty here.
    double a = static_cast<double>(successes);
    double b = static_cast<double>(trials - successes) + 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (incomplete_beta(a, b, mid) < alpha) lo = mid;
        else hi = mid;
    }
    return lo;
}

}  // namespace sbc
