#include "sbc/poly.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sbc {

int total_degree(const MultiIndex& mi) {
    return std::accumulate(mi.begin(), mi.end(), 0);
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

std::string index_to_string(const MultiIndex& mi) {
    std::string s = "(";
    for (std::size_t d = 0; d < mi.size(); ++d) {
        if (d) s += ",";
        s += std::to_string(mi[d]);
    }
    return s + ")";
}

void enumerate(int n, int k, int pos, MultiIndex& cur, int used, std::vector<MultiIndex>& out) {
    if (pos == n) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e + used <= k; ++e) {
        cur[pos] = e;
        enumerate(n, k, pos + 1, cur, used + e, out);
    }
    cur[pos] = 0;
}

}  // namespace

MonomialBasis monomial_basis(int n, int k, const std::vector<MultiIndex>& zeroed) {
    if (n < 1) throw std::invalid_argument("monomial_basis: dimension must be >= 1");
    if (k < 0) throw std::invalid_argument("monomial_basis: degree must be >= 0");

    std::vector<MultiIndex> all;
    MultiIndex cur(static_cast<std::size_t>(n), 0);
    enumerate(n, k, 0, cur, 0, all);
    std::sort(all.begin(), all.end(), graded_lex_less);

    std::set<MultiIndex> drop;
    for (const MultiIndex& z : zeroed) {
        bool valid = z.size() == static_cast<std::size_t>(n) &&
                     std::all_of(z.begin(), z.end(), [](int e) { return e >= 0; }) &&
                     total_degree(z) <= k;
        if (!valid)
            throw std::invalid_argument("monomial_basis: zeroed index " + index_to_string(z) +
                                        " is not a valid degree-" + std::to_string(k) +
                                        " index in " + std::to_string(n) + " variables");
        drop.insert(z);
    }

    std::vector<MultiIndex> kept;
    kept.reserve(all.size());
    for (auto& mi : all)
        if (!drop.count(mi)) kept.push_back(std::move(mi));
    return MonomialBasis(n, k, std::move(kept));
}

std::vector<double> MonomialBasis::eval_row(std::span<const double> x) const {
    std::vector<double> out(indices_.size());
    eval_into(x, out);
    return out;
}

void MonomialBasis::eval_into(std::span<const double> x, std::span<double> out) const {
    if (x.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("basis evaluation: point has dimension " +
                                    std::to_string(x.size()) + ", basis expects " +
                                    std::to_string(dim_));
    // Memoized coordinate powers; cheaper than per-monomial pow at these degrees.
    static thread_local std::vector<double> powers;
    powers.assign(static_cast<std::size_t>(dim_) * (degree_ + 1), 1.0);
    for (int d = 0; d < dim_; ++d) {
        double* p = powers.data() + static_cast<std::size_t>(d) * (degree_ + 1);
        for (int e = 1; e <= degree_; ++e) p[e] = p[e - 1] * x[static_cast<std::size_t>(d)];
    }
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        double v = 1.0;
        const MultiIndex& mi = indices_[i];
        for (int d = 0; d < dim_; ++d)
            v *= powers[static_cast<std::size_t>(d) * (degree_ + 1) + mi[static_cast<std::size_t>(d)]];
        out[i] = v;
    }
}

int MonomialBasis::find(const MultiIndex& mi) const {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), mi, graded_lex_less);
    if (it != indices_.end() && *it == mi) return static_cast<int>(it - indices_.begin());
    return -1;
}

std::string MonomialBasis::to_csv() const {
    std::string s;
    for (int d = 0; d < dim_; ++d) {
        if (d) s += ",";
        s += "iota_" + std::to_string(d + 1);
    }
    s += "\n";
    for (const auto& mi : indices_) {
        for (int d = 0; d < dim_; ++d) {
            if (d) s += ",";
            s += std::to_string(mi[static_cast<std::size_t>(d)]);
        }
        s += "\n";
    }
    return s;
}

Polynomial::Polynomial(MonomialBasis b, std::vector<double> c)
    : basis(std::move(b)), coeffs(std::move(c)) {
    if (coeffs.size() != basis.size())
        throw std::invalid_argument("polynomial: coefficient count " +
                                    std::to_string(coeffs.size()) + " does not match basis size " +
                                    std::to_string(basis.size()));
}

double Polynomial::eval(std::span<const double> x) const {
    static thread_local std::vector<double> row;
    row.resize(basis.size());
    basis.eval_into(x, row);
    double acc = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) acc += coeffs[i] * row[i];
    return acc;
}

std::string Polynomial::coeffs_csv() const {
    std::string s;
    char buf[32];
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (i) s += ",";
        std::snprintf(buf, sizeof buf, "%.17g", coeffs[i]);
        s += buf;
    }
    return s;
}

}  // namespace sbc
