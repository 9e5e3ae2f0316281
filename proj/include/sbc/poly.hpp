#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sbc {

// Exponent tuple of one monomial, one entry per variable.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& mi);

// Graded lexicographic: total degree first, then lexicographic on the
// exponent tuple. This fixes the coefficient-vector ordering everywhere
// (reports, datasets, LP columns).
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

class MonomialBasis {
public:
    MonomialBasis() = default;
    MonomialBasis(int dim, int degree, std::vector<MultiIndex> indices)
        : dim_(dim), degree_(degree), indices_(std::move(indices)) {}

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    std::size_t size() const { return indices_.size(); }
    const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
    const std::vector<MultiIndex>& indices() const { return indices_; }

    // Monomial values at x, in basis order. eval_into is the
    // allocation-free form for the LP assembly hot loop.
    std::vector<double> eval_row(std::span<const double> x) const;
    void eval_into(std::span<const double> x, std::span<double> out) const;

    // Position of an exponent tuple, or -1 when absent (e.g. zeroed).
    int find(const MultiIndex& mi) const;

    // Rows of exponent tuples with header iota_1,...,iota_n.
    std::string to_csv() const;

private:
    int dim_ = 0;
    int degree_ = 0;
    std::vector<MultiIndex> indices_;
};

// All multi-indices of total degree <= k in n variables, minus `zeroed`,
// graded-lex sorted. Throws std::invalid_argument naming the offending
// index when a zeroed entry is not a valid index of the full basis.
MonomialBasis monomial_basis(int n, int k, const std::vector<MultiIndex>& zeroed = {});

struct Polynomial {
    MonomialBasis basis;
    std::vector<double> coeffs;

    Polynomial() = default;
    Polynomial(MonomialBasis b, std::vector<double> c);

    int dim() const { return basis.dim(); }
    int degree() const { return basis.degree(); }
    double eval(std::span<const double> x) const;

    // Coefficient vector in basis order as one CSV row.
    std::string coeffs_csv() const;
};

}  // namespace sbc
