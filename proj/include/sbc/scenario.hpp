#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbc/dataset.hpp"
#include "sbc/poly.hpp"
#include "sbc/region.hpp"

namespace sbc {

// Input set U = {u : A u <= b}. Must be non-empty and bounded; validated
// with LP feasibility probes (see validate_bounded).
struct InputPolytope {
    std::vector<std::vector<double>> a;  // q rows of length m
    std::vector<double> b;               // q offsets

    int num_rows() const { return static_cast<int>(a.size()); }
    int dim() const { return a.empty() ? 0 : static_cast<int>(a.front().size()); }
    bool contains(std::span<const double> u, double tol = 1e-9) const;
    std::string fingerprint() const;

    // Throws std::invalid_argument when empty or unbounded; returns the
    // coordinate bounding box used for rejection sampling.
    Box validate_bounded() const;

    // Uniform over U by rejection from the bounding box.
    void sample_into(const Box& bounding, RngStream& rng, std::span<double> out) const;
};

enum class RowTag : std::uint8_t {
    g1,       // nonnegativity margin: -B(x_i) - K
    g2,       // initial-set level:     1_{Xin}(x_i) B(x_i) - 1 - K
    g3,       // unsafe-set level:      1_{Xu}(x_i) (-B(x_i) + lambda - K)
    g4,       // probability budget:    (1 + c H)/rho - lambda - K   (one copy)
    g5,       // empirical drift (verification/synthesis variants)
    g4kappa,  // contractive drift:     mean B(x+) - kappa B(x_i) - c + delta - K
    g_poly,   // controller containment: A [P_l(x_i)]_l - b - K 1
    cap_abs,  // |entry_e| <= t_e
    cap_sum,  // weighted sum of t_e <= cap
};

const char* row_tag_name(RowTag tag);

struct LpRow {
    RowTag tag;
    std::int64_t sample = -1;  // dataset index, -1 for x-independent rows
    std::int32_t aux = -1;     // polytope row / cap entry id
    std::vector<double> coeffs;
    double rhs = 0.0;
};

struct VarBound {
    double lo;
    double hi;
};

// Deterministic variable ordering: [K; lambda; c; b (Q); p (P); cap aux].
struct DecisionLayout {
    int barrier_count = 0;
    int controller_count = 0;
    int cap_aux_count = 0;
    std::vector<std::string> names;

    static constexpr int k_index = 0;
    static constexpr int lambda_index = 1;
    static constexpr int c_index = 2;
    static constexpr int b_offset = 3;
    int p_offset() const { return b_offset + barrier_count; }
    int aux_offset() const { return p_offset() + controller_count; }
    int num_vars() const { return aux_offset() + cap_aux_count; }
};

struct ScenarioLP {
    DecisionLayout layout;
    std::vector<LpRow> rows;
    std::vector<VarBound> bounds;  // one per variable

    // One row per line: tag,i,rhs,coeff_0,...,coeff_D
    std::string dump() const;
};

struct BuildOptions {
    double delta = 0.0;               // empirical-mean slack
    std::optional<double> rho;        // fixed probability budget; nullopt drops g4
    int horizon = 0;
    double k_max = 1e6;               // |K| bound
    double lambda_eta = 1e-6;         // strict lambda > 1 realized as lambda >= 1 + eta
    std::optional<double> barrier_cap;     // surrogate cap on ||P||
    std::optional<double> controller_cap;  // per-controller-polynomial cap
};

// Entry of the homogenized quadratic-form matrix as a linear map of the
// polynomial coefficients: entry = coeff[coeff_index] * scale. Entries
// whose monomial was zeroed out of the basis are omitted.
struct QuadFormEntry {
    int coeff_index;
    double scale;        // 1 / (number of matrix slots sharing the monomial)
    double pair_weight;  // 1 on the diagonal, 2 off it
};
std::vector<QuadFormEntry> quadratic_form_entries(const MonomialBasis& basis);

ScenarioLP build_verification_lp(const TransitionDataset& data, const SafetySpec& spec,
                                 const MonomialBasis& basis, const BuildOptions& opts);

ScenarioLP build_synthesis_lp(const TransitionDataset& data, const SafetySpec& spec,
                              const MonomialBasis& basis,
                              const std::vector<MonomialBasis>& controller_bases,
                              const InputPolytope& input_set, const BuildOptions& opts);

ScenarioLP build_kappa_lp(const TransitionDataset& data, const SafetySpec& spec,
                          const MonomialBasis& basis, double kappa, const BuildOptions& opts);

// Decreases the rhs of every sample-indexed row by `amount`; the g4 and
// norm-cap rows are untouched.
ScenarioLP tighten(ScenarioLP lp, double amount);

void write_lp_dump(const ScenarioLP& lp, const std::string& path);

}  // namespace sbc
