#include "sbc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "sbc/solver.hpp"

namespace sbc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

bool InputPolytope::contains(std::span<const double> u, double tol) const {
    for (int r = 0; r < num_rows(); ++r) {
        double acc = -b[static_cast<std::size_t>(r)];
        for (int l = 0; l < dim(); ++l) acc += a[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)] * u[static_cast<std::size_t>(l)];
        if (acc > tol) return false;
    }
    return true;
}

std::string InputPolytope::fingerprint() const {
    std::string s = "A=";
    for (const auto& row : a) {
        s += "[";
        for (std::size_t l = 0; l < row.size(); ++l) s += fmt(row[l]) + (l + 1 < row.size() ? "," : "");
        s += "]";
    }
    s += ";b=[";
    for (std::size_t r = 0; r < b.size(); ++r) s += fmt(b[r]) + (r + 1 < b.size() ? "," : "");
    return s + "]";
}

Box InputPolytope::validate_bounded() const {
    if (a.empty() || dim() < 1)
        throw std::invalid_argument("input set: polytope must have at least one row and one input");
    for (const auto& row : a)
        if (static_cast<int>(row.size()) != dim())
            throw std::invalid_argument("input set: ragged polytope matrix");
    if (b.size() != a.size())
        throw std::invalid_argument("input set: offset vector length does not match row count");

    SolverOptions opts;
    int m = dim();
    Box box;
    box.lo.resize(static_cast<std::size_t>(m));
    box.hi.resize(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l) {
        for (int sign : {+1, -1}) {
            RawLp probe;
            probe.num_vars = static_cast<std::size_t>(m);
            probe.objective.assign(static_cast<std::size_t>(m), 0.0);
            probe.objective[static_cast<std::size_t>(l)] = sign;  // min u_l and min -u_l
            probe.rows = a;
            probe.rhs = b;
            probe.lower.assign(static_cast<std::size_t>(m), -kInf);
            probe.upper.assign(static_cast<std::size_t>(m), kInf);
            LpSolution sol = solve_raw(probe, opts);
            if (sol.status == LpStatus::infeasible)
                throw std::invalid_argument("input set: polytope is empty");
            if (sol.status == LpStatus::unbounded)
                throw std::invalid_argument("input set: polytope is unbounded in input " +
                                            std::to_string(l + 1));
            if (sol.status != LpStatus::optimal)
                throw std::invalid_argument("input set: boundedness probe did not converge");
            if (sign > 0) box.lo[static_cast<std::size_t>(l)] = sol.objective;
            else box.hi[static_cast<std::size_t>(l)] = -sol.objective;
        }
    }
    return box;
}

void InputPolytope::sample_into(const Box& bounding, RngStream& rng,
                                std::span<double> out) const {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        for (int l = 0; l < dim(); ++l)
            out[static_cast<std::size_t>(l)] =
                rng.uniform(bounding.lo[static_cast<std::size_t>(l)],
                            bounding.hi[static_cast<std::size_t>(l)]);
        if (contains(out, 0.0)) return;
    }
    throw std::runtime_error("input set: rejection sampling failed (polytope volume too small "
                             "relative to its bounding box)");
}

const char* row_tag_name(RowTag tag) {
    switch (tag) {
        case RowTag::g1: return "g1";
        case RowTag::g2: return "g2";
        case RowTag::g3: return "g3";
        case RowTag::g4: return "g4";
        case RowTag::g5: return "g5";
        case RowTag::g4kappa: return "g4k";
        case RowTag::g_poly: return "gpoly";
        case RowTag::cap_abs: return "cap_abs";
        case RowTag::cap_sum: return "cap_sum";
    }
    return "?";
}

std::vector<QuadFormEntry> quadratic_form_entries(const MonomialBasis& basis) {
    int half_degree = (basis.degree() + 1) / 2;
    MonomialBasis half = monomial_basis(basis.dim(), half_degree);

    // slots(mu): matrix positions of the homogenized form that share the
    // monomial mu (diagonal counts once, symmetric pairs twice).
    std::map<MultiIndex, int> slots;
    for (std::size_t i = 0; i < half.size(); ++i) {
        for (std::size_t j = i; j < half.size(); ++j) {
            MultiIndex mu(half[i].size());
            for (std::size_t d = 0; d < mu.size(); ++d) mu[d] = half[i][d] + half[j][d];
            slots[mu] += (i == j) ? 1 : 2;
        }
    }

    std::vector<QuadFormEntry> entries;
    for (std::size_t i = 0; i < half.size(); ++i) {
        for (std::size_t j = i; j < half.size(); ++j) {
            MultiIndex mu(half[i].size());
            for (std::size_t d = 0; d < mu.size(); ++d) mu[d] = half[i][d] + half[j][d];
            if (total_degree(mu) > basis.degree()) continue;
            int idx = basis.find(mu);
            if (idx < 0) continue;  // zeroed coefficient: entry is identically 0
            QuadFormEntry e;
            e.coeff_index = idx;
            e.scale = 1.0 / static_cast<double>(slots.at(mu));
            e.pair_weight = (i == j) ? 1.0 : 2.0;
            entries.push_back(e);
        }
    }
    return entries;
}

namespace {

struct Builder {
    const TransitionDataset& data;
    const SafetySpec& spec;
    const MonomialBasis& basis;
    const BuildOptions& opts;
    ScenarioLP lp;

    std::vector<double> base_row;       // monomials at x_i
    std::vector<double> mean_succ_row;  // mean monomials over successors of x_i
    std::vector<double> succ_row;

    Builder(const TransitionDataset& d, const SafetySpec& s, const MonomialBasis& bs,
            const BuildOptions& o)
        : data(d), spec(s), basis(bs), opts(o) {
        if (d.count == 0) throw std::invalid_argument("scenario program: empty dataset");
        if (o.delta < 0) throw std::invalid_argument("scenario program: delta must be >= 0");
        if (o.rho && !(*o.rho > 0.0 && *o.rho <= 1.0))
            throw std::invalid_argument("scenario program: rho must lie in (0, 1]");
        if (bs.dim() != d.n)
            throw std::invalid_argument("scenario program: basis dimension does not match data");
        base_row.resize(bs.size());
        mean_succ_row.resize(bs.size());
        succ_row.resize(bs.size());
    }

    void init_layout(const std::vector<MonomialBasis>* controller_bases) {
        DecisionLayout& lay = lp.layout;
        lay.barrier_count = static_cast<int>(basis.size());
        lay.controller_count = 0;
        if (controller_bases)
            for (const auto& cb : *controller_bases)
                lay.controller_count += static_cast<int>(cb.size());
        lay.cap_aux_count = 0;
        if (opts.barrier_cap)
            lay.cap_aux_count += static_cast<int>(quadratic_form_entries(basis).size());
        if (opts.controller_cap && controller_bases)
            for (const auto& cb : *controller_bases)
                lay.cap_aux_count += static_cast<int>(quadratic_form_entries(cb).size());

        lay.names = {"K", "lambda", "c"};
        for (int i = 0; i < lay.barrier_count; ++i) lay.names.push_back("b" + std::to_string(i));
        if (controller_bases) {
            int l = 0;
            for (const auto& cb : *controller_bases) {
                for (std::size_t i = 0; i < cb.size(); ++i)
                    lay.names.push_back("p" + std::to_string(l) + "_" + std::to_string(i));
                ++l;
            }
        }
        for (int i = 0; i < lay.cap_aux_count; ++i) lay.names.push_back("t" + std::to_string(i));

        lp.bounds.assign(static_cast<std::size_t>(lay.num_vars()), VarBound{-kInf, kInf});
        lp.bounds[DecisionLayout::k_index] = {-opts.k_max, opts.k_max};
        lp.bounds[DecisionLayout::lambda_index] = {1.0 + opts.lambda_eta, kInf};
        lp.bounds[DecisionLayout::c_index] = {0.0, kInf};
        for (int i = 0; i < lay.cap_aux_count; ++i)
            lp.bounds[static_cast<std::size_t>(lay.aux_offset() + i)] = {0.0, kInf};
    }

    LpRow make_row(RowTag tag, std::int64_t sample, std::int32_t aux = -1) {
        LpRow row;
        row.tag = tag;
        row.sample = sample;
        row.aux = aux;
        row.coeffs.assign(static_cast<std::size_t>(lp.layout.num_vars()), 0.0);
        return row;
    }

    void eval_sample(std::uint64_t i) {
        basis.eval_into(data.base_point(i), base_row);
        std::fill(mean_succ_row.begin(), mean_succ_row.end(), 0.0);
        for (std::uint64_t j = 0; j < data.succ_count; ++j) {
            basis.eval_into(data.successor(i, j), succ_row);
            for (std::size_t k = 0; k < succ_row.size(); ++k) mean_succ_row[k] += succ_row[k];
        }
        double inv = 1.0 / static_cast<double>(data.succ_count);
        for (double& v : mean_succ_row) v *= inv;
    }

    // g1: -B(x_i) - K <= 0
    void emit_g1(std::uint64_t i) {
        LpRow row = make_row(RowTag::g1, static_cast<std::int64_t>(i));
        row.coeffs[DecisionLayout::k_index] = -1.0;
        for (std::size_t k = 0; k < base_row.size(); ++k)
            row.coeffs[DecisionLayout::b_offset + k] = -base_row[k];
        lp.rows.push_back(std::move(row));
    }

    // g2: 1_{Xin}(x_i) B(x_i) - 1 - K <= 0; off-region the barrier part
    // drops and the row degenerates to -1 - K <= 0.
    void emit_g2(std::uint64_t i) {
        LpRow row = make_row(RowTag::g2, static_cast<std::int64_t>(i));
        row.coeffs[DecisionLayout::k_index] = -1.0;
        row.rhs = 1.0;
        if (data.in_initial[i])
            for (std::size_t k = 0; k < base_row.size(); ++k)
                row.coeffs[DecisionLayout::b_offset + k] = base_row[k];
        lp.rows.push_back(std::move(row));
    }

    // g3: 1_{Xu}(x_i) (-B(x_i) + lambda - K) <= 0; the indicator masks the
    // whole condition, so off-region rows are inert (all-zero).
    void emit_g3(std::uint64_t i) {
        LpRow row = make_row(RowTag::g3, static_cast<std::int64_t>(i));
        if (data.in_unsafe[i]) {
            row.coeffs[DecisionLayout::k_index] = -1.0;
            row.coeffs[DecisionLayout::lambda_index] = 1.0;
            for (std::size_t k = 0; k < base_row.size(); ++k)
                row.coeffs[DecisionLayout::b_offset + k] = -base_row[k];
        }
        lp.rows.push_back(std::move(row));
    }

    // g4 (one copy): (1 + c H)/rho - lambda - K <= 0.
    void emit_g4() {
        LpRow row = make_row(RowTag::g4, -1);
        row.coeffs[DecisionLayout::k_index] = -1.0;
        row.coeffs[DecisionLayout::lambda_index] = -1.0;
        row.coeffs[DecisionLayout::c_index] = static_cast<double>(opts.horizon) / *opts.rho;
        row.rhs = -1.0 / *opts.rho;
        lp.rows.push_back(std::move(row));
    }

    // g5: mean_j B(x+_ij) - B(x_i) - c + delta - K <= 0, with the
    // synthesis coupling term added by the caller.
    LpRow drift_row(std::uint64_t i) {
        LpRow row = make_row(RowTag::g5, static_cast<std::int64_t>(i));
        row.coeffs[DecisionLayout::k_index] = -1.0;
        row.coeffs[DecisionLayout::c_index] = -1.0;
        for (std::size_t k = 0; k < base_row.size(); ++k)
            row.coeffs[DecisionLayout::b_offset + k] = mean_succ_row[k] - base_row[k];
        row.rhs = -opts.delta;
        return row;
    }

    void emit_caps(const std::vector<MonomialBasis>* controller_bases) {
        int aux = lp.layout.aux_offset();
        int aux_id = 0;
        auto emit_group = [&](const MonomialBasis& bs, int coeff_offset, double cap) {
            auto entries = quadratic_form_entries(bs);
            LpRow sum_row = make_row(RowTag::cap_sum, -1, aux_id);
            sum_row.rhs = cap;
            for (const auto& e : entries) {
                for (double sign : {+1.0, -1.0}) {
                    LpRow row = make_row(RowTag::cap_abs, -1, static_cast<std::int32_t>(aux));
                    row.coeffs[static_cast<std::size_t>(coeff_offset + e.coeff_index)] =
                        sign * e.scale;
                    row.coeffs[static_cast<std::size_t>(aux)] = -1.0;
                    lp.rows.push_back(std::move(row));
                }
                sum_row.coeffs[static_cast<std::size_t>(aux)] = e.pair_weight;
                ++aux;
            }
            lp.rows.push_back(std::move(sum_row));
            ++aux_id;
        };
        if (opts.barrier_cap) emit_group(basis, DecisionLayout::b_offset, *opts.barrier_cap);
        if (opts.controller_cap && controller_bases) {
            int off = lp.layout.p_offset();
            for (const auto& cb : *controller_bases) {
                emit_group(cb, off, *opts.controller_cap);
                off += static_cast<int>(cb.size());
            }
        }
    }
};

}  // namespace

ScenarioLP build_verification_lp(const TransitionDataset& data, const SafetySpec& spec,
                                 const MonomialBasis& basis, const BuildOptions& opts) {
    Builder bld(data, spec, basis, opts);
    bld.init_layout(nullptr);
    for (std::uint64_t i = 0; i < data.count; ++i) {
        bld.eval_sample(i);
        bld.emit_g1(i);
        bld.emit_g2(i);
        bld.emit_g3(i);
        bld.lp.rows.push_back(bld.drift_row(i));
    }
    if (opts.rho) bld.emit_g4();
    bld.emit_caps(nullptr);
    return std::move(bld.lp);
}

ScenarioLP build_synthesis_lp(const TransitionDataset& data, const SafetySpec& spec,
                              const MonomialBasis& basis,
                              const std::vector<MonomialBasis>& controller_bases,
                              const InputPolytope& input_set, const BuildOptions& opts) {
    if (data.m < 1)
        throw std::invalid_argument("synthesis program: dataset carries no inputs");
    if (static_cast<int>(controller_bases.size()) != data.m)
        throw std::invalid_argument("synthesis program: one controller polynomial per input "
                                    "dimension required");
    for (const auto& cb : controller_bases)
        if (cb.dim() != data.n)
            throw std::invalid_argument("synthesis program: controller bases must live on the "
                                        "state space");
    input_set.validate_bounded();  // configuration error when unbounded
    if (input_set.dim() != data.m)
        throw std::invalid_argument("synthesis program: polytope input dimension mismatch");

    Builder bld(data, spec, basis, opts);
    bld.init_layout(&controller_bases);
    const DecisionLayout& lay = bld.lp.layout;

    std::vector<std::vector<double>> ctrl_rows(controller_bases.size());
    for (std::uint64_t i = 0; i < data.count; ++i) {
        bld.eval_sample(i);
        for (std::size_t l = 0; l < controller_bases.size(); ++l)
            ctrl_rows[l] = controller_bases[l].eval_row(data.base_point(i));

        bld.emit_g1(i);
        bld.emit_g2(i);
        bld.emit_g3(i);

        // drift with coupling: + sum_l (u_il - P_l(x_i))
        LpRow drift = bld.drift_row(i);
        auto u = data.input(i);
        int off = lay.p_offset();
        double u_sum = 0.0;
        for (std::size_t l = 0; l < controller_bases.size(); ++l) {
            u_sum += u[l];
            for (std::size_t k = 0; k < ctrl_rows[l].size(); ++k)
                drift.coeffs[static_cast<std::size_t>(off) + k] -= ctrl_rows[l][k];
            off += static_cast<int>(controller_bases[l].size());
        }
        drift.rhs -= u_sum;
        bld.lp.rows.push_back(std::move(drift));

        // containment rows: A [P_l(x_i)]_l - b - K 1 <= 0
        for (int r = 0; r < input_set.num_rows(); ++r) {
            LpRow row = bld.make_row(RowTag::g_poly, static_cast<std::int64_t>(i), r);
            row.coeffs[DecisionLayout::k_index] = -1.0;
            int poff = lay.p_offset();
            for (std::size_t l = 0; l < controller_bases.size(); ++l) {
                double w = input_set.a[static_cast<std::size_t>(r)][l];
                for (std::size_t k = 0; k < ctrl_rows[l].size(); ++k)
                    row.coeffs[static_cast<std::size_t>(poff) + k] += w * ctrl_rows[l][k];
                poff += static_cast<int>(controller_bases[l].size());
            }
            row.rhs = input_set.b[static_cast<std::size_t>(r)];
            bld.lp.rows.push_back(std::move(row));
        }
    }
    if (opts.rho) bld.emit_g4();
    bld.emit_caps(&controller_bases);
    return std::move(bld.lp);
}

ScenarioLP build_kappa_lp(const TransitionDataset& data, const SafetySpec& spec,
                          const MonomialBasis& basis, double kappa, const BuildOptions& opts) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("contractive program: kappa must lie in (0, 1)");
    if (opts.rho)
        throw std::invalid_argument("contractive program: no fixed-rho constraint exists here");
    Builder bld(data, spec, basis, opts);
    bld.init_layout(nullptr);
    for (std::uint64_t i = 0; i < data.count; ++i) {
        bld.eval_sample(i);
        bld.emit_g1(i);
        bld.emit_g2(i);
        bld.emit_g3(i);
        LpRow row = bld.make_row(RowTag::g4kappa, static_cast<std::int64_t>(i));
        row.coeffs[DecisionLayout::k_index] = -1.0;
        row.coeffs[DecisionLayout::c_index] = -1.0;
        for (std::size_t k = 0; k < bld.base_row.size(); ++k)
            row.coeffs[DecisionLayout::b_offset + k] =
                bld.mean_succ_row[k] - kappa * bld.base_row[k];
        row.rhs = -opts.delta;
        bld.lp.rows.push_back(std::move(row));
    }
    bld.emit_caps(nullptr);
    return std::move(bld.lp);
}

ScenarioLP tighten(ScenarioLP lp, double amount) {
    if (amount < 0) throw std::invalid_argument("tighten: amount must be >= 0");
    for (LpRow& row : lp.rows)
        if (row.sample >= 0) row.rhs -= amount;
    return lp;
}

std::string ScenarioLP::dump() const {
    std::string out;
    char buf[32];
    for (const LpRow& row : rows) {
        out += row_tag_name(row.tag);
        out += "," + std::to_string(row.sample);
        std::snprintf(buf, sizeof buf, "%.17g", row.rhs);
        out += std::string(",") + buf;
        for (double c : row.coeffs) {
            std::snprintf(buf, sizeof buf, "%.17g", c);
            out += std::string(",") + buf;
        }
        out += "\n";
    }
    return out;
}

void write_lp_dump(const ScenarioLP& lp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("lp dump: cannot open " + path);
    out << lp.dump();
}

}  // namespace sbc
