#include "sbc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace sbc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One inequality a.x <= rhs in solver-internal form (original row index
// kept for certification and dual reporting; scale restores residuals).
struct WorkRow {
    const double* coeffs;
    double rhs;
    double scale;
    std::ptrdiff_t origin;  // index into the caller's row list, -1 for bound rows
};

double row_residual(std::span<const double> coeffs, double rhs, std::span<const double> x) {
    double acc = -rhs;
    for (std::size_t v = 0; v < coeffs.size(); ++v) acc += coeffs[v] * x[v];
    return acc;
}

// Primal:  min c.x  s.t.  row_r . x <= rhs_r  (x free).
// Solved as its dual  min rhs.y  s.t.  A^T y = -c, y >= 0  with a dense
// two-phase tableau: the equality count equals the (small) decision
// dimension, so the tableau stays num_vars x (rows + num_vars) no matter
// how many rows the scenario program has. The primal vertex is recovered
// from the simplex multipliers.
class DualSimplex {
public:
    DualSimplex(std::size_t num_vars, const std::vector<double>& objective,
                const std::vector<WorkRow>& rows, const SolverOptions& opts)
        : nv_(num_vars), ny_(rows.size()), opts_(opts) {
        ncols_ = ny_ + nv_ + 1;  // structural, artificial, rhs
        tab_.assign(nv_ * ncols_, 0.0);
        sign_.assign(nv_, 1.0);
        basis_.assign(nv_, 0);
        cost1_.assign(ncols_, 0.0);
        cost2_.assign(ncols_, 0.0);

        for (std::size_t v = 0; v < nv_; ++v) {
            double g = -objective[v];
            double s = g < 0.0 ? -1.0 : 1.0;
            sign_[v] = s;
            double* row = tab_.data() + v * ncols_;
            for (std::size_t r = 0; r < ny_; ++r) row[r] = s * rows[r].coeffs[v] / rows[r].scale;
            row[ny_ + v] = 1.0;
            row[ncols_ - 1] = s * g;
            basis_[v] = ny_ + v;  // artificial
        }
        costs2_struct_.assign(ny_, 0.0);
        for (std::size_t r = 0; r < ny_; ++r) costs2_struct_[r] = rows[r].rhs / rows[r].scale;

        // phase-1 reduced costs: artificials cost 1 and are basic
        for (std::size_t j = 0; j + 1 < ncols_; ++j) {
            double acc = 0.0;
            for (std::size_t v = 0; v < nv_; ++v) acc += tab_[v * ncols_ + j];
            cost1_[j] = (j >= ny_ ? 1.0 : 0.0) - acc;
        }
        double acc = 0.0;
        for (std::size_t v = 0; v < nv_; ++v) acc += tab_[v * ncols_ + ncols_ - 1];
        cost1_[ncols_ - 1] = -acc;
        for (std::size_t r = 0; r < ny_; ++r) cost2_[r] = costs2_struct_[r];
    }

    // returns optimal/infeasible/unbounded/iteration_limit of the DUAL
    LpStatus run(std::uint64_t max_iter) {
        banned_.assign(ncols_ - 1, 0);
        LpStatus s = iterate(cost1_, max_iter);
        if (s == LpStatus::iteration_limit) return s;
        if (phase1_objective() > 1e-7) return LpStatus::infeasible;
        drive_out_artificials();
        for (std::size_t j = ny_; j + 1 < ncols_; ++j) banned_[j] = 1;  // phase 2: no artificials
        return iterate(cost2_, max_iter);
    }

    double phase1_objective() const {
        double acc = 0.0;
        for (std::size_t v = 0; v < nv_; ++v)
            if (basis_[v] >= ny_) acc += tab_[v * ncols_ + ncols_ - 1];
        return acc;
    }

    // primal vertex via the simplex multipliers read off the artificial columns
    std::vector<double> primal_solution() const {
        std::vector<double> x(nv_, 0.0);
        for (std::size_t v = 0; v < nv_; ++v) {
            double acc = 0.0;
            for (std::size_t i = 0; i < nv_; ++i) {
                double fb = basis_[i] < ny_ ? costs2_struct_[basis_[i]] : 0.0;
                acc += fb * tab_[i * ncols_ + ny_ + v];
            }
            x[v] = sign_[v] * acc;
        }
        return x;
    }

    std::vector<double> dual_values() const {
        std::vector<double> y(ny_, 0.0);
        for (std::size_t i = 0; i < nv_; ++i)
            if (basis_[i] < ny_) y[basis_[i]] = tab_[i * ncols_ + ncols_ - 1];
        return y;
    }

    std::uint64_t iterations() const { return iters_; }

private:
    LpStatus iterate(std::vector<double>& cost, std::uint64_t max_iter) {
        int stall = 0;
        bool bland = false;
        double last_obj = cost[ncols_ - 1];
        while (true) {
            if (iters_ >= max_iter) return LpStatus::iteration_limit;
            std::size_t enter = ncols_;
            if (!bland) {
                double best = -opts_.opt_tol;
                for (std::size_t j = 0; j + 1 < ncols_; ++j) {
                    if (banned_[j]) continue;
                    if (cost[j] < best) {
                        best = cost[j];
                        enter = j;
                    }
                }
            } else {
                for (std::size_t j = 0; j + 1 < ncols_; ++j) {
                    if (banned_[j]) continue;
                    if (cost[j] < -opts_.opt_tol) {
                        enter = j;
                        break;
                    }
                }
            }
            if (enter == ncols_) return LpStatus::optimal;

            std::size_t leave = nv_;
            double best_ratio = kInf;
            for (std::size_t i = 0; i < nv_; ++i) {
                double a = tab_[i * ncols_ + enter];
                if (a > 1e-11) {
                    double ratio = tab_[i * ncols_ + ncols_ - 1] / a;
                    bool better = ratio < best_ratio - 1e-12;
                    bool tie = std::abs(ratio - best_ratio) <= 1e-12;
                    // ties: kick artificials first, then lowest basis index
                    if (better ||
                        (tie && leave < nv_ &&
                         ((basis_[i] >= ny_ && basis_[leave] < ny_) ||
                          ((basis_[i] >= ny_) == (basis_[leave] >= ny_) &&
                           basis_[i] < basis_[leave])))) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == nv_) return LpStatus::unbounded;

            pivot(leave, enter);
            ++iters_;

            // objective row stores -obj; progress pushes it up
            double obj = cost[ncols_ - 1];
            if (obj <= last_obj + 1e-13 * (1.0 + std::abs(last_obj))) {
                if (++stall > 200) bland = true;  // anti-cycling fallback
            } else {
                stall = 0;
                last_obj = obj;
            }
        }
    }

    void pivot(std::size_t leave, std::size_t enter) {
        if (basis_[leave] >= ny_) banned_[basis_[leave]] = 1;  // artificials never return
        double* prow = tab_.data() + leave * ncols_;
        double inv = 1.0 / prow[enter];
        for (std::size_t j = 0; j < ncols_; ++j) prow[j] *= inv;
        prow[enter] = 1.0;
        for (std::size_t i = 0; i < nv_; ++i) {
            if (i == leave) continue;
            double* row = tab_.data() + i * ncols_;
            double f = row[enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < ncols_; ++j) row[j] -= f * prow[j];
            row[enter] = 0.0;
        }
        for (auto* c : {&cost1_, &cost2_}) {
            double f = (*c)[enter];
            if (f != 0.0) {
                for (std::size_t j = 0; j < ncols_; ++j) (*c)[j] -= f * prow[j];
                (*c)[enter] = 0.0;
            }
        }
        basis_[leave] = enter;
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < nv_; ++i) {
            if (basis_[i] < ny_) continue;
            double* row = tab_.data() + i * ncols_;
            std::size_t piv = ncols_;
            for (std::size_t j = 0; j < ny_; ++j)
                if (std::abs(row[j]) > 1e-9) {
                    piv = j;
                    break;
                }
            if (piv < ncols_) {
                pivot(i, piv);
                ++iters_;
            }
            // otherwise the equality row is redundant; the artificial stays
            // basic at value zero
        }
    }

    std::size_t nv_, ny_, ncols_;
    SolverOptions opts_;
    std::vector<double> tab_;
    std::vector<double> sign_;
    std::vector<std::size_t> basis_;
    std::vector<double> cost1_, cost2_;
    std::vector<double> costs2_struct_;
    std::vector<char> banned_;
    std::uint64_t iters_ = 0;
};

std::vector<WorkRow> make_work_rows(const std::vector<std::vector<double>>& rows,
                                    const std::vector<double>& rhs,
                                    std::vector<std::vector<double>>& bound_storage,
                                    const std::vector<double>& lower,
                                    const std::vector<double>& upper, bool* infeasible_zero_row) {
    std::size_t nv = lower.size();
    std::vector<WorkRow> work;
    work.reserve(rows.size() + 2 * nv);
    *infeasible_zero_row = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double scale = 0.0;
        for (double c : rows[r]) scale = std::max(scale, std::abs(c));
        if (scale == 0.0) {
            if (rhs[r] < -1e-12) *infeasible_zero_row = true;  // 0 <= rhs < 0
            continue;  // trivially satisfied rows carry no information
        }
        work.push_back(WorkRow{rows[r].data(), rhs[r], scale, static_cast<std::ptrdiff_t>(r)});
    }
    for (std::size_t v = 0; v < nv; ++v) {
        if (lower[v] > -kInf) {
            auto& row = bound_storage.emplace_back(nv, 0.0);
            row[v] = -1.0;
            work.push_back(WorkRow{row.data(), -lower[v], 1.0, -1});
        }
        if (upper[v] < kInf) {
            auto& row = bound_storage.emplace_back(nv, 0.0);
            row[v] = 1.0;
            work.push_back(WorkRow{row.data(), upper[v], 1.0, -1});
        }
    }
    return work;
}

bool primal_feasible_point_exists(std::size_t num_vars, const std::vector<WorkRow>& work,
                                  const SolverOptions& opts, std::uint64_t max_iter) {
    // min s  s.t.  row.x - s <= rhs, s >= 0: feasibility phase on the
    // primal side, solved through the same dual core.
    std::size_t nv = num_vars + 1;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    rows.reserve(work.size() + 1);
    for (const auto& w : work) {
        auto& row = rows.emplace_back(nv, 0.0);
        for (std::size_t v = 0; v < num_vars; ++v) row[v] = w.coeffs[v] / w.scale;
        row[num_vars] = -1.0;
        rhs.push_back(w.rhs / w.scale);
    }
    {
        auto& row = rows.emplace_back(nv, 0.0);  // -s <= 0
        row[num_vars] = -1.0;
        rhs.push_back(0.0);
    }
    std::vector<WorkRow> fwork;
    for (std::size_t r = 0; r < rows.size(); ++r)
        fwork.push_back(WorkRow{rows[r].data(), rhs[r], 1.0, static_cast<std::ptrdiff_t>(r)});
    std::vector<double> obj(nv, 0.0);
    obj[num_vars] = 1.0;
    DualSimplex core(nv, obj, fwork, opts);
    LpStatus s = core.run(max_iter);
    if (s != LpStatus::optimal) return false;  // conservatively report infeasible
    std::vector<double> x = core.primal_solution();
    return x[num_vars] <= std::max(opts.feas_tol, 1e-7);
}

LpSolution solve_rows(std::size_t num_vars, const std::vector<double>& objective,
                      const std::vector<std::vector<double>>& rows,
                      const std::vector<double>& rhs, const std::vector<double>& lower,
                      const std::vector<double>& upper, const SolverOptions& opts) {
    LpSolution sol;
    std::vector<std::vector<double>> bound_storage;
    bool zero_row_infeasible = false;
    std::vector<WorkRow> work =
        make_work_rows(rows, rhs, bound_storage, lower, upper, &zero_row_infeasible);
    if (zero_row_infeasible) {
        sol.status = LpStatus::infeasible;
        return sol;
    }

    DualSimplex core(num_vars, objective, work, opts);
    LpStatus dual_status = core.run(opts.max_iter);
    sol.iterations = core.iterations();

    if (dual_status == LpStatus::iteration_limit) {
        sol.status = LpStatus::iteration_limit;
        return sol;
    }
    if (dual_status == LpStatus::infeasible) {
        // dual infeasible: primal is unbounded when feasible at all
        sol.status = primal_feasible_point_exists(num_vars, work, opts, opts.max_iter)
                         ? LpStatus::unbounded
                         : LpStatus::infeasible;
        return sol;
    }
    if (dual_status == LpStatus::unbounded) {
        sol.status = LpStatus::infeasible;
        return sol;
    }

    sol.x = core.primal_solution();
    sol.objective = 0.0;
    for (std::size_t v = 0; v < num_vars; ++v) sol.objective += objective[v] * sol.x[v];

    std::vector<double> y = core.dual_values();
    sol.row_duals.assign(rows.size(), 0.0);
    sol.max_violation = 0.0;
    for (std::size_t r = 0; r < work.size(); ++r) {
        std::span<const double> coeffs{work[r].coeffs, num_vars};
        double res = row_residual(coeffs, work[r].rhs, sol.x);
        sol.max_violation = std::max(sol.max_violation, res);
        if (work[r].origin >= 0) {
            sol.row_duals[static_cast<std::size_t>(work[r].origin)] = y[r] / work[r].scale;
            if (res > -1e-7)
                sol.active_rows.push_back(static_cast<std::size_t>(work[r].origin));
        }
    }
    sol.status = sol.max_violation <= opts.feas_tol ? LpStatus::optimal : LpStatus::iteration_limit;
    return sol;
}

}  // namespace

const char* lp_status_name(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::iteration_limit: return "iteration_limit";
    }
    return "?";
}

LpSolution solve_raw(const RawLp& lp, const SolverOptions& opts) {
    if (lp.objective.size() != lp.num_vars || lp.lower.size() != lp.num_vars ||
        lp.upper.size() != lp.num_vars || lp.rows.size() != lp.rhs.size())
        throw std::invalid_argument("solve_raw: inconsistent problem shapes");
    for (const auto& row : lp.rows)
        if (row.size() != lp.num_vars)
            throw std::invalid_argument("solve_raw: row width does not match num_vars");
    return solve_rows(lp.num_vars, lp.objective, lp.rows, lp.rhs, lp.lower, lp.upper, opts);
}

namespace {

RawLp to_raw(const ScenarioLP& lp, const std::vector<std::size_t>* subset) {
    RawLp raw;
    raw.num_vars = static_cast<std::size_t>(lp.layout.num_vars());
    raw.objective.assign(raw.num_vars, 0.0);
    raw.objective[DecisionLayout::k_index] = 1.0;  // minimize K
    raw.lower.resize(raw.num_vars);
    raw.upper.resize(raw.num_vars);
    for (std::size_t v = 0; v < raw.num_vars; ++v) {
        raw.lower[v] = lp.bounds[v].lo;
        raw.upper[v] = lp.bounds[v].hi;
    }
    auto push = [&raw, &lp](std::size_t r) {
        raw.rows.push_back(lp.rows[r].coeffs);
        raw.rhs.push_back(lp.rows[r].rhs);
    };
    if (subset) {
        for (std::size_t r : *subset) push(r);
    } else {
        for (std::size_t r = 0; r < lp.rows.size(); ++r) push(r);
    }
    return raw;
}

void finalize_scenario_solution(const ScenarioLP& lp, const SolverOptions& opts, LpSolution& sol) {
    if (sol.x.empty()) return;
    sol.active_rows.clear();
    sol.max_violation = 0.0;
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        double res = row_residual(lp.rows[r].coeffs, lp.rows[r].rhs, sol.x);
        sol.max_violation = std::max(sol.max_violation, res);
        if (res > -1e-7) sol.active_rows.push_back(r);
    }
    double k = sol.x[DecisionLayout::k_index];
    double k_max = lp.bounds[DecisionLayout::k_index].hi;
    sol.k_at_bound = std::abs(std::abs(k) - k_max) <= 1e-6 * std::max(1.0, k_max);
    if (sol.status == LpStatus::optimal && sol.max_violation > opts.feas_tol)
        sol.status = LpStatus::iteration_limit;  // never a wrong "optimal"
}

}  // namespace

LpSolution solve_simplex(const ScenarioLP& lp, const SolverOptions& opts) {
    RawLp raw = to_raw(lp, nullptr);
    LpSolution sol = solve_raw(raw, opts);
    sol.rounds = 1;
    sol.working_rows = lp.rows.size();
    if (sol.status == LpStatus::optimal || !sol.x.empty()) {
        // map duals 1:1 (full set) and recertify against the scenario rows
        finalize_scenario_solution(lp, opts, sol);
    }
    return sol;
}

LpSolution solve_lazy(const ScenarioLP& lp, const SolverOptions& opts) {
    std::size_t total = lp.rows.size();
    std::vector<char> in_set(total, 0);
    std::vector<std::size_t> subset;

    // seed the working set with every x-independent row plus the first
    // batch of sample rows
    for (std::size_t r = 0; r < total; ++r)
        if (lp.rows[r].sample < 0) {
            in_set[r] = 1;
            subset.push_back(r);
        }
    for (std::size_t r = 0; r < total && subset.size() < static_cast<std::size_t>(opts.batch) + 8;
         ++r)
        if (!in_set[r]) {
            in_set[r] = 1;
            subset.push_back(r);
        }

    std::ofstream trace;
    if (!opts.trace_path.empty()) trace.open(opts.trace_path, std::ios::app);

    double add_tol = std::max(opts.feas_tol * 0.5, 1e-12);
    LpSolution sol;
    for (int round = 1; round <= opts.max_rounds; ++round) {
        RawLp raw = to_raw(lp, &subset);
        sol = solve_raw(raw, opts);
        sol.rounds = round;
        sol.working_rows = subset.size();
        if (sol.status == LpStatus::infeasible) {
            // a subset already infeasible certifies the full program infeasible
            if (trace.is_open())
                trace << "round=" << round << " rows=" << subset.size() << " infeasible\n";
            return sol;
        }
        if (sol.status == LpStatus::iteration_limit) return sol;
        if (sol.status == LpStatus::unbounded) {
            // add more rows to cut the ray; give up when nothing is left
            std::size_t added = 0;
            for (std::size_t r = 0; r < total && added < static_cast<std::size_t>(opts.batch);
                 ++r)
                if (!in_set[r]) {
                    in_set[r] = 1;
                    subset.push_back(r);
                    ++added;
                }
            if (added == 0) return sol;
            continue;
        }

        // scan the full row set for violations
        std::vector<std::pair<double, std::size_t>> violated;
        double max_violation = 0.0;
        for (std::size_t r = 0; r < total; ++r) {
            if (in_set[r]) continue;
            double res = row_residual(lp.rows[r].coeffs, lp.rows[r].rhs, sol.x);
            if (res > add_tol) violated.emplace_back(res, r);
            if (res > max_violation) max_violation = res;
        }
        if (trace.is_open())
            trace << "round=" << round << " rows=" << subset.size()
                  << " objective=" << sol.objective << " violated=" << violated.size()
                  << " max_violation=" << max_violation << "\n";
        if (violated.empty()) {
            finalize_scenario_solution(lp, opts, sol);
            return sol;
        }
        std::size_t take = std::min<std::size_t>(violated.size(),
                                                 static_cast<std::size_t>(opts.batch));
        std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(take),
                          violated.end(), [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first > b.first;
                              return a.second < b.second;
                          });
        for (std::size_t t = 0; t < take; ++t) {
            in_set[violated[t].second] = 1;
            subset.push_back(violated[t].second);
        }
    }
    sol.status = LpStatus::iteration_limit;
    sol.x.clear();  // no certified incumbent
    sol.objective = std::numeric_limits<double>::quiet_NaN();
    return sol;
}

}  // namespace sbc
