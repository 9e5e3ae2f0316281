#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sbc/scenario.hpp"

namespace sbc {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* lp_status_name(LpStatus s);

struct SolverOptions {
    double feas_tol = 1e-9;   // absolute row-residual tolerance
    double opt_tol = 1e-9;    // reduced-cost tolerance
    std::uint64_t max_iter = 200000;  // simplex pivots
    int max_rounds = 400;     // lazy outer rounds
    int batch = 256;          // most-violated rows added per round
    std::string trace_path;   // per-round trace when non-empty
};

struct LpSolution {
    LpStatus status = LpStatus::iteration_limit;
    double objective = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> x;            // decision vector in layout order
    std::vector<std::size_t> active_rows;
    double max_violation = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t iterations = 0;
    int rounds = 0;                   // lazy outer rounds (1 when direct)
    std::size_t working_rows = 0;     // final working-set size
    bool k_at_bound = false;          // optimum pinned at the |K| box: suspect
    std::vector<double> row_duals;    // per-row multipliers (tests/diagnostics)
};

// Generic dense LP: min objective . x  s.t.  rows[r] . x <= rhs[r] and
// lower <= x <= upper (entries may be +-inf). Solved by a two-phase dense
// simplex; used directly for small probe LPs.
struct RawLp {
    std::size_t num_vars = 0;
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<double> lower, upper;
};

LpSolution solve_raw(const RawLp& lp, const SolverOptions& opts);

// Solves the scenario program over its full row set. The returned solution
// is re-checked against every original row; "optimal" is only reported when
// the full scan passes at feas_tol.
LpSolution solve_simplex(const ScenarioLP& lp, const SolverOptions& opts);

// Constraint generation for the multi-million-row regime: solve on a
// working subset, scan all rows, add the `batch` most violated, repeat
// until the full set is satisfied. Identical feasible set, certified
// against every row before "optimal" is returned.
LpSolution solve_lazy(const ScenarioLP& lp, const SolverOptions& opts);

}  // namespace sbc
