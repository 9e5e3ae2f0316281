#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sbc/bounds.hpp"
#include "sbc/poly.hpp"
#include "sbc/region.hpp"
#include "sbc/scenario.hpp"
#include "sbc/system.hpp"

namespace sbc {

enum class JobKind { verify, synthesize, verify_kappa };

const char* job_kind_name(JobKind k);

struct SystemConfig {
    std::string builtin;   // one of the built-in names, or
    std::string command;   // external child command
    int state_dim = 0;     // external only
    int input_dim = 0;
};

struct BarrierConfig {
    int degree = 2;
    std::vector<MultiIndex> zeroed;
};

struct ControllerConfig {
    int degree = 1;
    InputPolytope input_set;
};

struct BudgetConfig {
    double beta = 0.0;
    double beta_s = 0.0;
    std::optional<double> rho;  // empty = "auto" (best achievable bound)
    double delta = 0.0;
    double m_hat = 0.0;
    double epsilon = 0.0;
};

enum class LipschitzMode { given, lemma_quadratic, lemma_control };

struct LipschitzConfig {
    LipschitzMode mode = LipschitzMode::given;
    double value = 0.0;  // given mode
    LipschitzParams params;  // lemma modes; barrier_norm/controller caps come from solver config
};

struct KappaConfig {
    std::vector<double> grid;  // explicit grid; empty means uniform
    int count = 9;             // uniform grid z/(count+1), z = 1..count
};

struct SamplingConfig {
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> n_override;
    std::string cache;  // dataset cache path, empty = no cache
};

struct SolverConfigC {
    double feas_tol = 1e-9;
    double opt_tol = 1e-9;
    double k_max = 1e6;
    std::optional<double> norm_cap;             // surrogate ||P|| cap
    std::optional<double> controller_norm_cap;  // per controller polynomial
    int batch = 256;
    int max_cap_rounds = 4;
    bool tighten = false;
    std::uint64_t max_iter = 200000;
    std::string trace;    // lazy-solver trace file
    bool dump_lp = false;  // write lp.csv next to the report
};

struct ValidationConfig {
    std::uint64_t trials = 100000;
    int grid_per_dim = 50;
    std::uint64_t fresh_draws = 100;
};

struct JobConfig {
    JobKind job = JobKind::verify;
    SystemConfig system;
    SafetySpec spec;
    BarrierConfig barrier;
    std::optional<ControllerConfig> controller;
    BudgetConfig budget;
    LipschitzConfig lipschitz;
    KappaConfig kappa;
    SamplingConfig sampling;
    SolverConfigC solver;
    ValidationConfig validation;

    // Full range validation; throws std::invalid_argument naming the key.
    void validate() const;
};

// Strict parser: unknown keys are hard errors naming the offending path.
JobConfig parse_job_config(const std::string& json_text);
JobConfig load_job_config(const std::string& path);

// Canonical serialization; parse(serialize(cfg)) round-trips identically.
std::string serialize_job_config(const JobConfig& cfg);

std::unique_ptr<SystemModel> make_system(const JobConfig& cfg);

}  // namespace sbc
