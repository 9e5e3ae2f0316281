#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sbc/config.hpp"
#include "sbc/report.hpp"

namespace sbc {

struct SampleCountPreview {
    std::uint64_t n_hat = 0;
    double lipschitz = 0.0;
    double eps_bar = 0.0;
    int dims = 0;  // binomial-tail summation limit
    std::uint64_t n = 0;
    std::uint64_t total_calls = 0;  // n * n_hat
    std::uint64_t kappa_grid = 1;
};

// Steps 1-3 of the procedures: counts and constants only, nothing sampled.
SampleCountPreview compute_sample_counts(const JobConfig& cfg);

CertificateReport run_verification(const JobConfig& cfg);
CertificateReport run_synthesis(const JobConfig& cfg);
CertificateReport run_verification_kappa(const JobConfig& cfg);
CertificateReport run_job(const JobConfig& cfg);  // dispatch on cfg.job

struct MonteCarloResult {
    double p_hat = 0.0;
    double ci_low = 0.0;  // one-sided 99% Clopper-Pearson lower bound
    std::uint64_t trials = 0;
    std::uint64_t safe = 0;
    std::uint64_t off_polytope = 0;  // controller outputs outside U (non-box case)
};

// Simulates trajectories from uniform initial states over the horizon,
// applying the polynomial controller (clipped to U) when given; returns
// the fraction that never enter the unsafe set.
MonteCarloResult monte_carlo_safety(const SystemModel& system, const SafetySpec& spec,
                                    const std::vector<Polynomial>* controller,
                                    const InputPolytope* input_set, std::uint64_t trials,
                                    std::uint64_t seed, int workers = 0);

struct ConditionCheck {
    double initial_violation = 0.0;   // max B(x) - 1 over the initial grid
    double unsafe_violation = 0.0;    // max lambda - B(x) over the unsafe grid
    double drift_violation = 0.0;     // empirical drift margin over the state grid
    double nonneg_violation = 0.0;    // max -B(x) over the state grid
    std::uint64_t grid_points = 0;
};

// Statistical posterior check of the certificate conditions on dense grids
// with fresh noise draws; labeled a check, not a proof.
ConditionCheck check_certificate(const CertificateReport& report, const SystemModel& system,
                                 const SafetySpec& spec, int grid_per_dim,
                                 std::uint64_t fresh_draws, std::uint64_t seed);

struct ValidationSummary {
    MonteCarloResult mc;
    ConditionCheck conditions;
    double claimed_bound = 0.0;
    bool bound_pass = false;      // mc.ci_low >= claimed bound
    bool condition_pass = false;  // certificate conditions hold on the grids
};

ValidationSummary validate_report(const CertificateReport& report, const JobConfig& cfg,
                                  std::uint64_t trials, std::uint64_t seed);

// Evaluates the controller at x and clips the result into U (coordinate
// clamp for box polytopes; general polytopes pass through with a counter).
std::vector<double> apply_controller(const std::vector<Polynomial>& controller,
                                     const InputPolytope& input_set,
                                     std::span<const double> x, std::uint64_t* off_polytope);

}  // namespace sbc
