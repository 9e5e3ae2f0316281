#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbc/poly.hpp"

namespace sbc {

struct JobConfig;

// Everything a certification run produced, plus the bookkeeping needed to
// audit it. Serialized as a deterministic key = value document; the
// simulator-call counters are process diagnostics and stay out of the file
// so repeated runs stay byte-identical.
struct CertificateReport {
    std::string kind;  // verify | synthesize | verify_kappa
    bool certified = false;
    std::string solver_status;

    double k_star = std::numeric_limits<double>::quiet_NaN();
    double epsilon = 0.0;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double c = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> kappa;

    double rho = std::numeric_limits<double>::quiet_NaN();  // effective budget
    double safety_lower_bound_raw = std::numeric_limits<double>::quiet_NaN();
    double safety_lower_bound = std::numeric_limits<double>::quiet_NaN();
    double confidence = 0.0;

    std::uint64_t n_used = 0;
    std::uint64_t n_required = 0;
    std::uint64_t n_hat = 0;
    std::uint64_t seed = 0;
    double lipschitz = 0.0;
    double eps_bar = 0.0;
    double delta = 0.0;
    double beta = 0.0;
    double beta_s = 0.0;
    int horizon = 0;

    std::optional<double> norm_cap_used;
    std::optional<double> controller_cap_used;
    int cap_rounds = 0;
    bool guarantees_void = false;
    bool tightened = false;
    bool k_at_bound = false;

    double max_violation = 0.0;
    std::uint64_t lp_rows = 0;
    int lp_rounds = 0;
    std::uint64_t lp_iterations = 0;

    std::string system_name;
    std::string spec_fingerprint;

    Polynomial barrier;
    std::vector<Polynomial> controller;
    std::vector<std::pair<double, double>> kappa_results;  // (kappa, K*) per grid point

    std::vector<std::pair<std::string, std::string>> provenance;

    // runtime diagnostics, not serialized
    std::uint64_t simulator_calls = 0;
    bool dataset_cache_hit = false;

    std::string to_text() const;
};

void write_report(const CertificateReport& report, const std::string& path);
CertificateReport parse_report_text(const std::string& text);
CertificateReport load_report(const std::string& path);

// Plot grids: barrier values over a 2-D slice of the state box (remaining
// coordinates at box midpoints), one CSV per report polynomial.
void write_plot_csvs(const CertificateReport& report, const JobConfig& cfg,
                     const std::string& dir);

}  // namespace sbc
