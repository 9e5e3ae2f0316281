#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbc/region.hpp"
#include "sbc/system.hpp"

namespace sbc {

struct InputPolytope;  // scenario.hpp

// Sampled transitions: N base points (with inputs for controlled systems),
// each with exactly N_hat noisy successors. Everything is a pure function
// of (system, spec, N, N_hat, seed).
struct TransitionDataset {
    int n = 0;  // state dimension
    int m = 0;  // input dimension (0 when autonomous)
    std::uint64_t count = 0;       // N
    std::uint64_t succ_count = 0;  // N_hat
    std::uint64_t seed = 0;
    std::string fingerprint;

    std::vector<double> base;        // count x n, row-major
    std::vector<double> inputs;      // count x m
    std::vector<double> successors;  // count x succ_count x n
    std::vector<std::uint8_t> in_initial;  // cached membership flags
    std::vector<std::uint8_t> in_unsafe;

    std::span<const double> base_point(std::uint64_t i) const {
        return {base.data() + i * static_cast<std::uint64_t>(n), static_cast<std::size_t>(n)};
    }
    std::span<const double> input(std::uint64_t i) const {
        return {inputs.data() + i * static_cast<std::uint64_t>(m), static_cast<std::size_t>(m)};
    }
    std::span<const double> successor(std::uint64_t i, std::uint64_t j) const {
        return {successors.data() + (i * succ_count + j) * static_cast<std::uint64_t>(n),
                static_cast<std::size_t>(n)};
    }
};

std::string dataset_fingerprint(const SystemModel& system, const SafetySpec& spec,
                                const InputPolytope* input_set, std::uint64_t count,
                                std::uint64_t succ_count, std::uint64_t seed);

// Draws base points uniformly over X (and inputs uniformly over U when the
// system is controlled), then N_hat independent successors per point.
// Fans out across worker threads without affecting the result.
TransitionDataset collect_dataset(const SystemModel& system, const SafetySpec& spec,
                                  const InputPolytope* input_set, std::uint64_t count,
                                  std::uint64_t succ_count, std::uint64_t seed,
                                  int workers = 0);

// Cache file: CSV rows i,j,x_1..x_n[,u_1..u_m],xp_1..xp_n plus a .meta
// sidecar holding the fingerprint.
void save_dataset_csv(const TransitionDataset& data, const std::string& path);
std::optional<TransitionDataset> load_dataset_csv(const std::string& path,
                                                  const std::string& expected_fingerprint,
                                                  const SafetySpec& spec);

// Cache-aware collection: returns the cached dataset when the fingerprint
// matches (zero simulator calls), collects and saves otherwise.
TransitionDataset load_or_collect(const SystemModel& system, const SafetySpec& spec,
                                  const InputPolytope* input_set, std::uint64_t count,
                                  std::uint64_t succ_count, std::uint64_t seed,
                                  const std::string& cache_path, int workers = 0);

int default_worker_count();

}  // namespace sbc
