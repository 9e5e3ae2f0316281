#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sbc/rng.hpp"

namespace sbc {

// Black-box one-step sampler x+ = f(x, [u], w): the only access to the
// unknown dynamics. Each step call owns the RngStream it is handed, so
// concurrent callers with distinct streams are safe (the external
// subprocess variant serializes internally).
class SystemModel {
public:
    virtual ~SystemModel() = default;

    virtual int state_dim() const = 0;
    virtual int input_dim() const = 0;
    virtual std::string name() const = 0;

    void step(std::span<const double> x, std::span<const double> u, RngStream& rng,
              std::span<double> out) const;

    std::uint64_t step_count() const { return steps_.load(std::memory_order_relaxed); }
    void reset_step_count() { steps_.store(0, std::memory_order_relaxed); }

protected:
    virtual void do_step(std::span<const double> x, std::span<const double> u, RngStream& rng,
                         std::span<double> out) const = 0;

private:
    mutable std::atomic<std::uint64_t> steps_{0};
};

// Built-in case-study models: three_rooms, lane_keeping, heater.
// Throws std::invalid_argument listing the valid names otherwise.
std::unique_ptr<SystemModel> builtin_system(const std::string& name);
std::vector<std::string> builtin_system_names();

// Child process speaking the line protocol
//   request:  STEP x_1 ... x_n [u_1 ... u_m] | SEED s c
//   response: n whitespace-separated decimal reals
// where (s, c) seed the child's own noise so runs stay replayable.
std::unique_ptr<SystemModel> external_system(const std::string& command, int state_dim,
                                             int input_dim);

// Serves a built-in model over stdin/stdout with the same protocol;
// lets the CLI act as a stand-in external system. Returns on EOF.
void serve_builtin(const std::string& name);

}  // namespace sbc
