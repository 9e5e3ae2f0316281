#include "sbc/system.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sbc {

void SystemModel::step(std::span<const double> x, std::span<const double> u, RngStream& rng,
                       std::span<double> out) const {
    if (x.size() != static_cast<std::size_t>(state_dim()))
        throw std::invalid_argument(name() + ": state has dimension " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(state_dim()));
    if (u.size() != static_cast<std::size_t>(input_dim()))
        throw std::invalid_argument(name() + ": input has dimension " + std::to_string(u.size()) +
                                    ", expected " + std::to_string(input_dim()));
    if (out.size() != static_cast<std::size_t>(state_dim()))
        throw std::invalid_argument(name() + ": output buffer has wrong dimension");
    steps_.fetch_add(1, std::memory_order_relaxed);
    do_step(x, u, rng, out);
    for (double v : out)
        if (!std::isfinite(v))
            throw std::runtime_error(name() + ": successor state is not finite");
}

namespace {

// Temperature network of three rooms around ambient T_e, Euler step tau_s.
class ThreeRooms final : public SystemModel {
public:
    int state_dim() const override { return 3; }
    int input_dim() const override { return 0; }
    std::string name() const override { return "three_rooms"; }

private:
    static constexpr double tau = 5.0;
    static constexpr double alpha = 6.2e-3;
    static constexpr double alpha_e = 8e-3;
    static constexpr double T_e = 10.0;
    static constexpr double sigma = 0.01;

    void do_step(std::span<const double> x, std::span<const double>, RngStream& rng,
                 std::span<double> out) const override {
        double t1 = x[0], t2 = x[1], t3 = x[2];
        out[0] = (1.0 - tau * (alpha + alpha_e)) * t1 + tau * alpha * t2 + tau * alpha_e * T_e;
        out[1] = (1.0 - tau * (2.0 * alpha + alpha_e)) * t2 + tau * alpha * (t1 + t3) +
                 tau * alpha_e * T_e;
        out[2] = (1.0 - tau * (alpha + alpha_e)) * t3 + tau * alpha * t2 + tau * alpha_e * T_e;
        for (int d = 0; d < 3; ++d) out[d] += rng.gaussian(0.0, sigma);
    }
};

// Kinematic single-track model, constant speed and steering angle.
class LaneKeeping final : public SystemModel {
public:
    int state_dim() const override { return 3; }
    int input_dim() const override { return 0; }
    std::string name() const override { return "lane_keeping"; }

private:
    static constexpr double tau = 0.1;
    static constexpr double v = 5.0;
    static constexpr double l_r = 1.384;
    static constexpr double l_f = 1.384;
    static constexpr double delta_f_deg = 5.0;

    void do_step(std::span<const double> x, std::span<const double>, RngStream& rng,
                 std::span<double> out) const override {
        double delta_f = delta_f_deg * std::atan(1.0) / 45.0;  // degrees to radians
        double beta = l_r / (l_r + l_f) * std::atan(std::tan(delta_f));
        double psi = x[2];
        out[0] = x[0] + tau * v * std::cos(psi + beta) + rng.gaussian(0.0, 0.01);
        out[1] = x[1] + tau * v * std::sin(psi + beta) + rng.gaussian(0.0, 0.01);
        out[2] = psi + tau * v / l_r * std::sin(beta) + rng.gaussian(0.0, 0.001);
    }
};

// Single room with a heater, duty-cycle input.
class Heater final : public SystemModel {
public:
    int state_dim() const override { return 1; }
    int input_dim() const override { return 1; }
    std::string name() const override { return "heater"; }

private:
    static constexpr double tau = 5.0;
    static constexpr double T_e = 15.0;
    static constexpr double T_h = 45.0;
    static constexpr double alpha_e = 8e-3;
    static constexpr double alpha_h = 3.6e-3;
    static constexpr double sigma = 0.05;

    void do_step(std::span<const double> x, std::span<const double> u, RngStream& rng,
                 std::span<double> out) const override {
        double T = x[0];
        out[0] = T + tau * (alpha_e * (T_e - T) + alpha_h * (T_h - T) * u[0]) +
                 rng.gaussian(0.0, sigma);
    }
};

}  // namespace

std::vector<std::string> builtin_system_names() { return {"three_rooms", "lane_keeping", "heater"}; }

std::unique_ptr<SystemModel> builtin_system(const std::string& name) {
    if (name == "three_rooms") return std::make_unique<ThreeRooms>();
    if (name == "lane_keeping") return std::make_unique<LaneKeeping>();
    if (name == "heater") return std::make_unique<Heater>();
    std::string valid;
    for (const auto& v : builtin_system_names()) valid += (valid.empty() ? "" : ", ") + v;
    throw std::invalid_argument("unknown built-in system '" + name + "' (valid: " + valid + ")");
}

void serve_builtin(const std::string& name) {
    auto sys = builtin_system(name);
    int n = sys->state_dim(), m = sys->input_dim();
    std::vector<double> x(static_cast<std::size_t>(n)), u(static_cast<std::size_t>(m));
    std::vector<double> next(static_cast<std::size_t>(n));
    std::string line;
    while (std::getline(std::cin, line)) {
        std::istringstream in(line);
        std::string tok;
        in >> tok;
        if (tok != "STEP") {
            std::cout << "ERR expected STEP\n" << std::flush;
            continue;
        }
        for (double& v : x) in >> v;
        for (double& v : u) in >> v;
        std::uint64_t seed = 0, counter = 0;
        in >> tok >> tok;  // "|" "SEED"
        in >> seed >> counter;
        if (!in) {
            std::cout << "ERR malformed request\n" << std::flush;
            continue;
        }
        RngStream rng(seed, counter);
        sys->step(x, u, rng, next);
        char buf[32];
        std::string reply;
        for (int d = 0; d < n; ++d) {
            std::snprintf(buf, sizeof buf, "%.17g", next[static_cast<std::size_t>(d)]);
            reply += buf;
            if (d + 1 < n) reply += ' ';
        }
        std::cout << reply << "\n" << std::flush;
    }
}

}  // namespace sbc
