#include "sbc/dataset.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sbc/scenario.hpp"

namespace sbc {

int default_worker_count() {
    if (const char* env = std::getenv("SBC_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) return std::min(w, 64);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

std::string dataset_fingerprint(const SystemModel& system, const SafetySpec& spec,
                                const InputPolytope* input_set, std::uint64_t count,
                                std::uint64_t succ_count, std::uint64_t seed) {
    std::string s = "system=" + system.name() + ";" + spec.fingerprint();
    if (input_set) s += ";U=" + input_set->fingerprint();
    s += ";N=" + std::to_string(count) + ";Nhat=" + std::to_string(succ_count) +
         ";seed=" + std::to_string(seed);
    return s;
}

TransitionDataset collect_dataset(const SystemModel& system, const SafetySpec& spec,
                                  const InputPolytope* input_set, std::uint64_t count,
                                  std::uint64_t succ_count, std::uint64_t seed, int workers) {
    spec.validate();
    if (count < 1 || succ_count < 1)
        throw std::invalid_argument("collect_dataset: N and N_hat must be >= 1");
    int n = system.state_dim();
    int m = system.input_dim();
    if (spec.state.dim() != n)
        throw std::invalid_argument("collect_dataset: system dimension " + std::to_string(n) +
                                    " does not match spec dimension " +
                                    std::to_string(spec.state.dim()));
    if (m > 0 && (!input_set || input_set->dim() != m))
        throw std::invalid_argument("collect_dataset: controlled system needs a matching input set");

    TransitionDataset data;
    data.n = n;
    data.m = m;
    data.count = count;
    data.succ_count = succ_count;
    data.seed = seed;
    data.fingerprint = dataset_fingerprint(system, spec, m > 0 ? input_set : nullptr, count,
                                           succ_count, seed);
    data.base.resize(count * static_cast<std::uint64_t>(n));
    data.inputs.resize(count * static_cast<std::uint64_t>(m));
    data.successors.resize(count * succ_count * static_cast<std::uint64_t>(n));
    data.in_initial.resize(count);
    data.in_unsafe.resize(count);

    Box input_box;
    if (m > 0) input_box = input_set->validate_bounded();

    std::string failure;
    std::mutex failure_mutex;

    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        try {
            for (std::uint64_t i = begin; i < end; ++i) {
                RngStream point_rng(seed, make_stream_id(StreamPurpose::base_points, i));
                std::span<double> x{data.base.data() + i * static_cast<std::uint64_t>(n),
                                    static_cast<std::size_t>(n)};
                spec.state.sample_into(point_rng, x);
                std::span<double> u{data.inputs.data() + i * static_cast<std::uint64_t>(m),
                                    static_cast<std::size_t>(m)};
                if (m > 0) input_set->sample_into(input_box, point_rng, u);
                data.in_initial[i] = spec.initial.contains(x) ? 1 : 0;
                data.in_unsafe[i] = spec.unsafe.contains(x) ? 1 : 0;
                for (std::uint64_t j = 0; j < succ_count; ++j) {
                    RngStream noise(seed,
                                    make_stream_id(StreamPurpose::successors, i * succ_count + j));
                    std::span<double> out{
                        data.successors.data() + (i * succ_count + j) * static_cast<std::uint64_t>(n),
                        static_cast<std::size_t>(n)};
                    try {
                        system.step(x, u, noise, out);
                    } catch (const std::exception& e) {
                        throw std::runtime_error("collect_dataset: step failed at sample (" +
                                                 std::to_string(i) + "," + std::to_string(j) +
                                                 "): " + e.what());
                    }
                }
            }
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (failure.empty()) failure = e.what();
        }
    };

    if (workers <= 0) workers = default_worker_count();
    workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), count));
    if (workers <= 1) {
        work(0, count);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t chunk = (count + static_cast<std::uint64_t>(workers) - 1) /
                              static_cast<std::uint64_t>(workers);
        for (int w = 0; w < workers; ++w) {
            std::uint64_t begin = static_cast<std::uint64_t>(w) * chunk;
            std::uint64_t end = std::min(count, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(work, begin, end);
        }
        for (auto& t : pool) t.join();
    }
    if (!failure.empty()) throw std::runtime_error(failure);
    return data;
}

void save_dataset_csv(const TransitionDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dataset cache: cannot open " + path + " for writing");
    out << "i,j";
    for (int d = 1; d <= data.n; ++d) out << ",x_" << d;
    for (int d = 1; d <= data.m; ++d) out << ",u_" << d;
    for (int d = 1; d <= data.n; ++d) out << ",xp_" << d;
    out << "\n";
    char buf[32];
    for (std::uint64_t i = 0; i < data.count; ++i) {
        for (std::uint64_t j = 0; j < data.succ_count; ++j) {
            out << i << "," << j;
            auto x = data.base_point(i);
            auto u = data.input(i);
            auto xp = data.successor(i, j);
            for (double v : x) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << "," << buf;
            }
            for (double v : u) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << "," << buf;
            }
            for (double v : xp) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << "," << buf;
            }
            out << "\n";
        }
    }
    std::ofstream meta(path + ".meta");
    if (!meta) throw std::runtime_error("dataset cache: cannot open " + path + ".meta");
    meta << "{\"fingerprint\":\"" << data.fingerprint << "\",\"rows\":"
         << data.count * data.succ_count << "}\n";
}

std::optional<TransitionDataset> load_dataset_csv(const std::string& path,
                                                  const std::string& expected_fingerprint,
                                                  const SafetySpec& spec) {
    std::ifstream meta(path + ".meta");
    if (!meta) return std::nullopt;
    std::string meta_text((std::istreambuf_iterator<char>(meta)),
                          std::istreambuf_iterator<char>());
    if (meta_text.find("\"" + expected_fingerprint + "\"") == std::string::npos)
        return std::nullopt;

    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string header;
    if (!std::getline(in, header)) return std::nullopt;

    int n = 0, m = 0, n_next = 0;
    {
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) {
            if (col.rfind("xp_", 0) == 0) ++n_next;
            else if (col.rfind("x_", 0) == 0) ++n;
            else if (col.rfind("u_", 0) == 0) ++m;
        }
    }
    if (n == 0 || n != n_next) return std::nullopt;

    TransitionDataset data;
    data.n = n;
    data.m = m;
    data.fingerprint = expected_fingerprint;

    std::vector<double> base, inputs, succ;
    std::string line;
    std::uint64_t max_i = 0, max_j = 0, rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string field;
        std::vector<double> vals;
        std::uint64_t ij[2] = {0, 0};
        int idx = 0;
        while (std::getline(ls, field, ',')) {
            if (idx < 2) ij[idx] = std::strtoull(field.c_str(), nullptr, 10);
            else vals.push_back(std::strtod(field.c_str(), nullptr));
            ++idx;
        }
        if (static_cast<int>(vals.size()) != 2 * n + m)
            throw std::runtime_error("dataset cache: malformed row in " + path + ": " + line);
        max_i = std::max(max_i, ij[0]);
        max_j = std::max(max_j, ij[1]);
        if (ij[1] == 0) {
            for (int d = 0; d < n; ++d) base.push_back(vals[static_cast<std::size_t>(d)]);
            for (int d = 0; d < m; ++d) inputs.push_back(vals[static_cast<std::size_t>(n + d)]);
        }
        for (int d = 0; d < n; ++d) succ.push_back(vals[static_cast<std::size_t>(n + m + d)]);
        ++rows;
    }
    data.count = max_i + 1;
    data.succ_count = max_j + 1;
    if (rows != data.count * data.succ_count ||
        base.size() != data.count * static_cast<std::uint64_t>(n))
        throw std::runtime_error("dataset cache: row count mismatch in " + path);
    data.base = std::move(base);
    data.inputs = std::move(inputs);
    data.successors = std::move(succ);
    data.seed = 0;  // carried by the fingerprint

    data.in_initial.resize(data.count);
    data.in_unsafe.resize(data.count);
    for (std::uint64_t i = 0; i < data.count; ++i) {
        auto x = data.base_point(i);
        if (!spec.state.contains(x))
            throw std::runtime_error("dataset cache: base point " + std::to_string(i) +
                                     " lies outside the state set");
        data.in_initial[i] = spec.initial.contains(x) ? 1 : 0;
        data.in_unsafe[i] = spec.unsafe.contains(x) ? 1 : 0;
    }
    return data;
}

TransitionDataset load_or_collect(const SystemModel& system, const SafetySpec& spec,
                                  const InputPolytope* input_set, std::uint64_t count,
                                  std::uint64_t succ_count, std::uint64_t seed,
                                  const std::string& cache_path, int workers) {
    std::string fp = dataset_fingerprint(system, spec, system.input_dim() > 0 ? input_set : nullptr,
                                         count, succ_count, seed);
    if (!cache_path.empty()) {
        if (auto cached = load_dataset_csv(cache_path, fp, spec)) {
            cached->seed = seed;
            return std::move(*cached);
        }
    }
    TransitionDataset data = collect_dataset(system, spec, input_set, count, succ_count, seed,
                                             workers);
    if (!cache_path.empty()) save_dataset_csv(data, cache_path);
    return data;
}

}  // namespace sbc
