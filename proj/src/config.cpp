#include "sbc/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace sbc {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

void expect_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

double get_num(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required value");
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

double get_num_or(const json& obj, const std::string& path, const std::string& key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

std::uint64_t get_uint(const json& obj, const std::string& path, const std::string& key,
                       std::uint64_t dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer())
        fail(path + "." + key, "expected a non-negative integer");
    auto v = obj[key].get<std::int64_t>();
    if (v < 0) fail(path + "." + key, "expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

// A box is [[lo,hi],...]; a region is either one box or a list of boxes.
Region parse_region(const json& v, const std::string& path) {
    auto parse_box = [&](const json& jb, const std::string& bpath) {
        Box box;
        if (!jb.is_array() || jb.empty()) fail(bpath, "expected a non-empty list of [lo,hi] pairs");
        for (const auto& pair : jb) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
                !pair[1].is_number())
                fail(bpath, "each dimension must be a [lo,hi] pair of numbers");
            box.lo.push_back(pair[0].get<double>());
            box.hi.push_back(pair[1].get<double>());
        }
        return box;
    };
    Region region;
    if (!v.is_array() || v.empty()) fail(path, "expected a box or a list of boxes");
    bool is_union = v[0].is_array() && !v[0].empty() && v[0][0].is_array();
    if (is_union) {
        int idx = 0;
        for (const auto& jb : v) region.boxes.push_back(parse_box(jb, path + "[" + std::to_string(idx++) + "]"));
    } else {
        region.boxes.push_back(parse_box(v, path));
    }
    return region;
}

json region_to_json(const Region& r) {
    auto box_to_json = [](const Box& b) {
        json jb = json::array();
        for (int d = 0; d < b.dim(); ++d) jb.push_back({b.lo[d], b.hi[d]});
        return jb;
    };
    if (r.boxes.size() == 1) return box_to_json(r.boxes.front());
    json out = json::array();
    for (const Box& b : r.boxes) out.push_back(box_to_json(b));
    return out;
}

}  // namespace

const char* job_kind_name(JobKind k) {
    switch (k) {
        case JobKind::verify: return "verify";
        case JobKind::synthesize: return "synthesize";
        case JobKind::verify_kappa: return "verify_kappa";
    }
    return "?";
}

JobConfig parse_job_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    expect_keys(root, "", {"job", "system", "spec", "barrier", "controller", "budget", "lipschitz",
                           "kappa", "sampling", "solver", "validation"});

    JobConfig cfg;

    if (!root.contains("job") || !root["job"].is_string()) fail("job", "missing job kind");
    std::string kind = root["job"].get<std::string>();
    if (kind == "verify") cfg.job = JobKind::verify;
    else if (kind == "synthesize") cfg.job = JobKind::synthesize;
    else if (kind == "verify_kappa") cfg.job = JobKind::verify_kappa;
    else fail("job", "expected one of verify, synthesize, verify_kappa");

    if (!root.contains("system")) fail("system", "missing section");
    {
        const json& s = root["system"];
        expect_keys(s, "system", {"builtin", "command", "state_dim", "input_dim"});
        if (s.contains("builtin")) cfg.system.builtin = s["builtin"].get<std::string>();
        if (s.contains("command")) cfg.system.command = s["command"].get<std::string>();
        cfg.system.state_dim = static_cast<int>(get_uint(s, "system", "state_dim", 0));
        cfg.system.input_dim = static_cast<int>(get_uint(s, "system", "input_dim", 0));
        if (cfg.system.builtin.empty() == cfg.system.command.empty())
            fail("system", "exactly one of builtin/command must be given");
        if (!cfg.system.command.empty() && cfg.system.state_dim < 1)
            fail("system.state_dim", "external systems must declare their state dimension");
    }

    if (!root.contains("spec")) fail("spec", "missing section");
    {
        const json& s = root["spec"];
        expect_keys(s, "spec", {"state", "initial", "unsafe", "horizon"});
        if (!s.contains("state")) fail("spec.state", "missing region");
        if (!s.contains("initial")) fail("spec.initial", "missing region");
        if (!s.contains("unsafe")) fail("spec.unsafe", "missing region");
        if (!s.contains("horizon")) fail("spec.horizon", "missing value");
        cfg.spec.state = parse_region(s["state"], "spec.state");
        cfg.spec.initial = parse_region(s["initial"], "spec.initial");
        cfg.spec.unsafe = parse_region(s["unsafe"], "spec.unsafe");
        cfg.spec.horizon = static_cast<int>(get_uint(s, "spec", "horizon", 0));
    }

    if (!root.contains("barrier")) fail("barrier", "missing section");
    {
        const json& s = root["barrier"];
        expect_keys(s, "barrier", {"degree", "zeroed"});
        cfg.barrier.degree = static_cast<int>(get_uint(s, "barrier", "degree", 2));
        if (s.contains("zeroed")) {
            if (!s["zeroed"].is_array()) fail("barrier.zeroed", "expected a list of exponent tuples");
            for (const auto& t : s["zeroed"]) {
                MultiIndex mi;
                for (const auto& e : t) mi.push_back(e.get<int>());
                cfg.barrier.zeroed.push_back(std::move(mi));
            }
        }
    }

    if (root.contains("controller")) {
        const json& s = root["controller"];
        expect_keys(s, "controller", {"degree", "input_matrix", "input_offset"});
        ControllerConfig cc;
        cc.degree = static_cast<int>(get_uint(s, "controller", "degree", 1));
        if (!s.contains("input_matrix") || !s.contains("input_offset"))
            fail("controller", "input_matrix (A) and input_offset (b) define the input polytope");
        for (const auto& row : s["input_matrix"]) {
            std::vector<double> r;
            for (const auto& v : row) r.push_back(v.get<double>());
            cc.input_set.a.push_back(std::move(r));
        }
        for (const auto& v : s["input_offset"]) cc.input_set.b.push_back(v.get<double>());
        cfg.controller = std::move(cc);
    }

    if (!root.contains("budget")) fail("budget", "missing section");
    {
        const json& s = root["budget"];
        expect_keys(s, "budget", {"beta", "beta_s", "rho", "delta", "m_hat", "epsilon"});
        cfg.budget.beta = get_num(s, "budget", "beta");
        cfg.budget.beta_s = get_num(s, "budget", "beta_s");
        cfg.budget.delta = get_num(s, "budget", "delta");
        cfg.budget.m_hat = get_num(s, "budget", "m_hat");
        cfg.budget.epsilon = get_num(s, "budget", "epsilon");
        if (s.contains("rho")) {
            if (s["rho"].is_string()) {
                if (s["rho"].get<std::string>() != "auto")
                    fail("budget.rho", "expected a number or \"auto\"");
            } else if (s["rho"].is_number()) {
                cfg.budget.rho = s["rho"].get<double>();
            } else {
                fail("budget.rho", "expected a number or \"auto\"");
            }
        }
    }

    if (!root.contains("lipschitz")) fail("lipschitz", "missing section");
    {
        const json& s = root["lipschitz"];
        expect_keys(s, "lipschitz",
                    {"mode", "value", "state_norm", "input_norm", "growth_state", "growth_input",
                     "growth_offset", "jacobian_state", "jacobian_input"});
        std::string mode = s.contains("mode") ? s["mode"].get<std::string>() : "given";
        if (mode == "given") cfg.lipschitz.mode = LipschitzMode::given;
        else if (mode == "lemma_quadratic") cfg.lipschitz.mode = LipschitzMode::lemma_quadratic;
        else if (mode == "lemma_control") cfg.lipschitz.mode = LipschitzMode::lemma_control;
        else fail("lipschitz.mode", "expected given, lemma_quadratic or lemma_control");
        cfg.lipschitz.value = get_num_or(s, "lipschitz", "value", 0.0);
        LipschitzParams& p = cfg.lipschitz.params;
        p.state_norm = get_num_or(s, "lipschitz", "state_norm", 0.0);
        p.input_norm = get_num_or(s, "lipschitz", "input_norm", 0.0);
        p.growth_state = get_num_or(s, "lipschitz", "growth_state", 0.0);
        p.growth_input = get_num_or(s, "lipschitz", "growth_input", 0.0);
        p.growth_offset = get_num_or(s, "lipschitz", "growth_offset", 0.0);
        p.jacobian_state = get_num_or(s, "lipschitz", "jacobian_state", 0.0);
        p.jacobian_input = get_num_or(s, "lipschitz", "jacobian_input", 0.0);
    }

    if (root.contains("kappa")) {
        const json& s = root["kappa"];
        expect_keys(s, "kappa", {"grid", "count"});
        if (s.contains("grid")) {
            if (!s["grid"].is_array() || s["grid"].empty())
                fail("kappa.grid", "expected a non-empty list of values in (0,1)");
            for (const auto& v : s["grid"]) cfg.kappa.grid.push_back(v.get<double>());
        }
        cfg.kappa.count = static_cast<int>(get_uint(s, "kappa", "count", 9));
    }

    if (root.contains("sampling")) {
        const json& s = root["sampling"];
        expect_keys(s, "sampling", {"seed", "n_override", "cache"});
        cfg.sampling.seed = get_uint(s, "sampling", "seed", 0);
        if (s.contains("n_override"))
            cfg.sampling.n_override = get_uint(s, "sampling", "n_override", 0);
        if (s.contains("cache")) cfg.sampling.cache = s["cache"].get<std::string>();
    }

    if (root.contains("solver")) {
        const json& s = root["solver"];
        expect_keys(s, "solver",
                    {"feas_tol", "opt_tol", "k_max", "norm_cap", "controller_norm_cap", "batch",
                     "max_cap_rounds", "tighten", "max_iter", "trace", "dump_lp"});
        cfg.solver.feas_tol = get_num_or(s, "solver", "feas_tol", 1e-9);
        cfg.solver.opt_tol = get_num_or(s, "solver", "opt_tol", 1e-9);
        cfg.solver.k_max = get_num_or(s, "solver", "k_max", 1e6);
        if (s.contains("norm_cap")) cfg.solver.norm_cap = get_num(s, "solver", "norm_cap");
        if (s.contains("controller_norm_cap"))
            cfg.solver.controller_norm_cap = get_num(s, "solver", "controller_norm_cap");
        cfg.solver.batch = static_cast<int>(get_uint(s, "solver", "batch", 256));
        cfg.solver.max_cap_rounds = static_cast<int>(get_uint(s, "solver", "max_cap_rounds", 4));
        if (s.contains("tighten")) {
            if (!s["tighten"].is_boolean()) fail("solver.tighten", "expected a boolean");
            cfg.solver.tighten = s["tighten"].get<bool>();
        }
        cfg.solver.max_iter = get_uint(s, "solver", "max_iter", 200000);
        if (s.contains("trace")) cfg.solver.trace = s["trace"].get<std::string>();
        if (s.contains("dump_lp")) {
            if (!s["dump_lp"].is_boolean()) fail("solver.dump_lp", "expected a boolean");
            cfg.solver.dump_lp = s["dump_lp"].get<bool>();
        }
    }

    if (root.contains("validation")) {
        const json& s = root["validation"];
        expect_keys(s, "validation", {"trials", "grid_per_dim", "fresh_draws"});
        cfg.validation.trials = get_uint(s, "validation", "trials", 100000);
        cfg.validation.grid_per_dim = static_cast<int>(get_uint(s, "validation", "grid_per_dim", 50));
        cfg.validation.fresh_draws = get_uint(s, "validation", "fresh_draws", 100);
    }

    cfg.validate();
    return cfg;
}

void JobConfig::validate() const {
    spec.validate();
    if (barrier.degree < 0) throw std::invalid_argument("config: barrier.degree: must be >= 0");
    if (!(budget.beta > 0.0 && budget.beta <= 1.0))
        throw std::invalid_argument("config: budget.beta: must lie in (0, 1]");
    if (!(budget.beta_s > 0.0 && budget.beta_s <= 1.0))
        throw std::invalid_argument("config: budget.beta_s: must lie in (0, 1]");
    if (budget.beta + budget.beta_s > 1.0)
        throw std::invalid_argument("config: budget: beta + beta_s must be <= 1 for a meaningful "
                                    "confidence");
    if (budget.rho && !(*budget.rho > 0.0 && *budget.rho <= 1.0))
        throw std::invalid_argument("config: budget.rho: must lie in (0, 1] or be \"auto\"");
    if (!(budget.delta > 0.0)) throw std::invalid_argument("config: budget.delta: must be > 0");
    if (!(budget.m_hat > 0.0)) throw std::invalid_argument("config: budget.m_hat: must be > 0");
    if (!(budget.epsilon > 0.0 && budget.epsilon <= 1.0))
        throw std::invalid_argument("config: budget.epsilon: must lie in (0, 1]");
    if (job == JobKind::synthesize && !controller)
        throw std::invalid_argument("config: controller: section required for synthesis jobs");
    if (job == JobKind::verify_kappa) {
        for (double k : kappa.grid)
            if (!(k > 0.0 && k < 1.0))
                throw std::invalid_argument("config: kappa.grid: values must lie in (0, 1)");
        if (kappa.grid.empty() && kappa.count < 1)
            throw std::invalid_argument("config: kappa.count: must be >= 1");
        if (lipschitz.mode != LipschitzMode::given)
            throw std::invalid_argument(
                "config: lipschitz.mode: the kappa job needs a user-supplied constant covering "
                "the contractive constraint family (mode \"given\")");
    }
    if (lipschitz.mode == LipschitzMode::given && !(lipschitz.value > 0.0))
        throw std::invalid_argument("config: lipschitz.value: must be > 0 in given mode");
    if (lipschitz.mode != LipschitzMode::given && !solver.norm_cap)
        throw std::invalid_argument("config: solver.norm_cap: required by the lemma-based "
                                    "Lipschitz modes");
    if (lipschitz.mode == LipschitzMode::lemma_control && !solver.controller_norm_cap)
        throw std::invalid_argument("config: solver.controller_norm_cap: required by "
                                    "lemma_control mode");
    if (solver.norm_cap && !(*solver.norm_cap > 0.0))
        throw std::invalid_argument("config: solver.norm_cap: must be > 0");
    if (solver.controller_norm_cap && !(*solver.controller_norm_cap > 0.0))
        throw std::invalid_argument("config: solver.controller_norm_cap: must be > 0");
    if (solver.batch < 1) throw std::invalid_argument("config: solver.batch: must be >= 1");
    if (!(solver.feas_tol > 0.0)) throw std::invalid_argument("config: solver.feas_tol: must be > 0");
    if (!(solver.k_max > 0.0)) throw std::invalid_argument("config: solver.k_max: must be > 0");
    if (validation.trials < 1)
        throw std::invalid_argument("config: validation.trials: must be >= 1");
    if (validation.grid_per_dim < 2)
        throw std::invalid_argument("config: validation.grid_per_dim: must be >= 2");
    if (validation.fresh_draws < 1)
        throw std::invalid_argument("config: validation.fresh_draws: must be >= 1");
}

JobConfig load_job_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_job_config(text);
}

std::string serialize_job_config(const JobConfig& cfg) {
    json root;
    root["job"] = job_kind_name(cfg.job);

    json sys;
    if (!cfg.system.builtin.empty()) sys["builtin"] = cfg.system.builtin;
    if (!cfg.system.command.empty()) {
        sys["command"] = cfg.system.command;
        sys["state_dim"] = cfg.system.state_dim;
        sys["input_dim"] = cfg.system.input_dim;
    }
    root["system"] = sys;

    json spec;
    spec["state"] = region_to_json(cfg.spec.state);
    spec["initial"] = region_to_json(cfg.spec.initial);
    spec["unsafe"] = region_to_json(cfg.spec.unsafe);
    spec["horizon"] = cfg.spec.horizon;
    root["spec"] = spec;

    json barrier;
    barrier["degree"] = cfg.barrier.degree;
    if (!cfg.barrier.zeroed.empty()) {
        json z = json::array();
        for (const auto& mi : cfg.barrier.zeroed) z.push_back(mi);
        barrier["zeroed"] = z;
    }
    root["barrier"] = barrier;

    if (cfg.controller) {
        json ctrl;
        ctrl["degree"] = cfg.controller->degree;
        ctrl["input_matrix"] = cfg.controller->input_set.a;
        ctrl["input_offset"] = cfg.controller->input_set.b;
        root["controller"] = ctrl;
    }

    json budget;
    budget["beta"] = cfg.budget.beta;
    budget["beta_s"] = cfg.budget.beta_s;
    if (cfg.budget.rho) budget["rho"] = *cfg.budget.rho;
    else budget["rho"] = "auto";
    budget["delta"] = cfg.budget.delta;
    budget["m_hat"] = cfg.budget.m_hat;
    budget["epsilon"] = cfg.budget.epsilon;
    root["budget"] = budget;

    json lip;
    switch (cfg.lipschitz.mode) {
        case LipschitzMode::given: lip["mode"] = "given"; break;
        case LipschitzMode::lemma_quadratic: lip["mode"] = "lemma_quadratic"; break;
        case LipschitzMode::lemma_control: lip["mode"] = "lemma_control"; break;
    }
    if (cfg.lipschitz.mode == LipschitzMode::given) {
        lip["value"] = cfg.lipschitz.value;
    } else {
        const LipschitzParams& p = cfg.lipschitz.params;
        lip["state_norm"] = p.state_norm;
        if (p.input_norm != 0.0) lip["input_norm"] = p.input_norm;
        lip["growth_state"] = p.growth_state;
        if (p.growth_input != 0.0) lip["growth_input"] = p.growth_input;
        lip["growth_offset"] = p.growth_offset;
        lip["jacobian_state"] = p.jacobian_state;
        if (p.jacobian_input != 0.0) lip["jacobian_input"] = p.jacobian_input;
    }
    root["lipschitz"] = lip;

    if (cfg.job == JobKind::verify_kappa) {
        json kappa;
        if (!cfg.kappa.grid.empty()) kappa["grid"] = cfg.kappa.grid;
        else kappa["count"] = cfg.kappa.count;
        root["kappa"] = kappa;
    }

    json sampling;
    sampling["seed"] = cfg.sampling.seed;
    if (cfg.sampling.n_override) sampling["n_override"] = *cfg.sampling.n_override;
    if (!cfg.sampling.cache.empty()) sampling["cache"] = cfg.sampling.cache;
    root["sampling"] = sampling;

    json solver;
    solver["feas_tol"] = cfg.solver.feas_tol;
    solver["opt_tol"] = cfg.solver.opt_tol;
    solver["k_max"] = cfg.solver.k_max;
    if (cfg.solver.norm_cap) solver["norm_cap"] = *cfg.solver.norm_cap;
    if (cfg.solver.controller_norm_cap)
        solver["controller_norm_cap"] = *cfg.solver.controller_norm_cap;
    solver["batch"] = cfg.solver.batch;
    solver["max_cap_rounds"] = cfg.solver.max_cap_rounds;
    solver["tighten"] = cfg.solver.tighten;
    solver["max_iter"] = cfg.solver.max_iter;
    if (!cfg.solver.trace.empty()) solver["trace"] = cfg.solver.trace;
    if (cfg.solver.dump_lp) solver["dump_lp"] = true;
    root["solver"] = solver;

    json validation;
    validation["trials"] = cfg.validation.trials;
    validation["grid_per_dim"] = cfg.validation.grid_per_dim;
    validation["fresh_draws"] = cfg.validation.fresh_draws;
    root["validation"] = validation;

    return root.dump(2) + "\n";
}

std::unique_ptr<SystemModel> make_system(const JobConfig& cfg) {
    if (!cfg.system.builtin.empty()) return builtin_system(cfg.system.builtin);
    return external_system(cfg.system.command, cfg.system.state_dim, cfg.system.input_dim);
}

}  // namespace sbc
