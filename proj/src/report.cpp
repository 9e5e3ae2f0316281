#include "sbc/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sbc/config.hpp"

namespace sbc {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string basis_field(const MonomialBasis& basis) {
    std::string s;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (i) s += ";";
        const MultiIndex& mi = basis[i];
        for (std::size_t d = 0; d < mi.size(); ++d) {
            if (d) s += " ";
            s += std::to_string(mi[d]);
        }
    }
    return s;
}

MonomialBasis parse_basis_field(int dim, int degree, const std::string& field) {
    std::vector<MultiIndex> indices;
    std::stringstream ss(field);
    std::string tuple;
    while (std::getline(ss, tuple, ';')) {
        MultiIndex mi;
        std::stringstream ts(tuple);
        int e;
        while (ts >> e) mi.push_back(e);
        if (static_cast<int>(mi.size()) != dim)
            throw std::invalid_argument("report: basis tuple has wrong dimension");
        indices.push_back(std::move(mi));
    }
    return MonomialBasis(dim, degree, std::move(indices));
}

std::vector<double> parse_csv_doubles(const std::string& field) {
    std::vector<double> out;
    std::stringstream ss(field);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::strtod(tok.c_str(), nullptr));
    return out;
}

}  // namespace

std::string CertificateReport::to_text() const {
    std::string s;
    auto kv = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    auto kvd = [&](const std::string& k, double v) { kv(k, fmt(v)); };
    auto kvu = [&](const std::string& k, std::uint64_t v) { kv(k, std::to_string(v)); };
    auto kvb = [&](const std::string& k, bool v) { kv(k, v ? "true" : "false"); };

    kv("report_format", "1");
    kv("kind", kind);
    kvb("certified", certified);
    kv("solver_status", solver_status);
    kvd("k_star", k_star);
    kvd("epsilon", epsilon);
    kvd("lambda", lambda);
    kvd("c", c);
    if (kappa) kvd("kappa", *kappa);
    kvd("rho", rho);
    kvd("safety_lower_bound_raw", safety_lower_bound_raw);
    kvd("safety_lower_bound", safety_lower_bound);
    kvd("confidence", confidence);
    kvu("n_used", n_used);
    kvu("n_required", n_required);
    kvu("n_hat", n_hat);
    kvu("seed", seed);
    kvd("lipschitz", lipschitz);
    kvd("eps_bar", eps_bar);
    kvd("delta", delta);
    kvd("beta", beta);
    kvd("beta_s", beta_s);
    kvu("horizon", static_cast<std::uint64_t>(horizon));
    if (norm_cap_used) kvd("norm_cap_used", *norm_cap_used);
    if (controller_cap_used) kvd("controller_cap_used", *controller_cap_used);
    kvu("cap_rounds", static_cast<std::uint64_t>(cap_rounds));
    kvb("guarantees_void", guarantees_void);
    kvb("tightened", tightened);
    kvb("k_at_bound", k_at_bound);
    kvd("max_violation", max_violation);
    kvu("lp_rows", lp_rows);
    kvu("lp_rounds", static_cast<std::uint64_t>(lp_rounds));
    kvu("lp_iterations", lp_iterations);
    kv("system", system_name);
    kv("spec", spec_fingerprint);

    kvu("barrier_dim", static_cast<std::uint64_t>(barrier.dim()));
    kvu("barrier_degree", static_cast<std::uint64_t>(barrier.degree()));
    kv("barrier_basis", basis_field(barrier.basis));
    kv("barrier_coeffs", barrier.coeffs_csv());
    kvu("controller_count", controller.size());
    for (std::size_t l = 0; l < controller.size(); ++l) {
        std::string prefix = "controller_" + std::to_string(l);
        kvu(prefix + "_dim", static_cast<std::uint64_t>(controller[l].dim()));
        kvu(prefix + "_degree", static_cast<std::uint64_t>(controller[l].degree()));
        kv(prefix + "_basis", basis_field(controller[l].basis));
        kv(prefix + "_coeffs", controller[l].coeffs_csv());
    }
    kvu("kappa_grid_size", kappa_results.size());
    for (std::size_t i = 0; i < kappa_results.size(); ++i)
        kv("kappa_result_" + std::to_string(i),
           fmt(kappa_results[i].first) + "," + fmt(kappa_results[i].second));
    kvu("provenance_count", provenance.size());
    for (std::size_t i = 0; i < provenance.size(); ++i)
        kv("provenance_" + std::to_string(i), provenance[i].first + ": " + provenance[i].second);
    return s;
}

void write_report(const CertificateReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot open " + path + " for writing");
    out << report.to_text();
}

CertificateReport parse_report_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        auto pos = line.find(" = ");
        if (pos == std::string::npos) continue;
        kv[line.substr(0, pos)] = line.substr(pos + 3);
    }
    auto need = [&kv](const std::string& k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end()) throw std::invalid_argument("report: missing field " + k);
        return it->second;
    };
    auto num = [&need](const std::string& k) { return std::strtod(need(k).c_str(), nullptr); };
    auto uint = [&need](const std::string& k) {
        return std::strtoull(need(k).c_str(), nullptr, 10);
    };
    auto boolean = [&need](const std::string& k) { return need(k) == "true"; };

    if (need("report_format") != "1")
        throw std::invalid_argument("report: unsupported format version");

    CertificateReport r;
    r.kind = need("kind");
    r.certified = boolean("certified");
    r.solver_status = need("solver_status");
    r.k_star = num("k_star");
    r.epsilon = num("epsilon");
    r.lambda = num("lambda");
    r.c = num("c");
    if (kv.count("kappa")) r.kappa = num("kappa");
    r.rho = num("rho");
    r.safety_lower_bound_raw = num("safety_lower_bound_raw");
    r.safety_lower_bound = num("safety_lower_bound");
    r.confidence = num("confidence");
    r.n_used = uint("n_used");
    r.n_required = uint("n_required");
    r.n_hat = uint("n_hat");
    r.seed = uint("seed");
    r.lipschitz = num("lipschitz");
    r.eps_bar = num("eps_bar");
    r.delta = num("delta");
    r.beta = num("beta");
    r.beta_s = num("beta_s");
    r.horizon = static_cast<int>(uint("horizon"));
    if (kv.count("norm_cap_used")) r.norm_cap_used = num("norm_cap_used");
    if (kv.count("controller_cap_used")) r.controller_cap_used = num("controller_cap_used");
    r.cap_rounds = static_cast<int>(uint("cap_rounds"));
    r.guarantees_void = boolean("guarantees_void");
    r.tightened = boolean("tightened");
    r.k_at_bound = boolean("k_at_bound");
    r.max_violation = num("max_violation");
    r.lp_rows = uint("lp_rows");
    r.lp_rounds = static_cast<int>(uint("lp_rounds"));
    r.lp_iterations = uint("lp_iterations");
    r.system_name = need("system");
    r.spec_fingerprint = need("spec");

    int bdim = static_cast<int>(uint("barrier_dim"));
    int bdeg = static_cast<int>(uint("barrier_degree"));
    MonomialBasis bb = parse_basis_field(bdim, bdeg, need("barrier_basis"));
    r.barrier = Polynomial(bb, parse_csv_doubles(need("barrier_coeffs")));
    std::uint64_t nc = uint("controller_count");
    for (std::uint64_t l = 0; l < nc; ++l) {
        std::string prefix = "controller_" + std::to_string(l);
        int cdim = static_cast<int>(uint(prefix + "_dim"));
        int cdeg = static_cast<int>(uint(prefix + "_degree"));
        MonomialBasis cb = parse_basis_field(cdim, cdeg, need(prefix + "_basis"));
        r.controller.emplace_back(cb, parse_csv_doubles(need(prefix + "_coeffs")));
    }
    std::uint64_t nk = uint("kappa_grid_size");
    for (std::uint64_t i = 0; i < nk; ++i) {
        auto vals = parse_csv_doubles(need("kappa_result_" + std::to_string(i)));
        if (vals.size() == 2) r.kappa_results.emplace_back(vals[0], vals[1]);
    }
    std::uint64_t np = uint("provenance_count");
    for (std::uint64_t i = 0; i < np; ++i) {
        const std::string& entry = need("provenance_" + std::to_string(i));
        auto pos = entry.find(": ");
        if (pos != std::string::npos)
            r.provenance.emplace_back(entry.substr(0, pos), entry.substr(pos + 2));
    }
    return r;
}

CertificateReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("report: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_report_text(text);
}

void write_plot_csvs(const CertificateReport& report, const JobConfig& cfg,
                     const std::string& dir) {
    const Region& X = cfg.spec.state;
    int n = X.dim();
    const Box& box = X.boxes.front();
    int d0 = 0, d1 = n > 1 ? 1 : 0;
    int steps = std::max(2, cfg.validation.grid_per_dim);

    auto slice_csv = [&](const Polynomial& poly, const std::string& path, const char* value_name) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("plots: cannot open " + path);
        out << "x_" << d0 + 1;
        if (n > 1) out << ",x_" << d1 + 1;
        out << "," << value_name << "\n";
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d) x[static_cast<std::size_t>(d)] = 0.5 * (box.lo[d] + box.hi[d]);
        for (int i = 0; i < steps; ++i) {
            x[static_cast<std::size_t>(d0)] =
                box.lo[d0] + (box.hi[d0] - box.lo[d0]) * i / (steps - 1);
            int inner = n > 1 ? steps : 1;
            for (int j = 0; j < inner; ++j) {
                if (n > 1)
                    x[static_cast<std::size_t>(d1)] =
                        box.lo[d1] + (box.hi[d1] - box.lo[d1]) * j / (steps - 1);
                out << fmt(x[static_cast<std::size_t>(d0)]);
                if (n > 1) out << "," << fmt(x[static_cast<std::size_t>(d1)]);
                out << "," << fmt(poly.eval(x)) << "\n";
            }
        }
    };

    slice_csv(report.barrier, dir + "/barrier_slice.csv", "B");
    for (std::size_t l = 0; l < report.controller.size(); ++l)
        slice_csv(report.controller[l], dir + "/controller_" + std::to_string(l) + "_slice.csv",
                  "u");
}

}  // namespace sbc
