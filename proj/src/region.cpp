#include "sbc/region.hpp"

#include <cstdio>
#include <stdexcept>

namespace sbc {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Interiors intersect iff the overlap has positive width in every
// dimension; boxes that merely touch on a face count as disjoint.
bool interiors_intersect(const Box& a, const Box& b) {
    for (int d = 0; d < a.dim(); ++d) {
        double lo = std::max(a.lo[d], b.lo[d]);
        double hi = std::min(a.hi[d], b.hi[d]);
        if (lo >= hi) return false;
    }
    return true;
}

bool box_inside(const Box& inner, const Box& outer) {
    for (int d = 0; d < inner.dim(); ++d)
        if (inner.lo[d] < outer.lo[d] || inner.hi[d] > outer.hi[d]) return false;
    return true;
}

}  // namespace

bool Box::contains(std::span<const double> x) const {
    for (int d = 0; d < dim(); ++d)
        if (x[d] < lo[d] || x[d] > hi[d]) return false;
    return true;
}

double Box::volume() const {
    double v = 1.0;
    for (int d = 0; d < dim(); ++d) v *= hi[d] - lo[d];
    return v;
}

void Box::validate() const {
    if (lo.size() != hi.size() || lo.empty())
        throw std::invalid_argument("box: lo/hi dimension mismatch or empty box");
    for (int d = 0; d < dim(); ++d)
        if (!(lo[d] <= hi[d]))
            throw std::invalid_argument("box: lo > hi in dimension " + std::to_string(d + 1) +
                                        " (" + fmt(lo[d]) + " > " + fmt(hi[d]) + ")");
}

bool Region::contains(std::span<const double> x) const {
    for (const Box& b : boxes)
        if (b.contains(x)) return true;
    return false;
}

double Region::volume() const {
    double v = 0.0;
    for (const Box& b : boxes) v += b.volume();
    return v;
}

void Region::validate() const {
    if (boxes.empty()) throw std::invalid_argument("region: must contain at least one box");
    for (const Box& b : boxes) {
        b.validate();
        if (b.dim() != dim()) throw std::invalid_argument("region: boxes disagree on dimension");
    }
}

void Region::sample_into(RngStream& rng, std::span<double> out) const {
    // Box selector is always drawn, even for a single box, so the stream
    // layout does not depend on how a region happens to be partitioned.
    double u = rng.uniform01();
    std::size_t pick = 0;
    double total = volume();
    if (total > 0.0) {
        double acc = 0.0;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            acc += boxes[i].volume() / total;
            if (u < acc) {
                pick = i;
                break;
            }
            pick = i;
        }
    } else {
        pick = std::min(static_cast<std::size_t>(u * static_cast<double>(boxes.size())),
                        boxes.size() - 1);
    }
    const Box& b = boxes[pick];
    for (int d = 0; d < b.dim(); ++d) out[d] = rng.uniform(b.lo[d], b.hi[d]);
}

std::vector<double> Region::sample(RngStream& rng) const {
    std::vector<double> x(static_cast<std::size_t>(dim()));
    sample_into(rng, x);
    return x;
}

void SafetySpec::validate() const {
    state.validate();
    initial.validate();
    unsafe.validate();
    if (horizon < 0) throw std::invalid_argument("spec.horizon: must be >= 0");
    int n = state.dim();
    if (initial.dim() != n || unsafe.dim() != n)
        throw std::invalid_argument("spec: state/initial/unsafe dimensions disagree");

    auto check_inside = [&](const Region& sub, const char* name) {
        for (const Box& b : sub.boxes) {
            bool inside = false;
            for (const Box& outer : state.boxes)
                if (box_inside(b, outer)) {
                    inside = true;
                    break;
                }
            if (!inside)
                throw std::invalid_argument(std::string("spec: a box of ") + name +
                                            " is not contained in any box of the state set");
        }
    };
    check_inside(initial, "initial");
    check_inside(unsafe, "unsafe");

    for (const Box& a : initial.boxes)
        for (const Box& b : unsafe.boxes)
            if (interiors_intersect(a, b))
                throw std::invalid_argument("spec: initial and unsafe regions overlap");
}

std::string SafetySpec::fingerprint() const {
    std::string s = "H=" + std::to_string(horizon);
    auto add = [&s](const char* name, const Region& r) {
        s += std::string(";") + name + "=";
        for (const Box& b : r.boxes) {
            s += "[";
            for (int d = 0; d < b.dim(); ++d)
                s += fmt(b.lo[d]) + ":" + fmt(b.hi[d]) + (d + 1 < b.dim() ? "," : "");
            s += "]";
        }
    };
    add("X", state);
    add("Xin", initial);
    add("Xu", unsafe);
    return s;
}

}  // namespace sbc
