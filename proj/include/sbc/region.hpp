#pragma once

#include <span>
#include <string>
#include <vector>

#include "sbc/rng.hpp"

namespace sbc {

struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(std::span<const double> x) const;
    double volume() const;
    void validate() const;  // lo <= hi per dimension
};

// Union of axis-aligned boxes; membership realizes the indicator.
struct Region {
    std::vector<Box> boxes;

    int dim() const { return boxes.empty() ? 0 : boxes.front().dim(); }
    bool contains(std::span<const double> x) const;
    double volume() const;
    void validate() const;

    // Uniform over the union: box picked with probability proportional to
    // volume (uniformly when all volumes vanish), then uniform within.
    // Zero-width dimensions give degenerate draws at the fixed coordinate.
    std::vector<double> sample(RngStream& rng) const;
    void sample_into(RngStream& rng, std::span<double> out) const;
};

struct SafetySpec {
    Region state;    // X
    Region initial;  // X_in
    Region unsafe;   // X_u
    int horizon = 0;

    // Checks dimensions, box validity, X_in/X_u inside X (box-wise) and
    // X_in, X_u with disjoint interiors. Throws std::invalid_argument.
    void validate() const;

    // Stable textual identity used for dataset/report fingerprints.
    std::string fingerprint() const;
};

}  // namespace sbc
