#pragma once

#include <complex>
#include <vector>

namespace bethe {

using Scalar = std::complex<double>;
using ParamSet = std::vector<Scalar>;

// Absolute tolerance on differences of spectral parameters. Kernel
// denominators below this are treated as poles.
inline constexpr double kCollisionTol = 1e-10;

// Symmetrized sums enumerate all n! orderings; refuse beyond this.
inline constexpr int kMaxSymSize = 6;

// Hard cap on oracle chain length (dense 2^N matrices).
inline constexpr int kMaxSites = 12;

struct Partition {
    ParamSet part_one;
    ParamSet part_two;
};

inline ParamSet erase_at(const ParamSet& s, std::size_t j) {
    ParamSet r;
    r.reserve(s.size() - 1);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (i != j) r.push_back(s[i]);
    return r;
}

inline ParamSet negated(const ParamSet& s) {
    ParamSet r;
    r.reserve(s.size());
    for (auto& u : s) r.push_back(-u);
    return r;
}

inline ParamSet squared(const ParamSet& s) {
    ParamSet r;
    r.reserve(s.size());
    for (auto& u : s) r.push_back(u * u);
    return r;
}

}  // namespace bethe
