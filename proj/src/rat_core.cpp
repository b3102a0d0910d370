#include "bethe/rat_core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace bethe {

namespace {

std::string fmt(Scalar z) {
    std::ostringstream os;
    os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
    return os.str();
}

void require_denominator(Scalar d, const char* kernel, Scalar u, Scalar v, double tol) {
    if (std::abs(d) <= tol) {
        throw PoleError(std::string("kernel ") + kernel + ": denominator " + fmt(d) +
                        " collides for arguments " + fmt(u) + ", " + fmt(v));
    }
}

}  // namespace

Scalar kernel_g(Scalar u, Scalar v, Scalar c, double tol) {
    require_denominator(u - v, "g", u, v, tol);
    return c / (u - v);
}

Scalar kernel_f(Scalar u, Scalar v, Scalar c, double tol) {
    require_denominator(u - v, "f", u, v, tol);
    return (u - v + c) / (u - v);
}

Scalar kernel_h(Scalar u, Scalar v, Scalar c, double tol) {
    require_denominator(c, "h", u, v, tol);
    return (u - v + c) / c;
}

Scalar kernel_t(Scalar u, Scalar v, Scalar c, double tol) {
    require_denominator(u - v, "t", u, v, tol);
    require_denominator(u - v + c, "t", u, v, tol);
    return c * c / ((u - v) * (u - v + c));
}

KernelValues kernels(Scalar u, Scalar v, Scalar c, double tol) {
    require_denominator(u - v, "g/f/t", u, v, tol);
    require_denominator(u - v + c, "t", u, v, tol);
    KernelValues k;
    k.g = c / (u - v);
    k.f = (u - v + c) / (u - v);
    k.h = (u - v + c) / c;
    k.t = k.g / k.h;
    return k;
}

Scalar kernel_eval(Kernel k, Scalar u, Scalar v, Scalar c, double tol) {
    switch (k) {
        case Kernel::g: return kernel_g(u, v, c, tol);
        case Kernel::f: return kernel_f(u, v, c, tol);
        case Kernel::h: return kernel_h(u, v, c, tol);
        case Kernel::t: return kernel_t(u, v, c, tol);
    }
    throw Error("unknown kernel id");
}

Scalar kernel_product(Kernel k, Scalar z, const ParamSet& set, Scalar c, double tol) {
    Scalar r = 1.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        try {
            r *= kernel_eval(k, z, set[i], c, tol);
        } catch (const PoleError& e) {
            throw PoleError(std::string(e.what()) + " [set element " + std::to_string(i) + "]");
        }
    }
    return r;
}

Scalar kernel_product(Kernel k, const ParamSet& set, Scalar z, Scalar c, double tol) {
    Scalar r = 1.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        try {
            r *= kernel_eval(k, set[i], z, c, tol);
        } catch (const PoleError& e) {
            throw PoleError(std::string(e.what()) + " [set element " + std::to_string(i) + "]");
        }
    }
    return r;
}

Scalar kernel_product(Kernel k, const ParamSet& a, const ParamSet& b, Scalar c, double tol) {
    Scalar r = 1.0;
    for (auto& u : a) r *= kernel_product(k, u, b, c, tol);
    return r;
}

DeltaValues delta_products(const ParamSet& set, Scalar c, double tol) {
    DeltaValues d{1.0, 1.0};
    for (std::size_t j = 0; j < set.size(); ++j) {
        for (std::size_t k = j + 1; k < set.size(); ++k) {
            d.delta_prime *= kernel_g(set[j], set[k], c, tol);
            d.delta *= kernel_g(set[k], set[j], c, tol);
        }
    }
    return d;
}

std::vector<Partition> enumerate_partitions(const ParamSet& set, std::size_t size_one) {
    const std::size_t n = set.size();
    if (size_one > n) throw Error("enumerate_partitions: size_one exceeds set size");
    std::vector<Partition> out;
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size_one), true);
    // std::prev_permutation on the mask walks subsets in lexicographic index order
    do {
        Partition p;
        for (std::size_t i = 0; i < n; ++i)
            (pick[i] ? p.part_one : p.part_two).push_back(set[i]);
        out.push_back(std::move(p));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return out;
}

void for_each_permutation(std::size_t n,
                          const std::function<void(const std::vector<std::size_t>&)>& visit) {
    if (n > static_cast<std::size_t>(kMaxSymSize))
        throw Error("symmetrized sums are limited to sets of size " +
                    std::to_string(kMaxSymSize) + " (got " + std::to_string(n) + ")");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    do {
        visit(idx);
    } while (std::next_permutation(idx.begin(), idx.end()));
}

Scalar symmetrize(const std::function<Scalar(const ParamSet&)>& fn, const ParamSet& set) {
    Scalar sum = 0.0;
    ParamSet perm(set.size());
    for_each_permutation(set.size(), [&](const std::vector<std::size_t>& idx) {
        for (std::size_t i = 0; i < idx.size(); ++i) perm[i] = set[idx[i]];
        sum += fn(perm);
    });
    return sum;
}

namespace {

// Counts perfect matchings by backtracking, stopping at two. Records the first.
void count_matchings(const ParamSet& a, const ParamSet& b, double tol, std::size_t i,
                     std::vector<bool>& used, std::vector<std::size_t>& cur,
                     std::vector<std::size_t>& first, int& found) {
    if (found >= 2) return;
    if (i == a.size()) {
        if (found == 0) first = cur;
        ++found;
        return;
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (used[j] || std::abs(a[i] - b[j]) > tol) continue;
        used[j] = true;
        cur[i] = j;
        count_matchings(a, b, tol, i + 1, used, cur, first, found);
        used[j] = false;
        if (found >= 2) return;
    }
}

}  // namespace

std::optional<std::vector<std::size_t>> multiset_match(const ParamSet& a, const ParamSet& b,
                                                       double tol) {
    if (a.size() != b.size()) return std::nullopt;
    std::vector<bool> used(b.size(), false);
    std::vector<std::size_t> cur(a.size()), first;
    int found = 0;
    count_matchings(a, b, tol, 0, used, cur, first, found);
    if (found == 0) return std::nullopt;
    if (found > 1)
        throw AmbiguousMatch("multiset_match: more than one matching within tolerance " +
                             std::to_string(tol));
    return first;
}

}  // namespace bethe
