#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bethe/errors.hpp"
#include "bethe/types.hpp"

// Rational kernels and set-product notation shared by every formula in this
// library:
//   g(u,v) = c/(u-v)
//   f(u,v) = (u-v+c)/(u-v)
//   h(u,v) = (u-v+c)/c
//   t(u,v) = g/h = c^2 / ((u-v)(u-v+c))
// Products over sets are plain products over elements; the empty product is 1.

namespace bethe {

enum class Kernel { g, f, h, t };

Scalar kernel_g(Scalar u, Scalar v, Scalar c, double tol = kCollisionTol);
Scalar kernel_f(Scalar u, Scalar v, Scalar c, double tol = kCollisionTol);
Scalar kernel_h(Scalar u, Scalar v, Scalar c, double tol = kCollisionTol);
Scalar kernel_t(Scalar u, Scalar v, Scalar c, double tol = kCollisionTol);

struct KernelValues {
    Scalar g, f, h, t;
};

// All four kernels at once; throws PoleError if any denominator collides.
KernelValues kernels(Scalar u, Scalar v, Scalar c, double tol = kCollisionTol);

Scalar kernel_eval(Kernel k, Scalar u, Scalar v, Scalar c, double tol = kCollisionTol);

// prod_i K(z, u_i)
Scalar kernel_product(Kernel k, Scalar z, const ParamSet& set, Scalar c,
                      double tol = kCollisionTol);
// prod_i K(u_i, z)
Scalar kernel_product(Kernel k, const ParamSet& set, Scalar z, Scalar c,
                      double tol = kCollisionTol);
// prod_i prod_j K(a_i, b_j)
Scalar kernel_product(Kernel k, const ParamSet& a, const ParamSet& b, Scalar c,
                      double tol = kCollisionTol);

struct DeltaValues {
    Scalar delta_prime;  // prod_{j<k} g(u_j, u_k)
    Scalar delta;        // prod_{j>k} g(u_j, u_k)
};

DeltaValues delta_products(const ParamSet& set, Scalar c, double tol = kCollisionTol);

// All C(n, size_one) two-block partitions, elements kept in index order.
std::vector<Partition> enumerate_partitions(const ParamSet& set, std::size_t size_one);

// Visits all n! orderings of {0..n-1} in lexicographic rank order.
// Throws Error for n > kMaxSymSize.
void for_each_permutation(std::size_t n,
                          const std::function<void(const std::vector<std::size_t>&)>& visit);

// Sum of fn over all n! orderings of `set` (no 1/n! normalization).
Scalar symmetrize(const std::function<Scalar(const ParamSet&)>& fn, const ParamSet& set);

// Bijection matching a[i] ~ b[perm[i]] within tol, if one exists.
// Throws AmbiguousMatch when more than one valid matching exists.
std::optional<std::vector<std::size_t>> multiset_match(const ParamSet& a, const ParamSet& b,
                                                       double tol);

}  // namespace bethe
