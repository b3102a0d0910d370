#include "bethe/scalar_product.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <random>

#include "bethe/rat_core.hpp"

namespace bethe {

StateExpansion StateExpansion::single(ParamSet key, BoundaryMode mode) {
    StateExpansion s(mode);
    s.terms_.emplace_back(std::move(key), Scalar(1.0));
    return s;
}

void StateExpansion::add_term(const ParamSet& key, Scalar coefficient, double match_tol) {
    for (auto& [k, c] : terms_) {
        if (k.size() == key.size() && multiset_match(k, key, match_tol)) {
            c += coefficient;
            return;
        }
    }
    terms_.emplace_back(key, coefficient);
}

void StateExpansion::prune(double prune_tol) {
    double peak = 0.0;
    for (auto& [k, c] : terms_) peak = std::max(peak, std::abs(c));
    const double cut = prune_tol * peak;
    terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                [cut](const auto& t) { return std::abs(t.second) <= cut; }),
                 terms_.end());
}

Scalar StateExpansion::coefficient(const ParamSet& key, double match_tol) const {
    for (auto& [k, c] : terms_)
        if (k.size() == key.size() && multiset_match(k, key, match_tol)) return c;
    throw MissingTerm("no expansion term matches the requested parameter set (" +
                      std::to_string(key.size()) + " elements, tol " + std::to_string(match_tol) +
                      ")");
}

Scalar j_entry(Scalar u, std::size_t k, const ParamSet& x_set, const ModelSpec& model) {
    const Scalar c = model.c;
    const std::size_t n = x_set.size();
    const double sign = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^(n-1)
    return lambda_eval(model, 2, u) * kernel_t(u, x_set[k], c) *
               kernel_product(Kernel::h, u, x_set, c) +
           sign * lambda_eval(model, 1, u) * kernel_t(x_set[k], u, c) *
               kernel_product(Kernel::h, x_set, u, c);
}

Scalar j_entry_derivative_form(Scalar u, std::size_t k, const ParamSet& x_set,
                               const ModelSpec& model) {
    // d/dx_k of lambda_1(u) f(x,u) + lambda_2(u) f(u,x), one factor at a time
    const Scalar c = model.c;
    const Scalar xk = x_set[k];
    Scalar f_xu = 1.0, f_ux = 1.0;
    for (std::size_t l = 0; l < x_set.size(); ++l) {
        if (l == k) continue;
        f_xu *= kernel_f(x_set[l], u, c);
        f_ux *= kernel_f(u, x_set[l], c);
    }
    const Scalar d_xu = -c / ((xk - u) * (xk - u));
    const Scalar d_ux = c / ((u - xk) * (u - xk));
    const Scalar dtau =
        lambda_eval(model, 1, u) * f_xu * d_xu + lambda_eval(model, 2, u) * f_ux * d_ux;
    return c / kernel_product(Kernel::g, u, x_set, c) * dtau;
}

Eigen::MatrixXcd j_matrix(const ParamSet& u_set, const ParamSet& x_set, const ModelSpec& model) {
    const std::size_t n = x_set.size();
    Eigen::MatrixXcd m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) m(j, k) = j_entry(u_set[j], k, x_set, model);
    return m;
}

void require_on_shell(const ParamSet& x_set, const ModelSpec& model, double tol) {
    const double r = max_residual_norm(x_set, model);
    if (!(r < tol))
        throw OffShellError("parameter set is off shell: max cleared residual " +
                            std::to_string(r) + " >= " + std::to_string(tol));
}

namespace {

Scalar int_pow(Scalar base, std::size_t exp) {
    Scalar r = 1.0;
    for (std::size_t i = 0; i < exp; ++i) r *= base;
    return r;
}

void require_same_size(const ParamSet& x, const ParamSet& u) {
    if (x.size() != u.size())
        throw DimensionMismatch("scalar products need equally sized sets, got " +
                                std::to_string(x.size()) + " and " + std::to_string(u.size()));
}

void require_cross_distinct(const ParamSet& x, const ParamSet& u, const ModelSpec& model) {
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (std::abs(u[i] - x[k]) <= kCollisionTol)
                throw PoleError("u[" + std::to_string(i) + "] collides with x[" +
                                std::to_string(k) + "]");
            if (model.mode == BoundaryMode::reflection &&
                std::abs(u[i] + x[k]) <= kCollisionTol)
                throw PoleError("u[" + std::to_string(i) + "] collides with -x[" +
                                std::to_string(k) + "]");
        }
}

void check_inputs(const ParamSet& x, const ParamSet& u, const ModelSpec& model, bool unchecked) {
    require_same_size(x, u);
    require_cross_distinct(x, u, model);
    if (!unchecked) require_on_shell(x, model);
}

}  // namespace

Scalar slavnov_det(const ParamSet& x_onshell, const ParamSet& u_offshell, const ModelSpec& model,
                   bool unchecked) {
    check_inputs(x_onshell, u_offshell, model, unchecked);
    const std::size_t n = x_onshell.size();
    if (n == 0) return Scalar(1.0);
    const DeltaValues du = delta_products(u_offshell, model.c);
    const DeltaValues dx = delta_products(x_onshell, model.c);
    const Eigen::MatrixXcd m = j_matrix(u_offshell, x_onshell, model);
    return du.delta_prime * dx.delta * Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

namespace {

// Shared evaluator for the hybrid forms. m = 0 gives the fully chained
// residue sum; m = n the Leibniz expansion of the determinant. Each
// permuted term carries m J-entries with antisymmetric prefactors and a
// chain of residues of tau with progressively substituted argument sets.
Scalar hybrid_form(const ParamSet& x, const ParamSet& u, std::size_t m, const ModelSpec& model) {
    const Scalar c = model.c;
    const std::size_t n = x.size();
    if (n == 0) return Scalar(1.0);

    DeltaValues dx_head{1.0, 1.0};
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) dx_head.delta *= kernel_g(x[k], x[j], c);

    Scalar sum = 0.0;
    ParamSet up(n);
    for_each_permutation(n, [&](const std::vector<std::size_t>& idx) {
        for (std::size_t i = 0; i < n; ++i) up[i] = u[idx[i]];
        Scalar term = dx_head.delta;
        for (std::size_t i = 0; i < m; ++i) {
            term *= j_entry(up[i], i, x, model);
            for (std::size_t l = m; l < n; ++l) term *= kernel_g(up[i], x[l], c);
            for (std::size_t j2 = i + 1; j2 < m; ++j2) term *= kernel_g(up[i], up[j2], c);
        }
        ParamSet args(n);
        for (std::size_t l = m; l < n; ++l) {
            // argument set {u_1..u_l, x_{l+1}..x_n}, residue at position l
            args.clear();
            for (std::size_t i = 0; i <= l; ++i) args.push_back(up[i]);
            for (std::size_t i = l + 1; i < n; ++i) args.push_back(x[i]);
            term *= kernel_g(up[l], x[l], c) * tau_residue(l, args, model);
        }
        sum += term;
    });
    return sum / int_pow(c, n - m);
}

}  // namespace

Scalar hny_form(const ParamSet& x_onshell, const ParamSet& u_offshell, int m,
                const ModelSpec& model, bool unchecked) {
    check_inputs(x_onshell, u_offshell, model, unchecked);
    const int n = static_cast<int>(x_onshell.size());
    if (m < 1 || m > std::max(n, 1))
        throw Error("hny order m must satisfy 1 <= m <= n");
    if (n == 0) return Scalar(1.0);
    return hybrid_form(x_onshell, u_offshell, static_cast<std::size_t>(m), model);
}

Scalar scalar_sum_form(const ParamSet& x_onshell, const ParamSet& u_offshell,
                       const ModelSpec& model, bool unchecked) {
    check_inputs(x_onshell, u_offshell, model, unchecked);
    if (x_onshell.empty()) return Scalar(1.0);
    return hybrid_form(x_onshell, u_offshell, 0, model);
}

std::pair<Scalar, Scalar> sum_jm_check(int m, int j, const ParamSet& u_set, const ParamSet& x_set,
                                       const ModelSpec& model) {
    const Scalar c = model.c;
    const std::size_t n = x_set.size();
    if (m < 1 || static_cast<std::size_t>(m) > n || j < 0 || j >= m)
        throw Error("sum_jm_check needs 0 <= j < m <= n");

    Scalar lhs = 0.0;
    for (int k = 0; k < m; ++k) {
        Scalar nu = 1.0;
        for (int l = 0; l < m; ++l)
            if (l != k) nu *= kernel_g(x_set[k], x_set[l], c);
        for (int l = 0; l < m; ++l) nu /= kernel_g(x_set[k], u_set[l], c);
        lhs += j_entry(u_set[j], static_cast<std::size_t>(k), x_set, model) * nu;
    }

    ParamSet args;
    for (int i = 0; i < m; ++i) args.push_back(u_set[i]);
    for (std::size_t i = m; i < n; ++i) args.push_back(x_set[i]);
    Scalar den = c;
    for (int i = 0; i < m; ++i)
        if (i != j) den *= kernel_g(u_set[j], u_set[i], c);
    for (std::size_t l = m; l < n; ++l) den *= kernel_g(u_set[j], x_set[l], c);
    const Scalar rhs = -tau_residue(static_cast<std::size_t>(j), args, model) / den;
    return {lhs, rhs};
}

StateExpansion apply_transfer(Scalar z, const StateExpansion& state, const ModelSpec& model,
                              double match_tol) {
    const Scalar c = model.c;
    StateExpansion out(state.mode());
    for (auto& [key, coef] : state.terms()) {
        for (auto& uk : key) {
            if (std::abs(z - uk) <= kCollisionTol)
                throw PoleError("transfer argument collides with a term parameter");
            if (state.mode() == BoundaryMode::reflection &&
                std::abs(z + uk) <= kCollisionTol)
                throw PoleError("transfer argument collides with a negated term parameter");
        }
        out.add_term(key, coef * tau(z, key, model), match_tol);
        for (std::size_t j = 0; j < key.size(); ++j) {
            Scalar factor;
            if (state.mode() == BoundaryMode::periodic) {
                factor = -(1.0 / c) * kernel_g(z, key[j], c) * tau_residue(j, key, model);
            } else {
                const Scalar uj = key[j];
                factor = -(1.0 / c) * (2.0 * uj / (c + 2.0 * uj)) * ((c + 2.0 * z) / c) *
                         kernel_g(z, uj, c) * kernel_g(z, -uj, c) * tau_residue(j, key, model);
            }
            ParamSet sub = erase_at(key, j);
            sub.insert(sub.begin(), z);
            out.add_term(sub, coef * factor, match_tol);
        }
    }
    out.prune();
    return out;
}

Scalar extract_coefficient(const ParamSet& v_onshell, const ParamSet& u_offshell,
                           const ModelSpec& model, bool unchecked) {
    require_same_size(v_onshell, u_offshell);
    require_cross_distinct(v_onshell, u_offshell, model);
    if (!unchecked) require_on_shell(v_onshell, model);
    if (v_onshell.empty()) return Scalar(1.0);

    StateExpansion state = StateExpansion::single(u_offshell, model.mode);
    for (auto& v : v_onshell) state = apply_transfer(v, state, model);
    return state.coefficient(v_onshell);
}

Scalar gaudin_norm(const ParamSet& v_onshell, const ModelSpec& model,
                   std::uint64_t direction_seed) {
    require_on_shell(v_onshell, model);
    const std::size_t n = v_onshell.size();
    if (n == 0) return Scalar(1.0);

    const double eps[3] = {1e-4, 5e-5, 2.5e-5};
    std::mt19937_64 rng(direction_seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

    Scalar results[2];
    for (int draw = 0; draw < 2; ++draw) {
        ParamSet dir(n);
        for (auto& d : dir) {
            const double a = angle(rng);
            d = Scalar(std::cos(a), std::sin(a));
        }
        Scalar s[3];
        for (int e = 0; e < 3; ++e) {
            ParamSet u(n);
            for (std::size_t i = 0; i < n; ++i) u[i] = v_onshell[i] + eps[e] * dir[i];
            s[e] = slavnov_det(v_onshell, u, model);
        }
        // second-order Richardson on the eps, eps/2, eps/4 ladder
        const Scalar r1 = 2.0 * s[1] - s[0];
        const Scalar r2 = 2.0 * s[2] - s[1];
        results[draw] = (4.0 * r2 - r1) / 3.0;
    }
    const double spread =
        std::abs(results[0] - results[1]) / std::max(std::abs(results[0]), 1e-300);
    if (spread > 1e-5)
        throw UnstableLimit("norm limit spread " + std::to_string(spread) +
                            " across extrapolation directions");
    return results[0];
}

Scalar reflection_det(const ParamSet& x_onshell, const ParamSet& u_offshell,
                      const ModelSpec& model, bool unchecked) {
    if (model.mode != BoundaryMode::reflection)
        throw ValidationError("reflection_det requires a reflection-mode model");
    check_inputs(x_onshell, u_offshell, model, unchecked);
    const Scalar c = model.c;
    const std::size_t n = x_onshell.size();
    if (n == 0) return Scalar(1.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(2.0 * u_offshell[j] + c) <= kCollisionTol)
            throw PoleError("u[" + std::to_string(j) + "] sits at -c/2");
        if (std::abs(x_onshell[j]) <= kCollisionTol)
            throw PoleError("x[" + std::to_string(j) + "] sits at 0");
    }

    Eigen::MatrixXcd m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const Scalar uj = u_offshell[j];
        const Scalar gp = kernel_product(Kernel::g, uj, x_onshell, c) *
                          kernel_product(Kernel::g, uj, negated(x_onshell), c);
        for (std::size_t k = 0; k < n; ++k) {
            const Scalar xk = x_onshell[k];
            m(j, k) = (2.0 * xk + c) / (2.0 * xk) * c / (2.0 * uj + c) * c / gp *
                      tau_derivative_x(uj, k, x_onshell, model);
        }
    }
    // squared-variable antisymmetric prefactors carry one factor c^2 per pair
    const DeltaValues du = delta_products(squared(u_offshell), model.c);
    const DeltaValues dx = delta_products(squared(x_onshell), model.c);
    return du.delta_prime * dx.delta * int_pow(c, n * (n - 1)) *
           Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

Scalar kappa_closed_form(const ParamSet& x_onshell, const ModelSpec& model) {
    Scalar k = 1.0;
    for (auto& x : x_onshell) k *= lambda_eval(model, 2, x);
    return k;
}

}  // namespace bethe
