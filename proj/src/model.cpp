#include "bethe/model.hpp"

#include <algorithm>
#include <cmath>

#include "bethe/rat_core.hpp"

namespace bethe {

Scalar Polynomial::eval(Scalar u) const {
    Scalar r = 0.0;
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) r = r * u + *it;
    return r;
}

Polynomial Polynomial::derivative() const {
    Polynomial d;
    if (coeff.size() <= 1) {
        d.coeff = {Scalar(0.0)};
        return d;
    }
    d.coeff.resize(coeff.size() - 1);
    for (std::size_t k = 1; k < coeff.size(); ++k)
        d.coeff[k - 1] = static_cast<double>(k) * coeff[k];
    return d;
}

Scalar RationalFn::eval(Scalar u, double tol) const {
    const Scalar d = den.eval(u);
    if (std::abs(d) <= tol) throw PoleError("rational function denominator vanishes");
    return num.eval(u) / d;
}

Scalar RationalFn::derivative(Scalar u, double tol) const {
    const Scalar d = den.eval(u);
    if (std::abs(d) <= tol) throw PoleError("rational function denominator vanishes");
    return (num.derivative().eval(u) * d - num.eval(u) * den.derivative().eval(u)) / (d * d);
}

ModelSpec ModelSpec::xxx_periodic(Scalar c, ParamSet theta) {
    ModelSpec m;
    m.c = c;
    m.mode = BoundaryMode::periodic;
    m.realization = Realization::xxx_inhomogeneous;
    m.theta = std::move(theta);
    m.validate();
    return m;
}

ModelSpec ModelSpec::xxx_reflection(Scalar c, ParamSet theta, Scalar xi_minus, Scalar xi_plus) {
    ModelSpec m;
    m.c = c;
    m.mode = BoundaryMode::reflection;
    m.realization = Realization::xxx_inhomogeneous;
    m.theta = std::move(theta);
    m.xi_minus = xi_minus;
    m.xi_plus = xi_plus;
    m.validate();
    return m;
}

ModelSpec ModelSpec::custom_periodic(Scalar c, RationalFn lambda1, RationalFn lambda2) {
    ModelSpec m;
    m.c = c;
    m.mode = BoundaryMode::periodic;
    m.realization = Realization::custom;
    m.lambda1 = std::move(lambda1);
    m.lambda2 = std::move(lambda2);
    m.validate();
    return m;
}

void ModelSpec::validate() const {
    if (c == Scalar(0.0)) throw ValidationError("coupling c must be non-zero");
    if (realization == Realization::custom) {
        if (lambda1.num.coeff.empty() || lambda1.den.coeff.empty() || lambda2.num.coeff.empty() ||
            lambda2.den.coeff.empty())
            throw ValidationError("custom realization requires non-empty coefficient lists");
    }
}

Scalar lambda_eval(const ModelSpec& model, int which, Scalar u) {
    if (model.realization == Realization::xxx_inhomogeneous) {
        const Scalar shift = (which == 1) ? model.c : Scalar(0.0);
        Scalar r = 1.0;
        for (auto& th : model.theta) r *= (u - th + shift);
        return r;
    }
    return (which == 1 ? model.lambda1 : model.lambda2).eval(u);
}

Scalar lambda_derivative(const ModelSpec& model, int which, Scalar u) {
    if (model.realization == Realization::xxx_inhomogeneous) {
        // sum over k of prod_{l != k}; exact even at zeros of lambda
        const Scalar shift = (which == 1) ? model.c : Scalar(0.0);
        Scalar sum = 0.0;
        for (std::size_t k = 0; k < model.theta.size(); ++k) {
            Scalar p = 1.0;
            for (std::size_t l = 0; l < model.theta.size(); ++l)
                if (l != k) p *= (u - model.theta[l] + shift);
            sum += p;
        }
        return sum;
    }
    return (which == 1 ? model.lambda1 : model.lambda2).derivative(u);
}

Scalar tau_periodic(Scalar z, const ParamSet& u_set, const ModelSpec& model) {
    const Scalar c = model.c;
    return lambda_eval(model, 1, z) * kernel_product(Kernel::f, u_set, z, c) +
           lambda_eval(model, 2, z) * kernel_product(Kernel::f, z, u_set, c);
}

namespace {

// The two z-dependent weights of the reflection eigenvalue.
Scalar weight_plus(Scalar z, const ModelSpec& m) {
    if (std::abs(z) <= kCollisionTol) throw PoleError("reflection eigenvalue has a pole at z = 0");
    const Scalar c = m.c;
    return (2.0 * z + c) / (2.0 * z) * (z + m.xi_plus - c / 2.0) * (z + m.xi_minus - c / 2.0) *
           lambda_eval(m, 1, z) * lambda_eval(m, 2, -z);
}

Scalar weight_minus(Scalar z, const ModelSpec& m) {
    if (std::abs(z) <= kCollisionTol) throw PoleError("reflection eigenvalue has a pole at z = 0");
    const Scalar c = m.c;
    return (2.0 * z - c) / (2.0 * z) * (z - m.xi_plus + c / 2.0) * (z - m.xi_minus + c / 2.0) *
           lambda_eval(m, 1, -z) * lambda_eval(m, 2, z);
}

}  // namespace

Scalar tau_reflection(Scalar z, const ParamSet& u_set, const ModelSpec& model) {
    const Scalar c = model.c;
    const ParamSet neg = negated(u_set);
    return weight_plus(z, model) * kernel_product(Kernel::f, u_set, z, c) *
               kernel_product(Kernel::f, neg, z, c) +
           weight_minus(z, model) * kernel_product(Kernel::f, z, u_set, c) *
               kernel_product(Kernel::f, z, neg, c);
}

Scalar tau(Scalar z, const ParamSet& u_set, const ModelSpec& model) {
    return model.mode == BoundaryMode::periodic ? tau_periodic(z, u_set, model)
                                                : tau_reflection(z, u_set, model);
}

Scalar tau_residue(std::size_t j, const ParamSet& u_set, const ModelSpec& model) {
    const Scalar c = model.c;
    const Scalar uj = u_set[j];
    const ParamSet rest = erase_at(u_set, j);
    if (model.mode == BoundaryMode::periodic) {
        return -c * (lambda_eval(model, 1, uj) * kernel_product(Kernel::f, rest, uj, c) -
                     lambda_eval(model, 2, uj) * kernel_product(Kernel::f, uj, rest, c));
    }
    const ParamSet neg = negated(u_set);
    return -c * weight_plus(uj, model) * kernel_product(Kernel::f, rest, uj, c) *
               kernel_product(Kernel::f, neg, uj, c) +
           c * weight_minus(uj, model) * kernel_product(Kernel::f, uj, rest, c) *
               kernel_product(Kernel::f, uj, neg, c);
}

Scalar tau_residue_numeric(std::size_t j, const ParamSet& u_set, const ModelSpec& model,
                           double eps) {
    const Scalar uj = u_set[j];
    auto probe = [&](double e) {
        Scalar w = uj + Scalar(e);
        return Scalar(e) * tau(w, u_set, model);
    };
    // two-point Richardson kills the O(eps) term
    const Scalar r1 = probe(eps);
    const Scalar r2 = probe(eps / 2.0);
    return 2.0 * r2 - r1;
}

Scalar tau_derivative_x(Scalar z, std::size_t k, const ParamSet& x_set, const ModelSpec& model) {
    const Scalar c = model.c;
    const Scalar xk = x_set[k];
    if (model.mode == BoundaryMode::periodic) {
        // d/dx_k [lambda_1(z) f(x,z) + lambda_2(z) f(z,x)]
        return (lambda_eval(model, 2, z) * kernel_product(Kernel::f, z, x_set, c) *
                    kernel_t(z, xk, c) -
                lambda_eval(model, 1, z) * kernel_product(Kernel::f, x_set, z, c) *
                    kernel_t(xk, z, c)) /
               c;
    }
    const ParamSet neg = negated(x_set);
    const Scalar fa = kernel_product(Kernel::f, x_set, z, c) * kernel_product(Kernel::f, neg, z, c);
    const Scalar fb = kernel_product(Kernel::f, z, x_set, c) * kernel_product(Kernel::f, z, neg, c);
    const Scalar da = (-kernel_t(xk, z, c) + kernel_t(-xk, z, c)) / c;
    const Scalar db = (kernel_t(z, xk, c) - kernel_t(z, -xk, c)) / c;
    return weight_plus(z, model) * fa * da + weight_minus(z, model) * fb * db;
}

namespace {

void require_distinct(const ParamSet& u, BoundaryMode mode, Scalar c) {
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = i + 1; j < u.size(); ++j)
            if (std::abs(u[i] - u[j]) <= kCollisionTol)
                throw PoleError("parameters " + std::to_string(i) + " and " + std::to_string(j) +
                                " coincide");
    if (mode == BoundaryMode::reflection) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (std::abs(u[i]) <= kCollisionTol || std::abs(u[i] - c / 2.0) <= kCollisionTol ||
                std::abs(u[i] + c / 2.0) <= kCollisionTol)
                throw PoleError("reflection parameter " + std::to_string(i) +
                                " sits at 0 or +-c/2");
            for (std::size_t j = i + 1; j < u.size(); ++j)
                if (std::abs(u[i] + u[j]) <= kCollisionTol)
                    throw PoleError("reflection parameters " + std::to_string(i) + " and " +
                                    std::to_string(j) + " are opposite");
        }
    }
}

}  // namespace

std::vector<Scalar> bethe_residual(const ParamSet& u_set, const ModelSpec& model) {
    require_distinct(u_set, model.mode, model.c);
    return bethe_residual_raw(u_set, model);
}

std::vector<Scalar> bethe_residual_raw(const ParamSet& u_set, const ModelSpec& model) {
    const Scalar c = model.c;
    const std::size_t n = u_set.size();
    std::vector<Scalar> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Scalar ui = u_set[i];
        if (model.mode == BoundaryMode::periodic) {
            Scalar pm = 1.0, pp = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                pm *= (ui - u_set[j] - c);
                pp *= (ui - u_set[j] + c);
            }
            r[i] = lambda_eval(model, 1, ui) * pm - lambda_eval(model, 2, ui) * pp;
        } else {
            // residue of the reflection eigenvalue at u_i times the polynomial
            // clearing factor; no spurious poles remain
            const Scalar pp = (ui + model.xi_plus - c / 2.0) * (ui + model.xi_minus - c / 2.0);
            const Scalar pm = (ui - model.xi_plus + c / 2.0) * (ui - model.xi_minus + c / 2.0);
            Scalar q1 = 1.0, q2 = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                q1 *= (ui - c) * (ui - c) - u_set[j] * u_set[j];
                q2 *= (ui + c) * (ui + c) - u_set[j] * u_set[j];
            }
            r[i] = pp * lambda_eval(model, 1, ui) * lambda_eval(model, 2, -ui) * q1 -
                   pm * lambda_eval(model, 1, -ui) * lambda_eval(model, 2, ui) * q2;
        }
    }
    return r;
}

Eigen::MatrixXcd bethe_jacobian(const ParamSet& u_set, const ModelSpec& model) {
    const Scalar c = model.c;
    const std::size_t n = u_set.size();
    Eigen::MatrixXcd J(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Scalar ui = u_set[i];
        if (model.mode == BoundaryMode::periodic) {
            Scalar pm = 1.0, pp = 1.0, spm = 0.0, spp = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                pm *= (ui - u_set[j] - c);
                pp *= (ui - u_set[j] + c);
            }
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i) continue;
                Scalar qm = 1.0, qp = 1.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i || j == k) continue;
                    qm *= (ui - u_set[j] - c);
                    qp *= (ui - u_set[j] + c);
                }
                spm += qm;
                spp += qp;
                J(i, k) = -lambda_eval(model, 1, ui) * qm + lambda_eval(model, 2, ui) * qp;
            }
            J(i, i) = lambda_derivative(model, 1, ui) * pm + lambda_eval(model, 1, ui) * spm -
                      lambda_derivative(model, 2, ui) * pp - lambda_eval(model, 2, ui) * spp;
        } else {
            const Scalar pp = (ui + model.xi_plus - c / 2.0) * (ui + model.xi_minus - c / 2.0);
            const Scalar pm = (ui - model.xi_plus + c / 2.0) * (ui - model.xi_minus + c / 2.0);
            const Scalar dpp = (ui + model.xi_plus - c / 2.0) + (ui + model.xi_minus - c / 2.0);
            const Scalar dpm = (ui - model.xi_plus + c / 2.0) + (ui - model.xi_minus + c / 2.0);
            const Scalar a1 = lambda_eval(model, 1, ui) * lambda_eval(model, 2, -ui);
            const Scalar a2 = lambda_eval(model, 1, -ui) * lambda_eval(model, 2, ui);
            const Scalar da1 = lambda_derivative(model, 1, ui) * lambda_eval(model, 2, -ui) -
                               lambda_eval(model, 1, ui) * lambda_derivative(model, 2, -ui);
            const Scalar da2 = -lambda_derivative(model, 1, -ui) * lambda_eval(model, 2, ui) +
                               lambda_eval(model, 1, -ui) * lambda_derivative(model, 2, ui);
            Scalar q1 = 1.0, q2 = 1.0, sq1 = 0.0, sq2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                q1 *= (ui - c) * (ui - c) - u_set[j] * u_set[j];
                q2 *= (ui + c) * (ui + c) - u_set[j] * u_set[j];
            }
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i) continue;
                Scalar r1 = 1.0, r2 = 1.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i || j == k) continue;
                    r1 *= (ui - c) * (ui - c) - u_set[j] * u_set[j];
                    r2 *= (ui + c) * (ui + c) - u_set[j] * u_set[j];
                }
                sq1 += r1;
                sq2 += r2;
                J(i, k) = pp * a1 * (-2.0 * u_set[k]) * r1 - pm * a2 * (-2.0 * u_set[k]) * r2;
            }
            J(i, i) = (dpp * a1 + pp * da1) * q1 + pp * a1 * (2.0 * (ui - c)) * sq1 -
                      (dpm * a2 + pm * da2) * q2 - pm * a2 * (2.0 * (ui + c)) * sq2;
        }
    }
    return J;
}

Scalar log_derivative_X(Scalar v, const ModelSpec& model) {
    const Scalar l1 = lambda_eval(model, 1, v);
    const Scalar l2 = lambda_eval(model, 2, v);
    if (std::abs(l1) <= kCollisionTol || std::abs(l2) <= kCollisionTol)
        throw PoleError("log derivative X undefined at a zero of lambda");
    return lambda_derivative(model, 1, v) / l1 - lambda_derivative(model, 2, v) / l2;
}

double max_residual_norm(const ParamSet& u_set, const ModelSpec& model) {
    double m = 0.0;
    for (auto& r : bethe_residual(u_set, model)) m = std::max(m, std::abs(r));
    return m;
}

}  // namespace bethe
