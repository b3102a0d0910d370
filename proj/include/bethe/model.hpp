#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bethe/errors.hpp"
#include "bethe/types.hpp"

namespace bethe {

enum class BoundaryMode { periodic, reflection };

// Polynomial in ascending coefficient order.
struct Polynomial {
    std::vector<Scalar> coeff;

    Scalar eval(Scalar u) const;
    Polynomial derivative() const;
    bool trivial_one() const { return coeff.size() == 1 && coeff[0] == Scalar(1.0); }
};

// A rational function num/den used for custom vacuum eigenvalues.
struct RationalFn {
    Polynomial num{{Scalar(1.0)}};
    Polynomial den{{Scalar(1.0)}};

    Scalar eval(Scalar u, double tol = kCollisionTol) const;
    Scalar derivative(Scalar u, double tol = kCollisionTol) const;
};

enum class Realization { xxx_inhomogeneous, custom };

// The generalized model pinned to a concrete realization. The default is the
// inhomogeneous XXX chain
//     lambda_1(u) = prod_k (u - theta_k + c),   lambda_2(u) = prod_k (u - theta_k),
// which the dense-matrix oracle reproduces exactly.
struct ModelSpec {
    Scalar c{1.0};
    BoundaryMode mode{BoundaryMode::periodic};
    Realization realization{Realization::xxx_inhomogeneous};
    ParamSet theta;                 // xxx realization only
    RationalFn lambda1, lambda2;    // custom realization only
    Scalar xi_minus{0.0}, xi_plus{0.0};

    static ModelSpec xxx_periodic(Scalar c, ParamSet theta);
    static ModelSpec xxx_reflection(Scalar c, ParamSet theta, Scalar xi_minus, Scalar xi_plus);
    static ModelSpec custom_periodic(Scalar c, RationalFn lambda1, RationalFn lambda2);

    int sites() const { return static_cast<int>(theta.size()); }
    void validate() const;  // throws ValidationError
};

struct BetheRoots {
    ParamSet roots;
    BoundaryMode mode{BoundaryMode::periodic};
    double residual_norm{0.0};
    bool converged{false};
};

Scalar lambda_eval(const ModelSpec& model, int which, Scalar u);
Scalar lambda_derivative(const ModelSpec& model, int which, Scalar u);

// tau(z|u) = lambda_1(z) f(u,z) + lambda_2(z) f(z,u)
Scalar tau_periodic(Scalar z, const ParamSet& u_set, const ModelSpec& model);

// Two-term reflection eigenvalue; even in z.
Scalar tau_reflection(Scalar z, const ParamSet& u_set, const ModelSpec& model);

// Dispatch on model.mode.
Scalar tau(Scalar z, const ParamSet& u_set, const ModelSpec& model);

// Analytic residue of tau (or the reflection tau) at w = u_set[j].
Scalar tau_residue(std::size_t j, const ParamSet& u_set, const ModelSpec& model);

// Richardson-extrapolated limit (w - u_j) tau(w|u), cross-check only.
Scalar tau_residue_numeric(std::size_t j, const ParamSet& u_set, const ModelSpec& model,
                           double eps = 1e-6);

// Analytic d tau(z|x) / d x_k, both modes.
Scalar tau_derivative_x(Scalar z, std::size_t k, const ParamSet& x_set, const ModelSpec& model);

// Denominator-cleared Bethe residuals; zero for every i iff on-shell.
std::vector<Scalar> bethe_residual(const ParamSet& u_set, const ModelSpec& model);

// Same value without the distinctness preconditions; polynomial in the
// parameters, always evaluable. Newton iterates on this.
std::vector<Scalar> bethe_residual_raw(const ParamSet& u_set, const ModelSpec& model);

// Analytic Jacobian of the cleared residuals.
Eigen::MatrixXcd bethe_jacobian(const ParamSet& u_set, const ModelSpec& model);

// X(v) = d/dz log(lambda_1/lambda_2) at z = v.
Scalar log_derivative_X(Scalar v, const ModelSpec& model);

double max_residual_norm(const ParamSet& u_set, const ModelSpec& model);

}  // namespace bethe
