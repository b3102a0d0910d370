#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/types.hpp"

// Brute-force realization of the algebra on a 2^N spin chain: monodromy from
// rational L-operators, double-row monodromy for open boundaries, Bethe
// vectors as literal state vectors, and direct residual checks of the
// defining relations. Everything here is ground truth for the formula layer.

namespace bethe::oracle {

using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Blocks of a 2x2 operator-valued matrix on the physical space.
struct MonodromyBlocks {
    Operator t11, t12, t21, t22;
};

Operator permutation_matrix();                       // P on C^2 x C^2
Operator build_r_matrix(Scalar u, Scalar v, Scalar c);  // 1 + g(u,v) P
Operator k_matrix(Scalar u, Scalar xi);              // diag(xi+u, xi-u)

StateVector vacuum(int sites);

// T(u) = L_N(u - theta_N) ... L_1(u - theta_1), contracted over the auxiliary
// space; vacuum eigenvalues are the xxx lambda products.
MonodromyBlocks build_monodromy(const ModelSpec& model, Scalar u);

// Double-row monodromy T(u) K(u - c/2, xi_-) sigma_2 T^t(-u) sigma_2.
MonodromyBlocks build_double_row(const ModelSpec& model, Scalar u);

// Periodic trace or the K_+-weighted trace, per model.mode.
Operator transfer_operator(const ModelSpec& model, Scalar u);

StateVector bethe_vector(const ParamSet& u_set, const ModelSpec& model);
StateVector dual_bethe_vector(const ParamSet& v_set, const ModelSpec& model);

// Bilinear pairing (transposition, no conjugation).
Scalar inner_product(const StateVector& dual, const StateVector& vec);

// Basis indices of the sector with n_down flipped spins.
std::vector<int> sector_indices(int sites, int n_down);

// Total spin raising operator; its kernel on a sector counts the
// highest-weight states reachable as Bethe vectors.
Operator total_spin_raise(int sites);

double relative_residual(const Operator& lhs, const Operator& rhs);

struct AlgebraReport {
    double rtt{0.0};
    double reflection_minus{0.0};
    double reflection_plus{0.0};
    double vacuum_periodic{0.0};
    double vacuum_double_row{0.0};
    double commute_periodic{0.0};
    double commute_reflection{0.0};
    double action_periodic{0.0};
    double action_reflection{0.0};
    double max() const;
};

// Residuals of the defining relations at spectral points (u, v).
AlgebraReport check_algebra(const ModelSpec& model, Scalar u, Scalar v);

// Max relative error between the literal coefficients of t(z) B(u) in the
// basis {B(u), B({z, u_j-complement})} and the single-action formula.
double action_coefficient_residual(const ModelSpec& model, const ParamSet& u_set, Scalar z);

// Debug dump: "BVOR" magic, then sites, mode, rows, cols, then row-major
// complex doubles, little-endian throughout.
void dump_operator(const std::string& path, const Operator& op, int sites, BoundaryMode mode);
Operator load_operator(const std::string& path, int* sites = nullptr,
                       BoundaryMode* mode = nullptr);
void dump_vector(const std::string& path, const StateVector& vec, int sites, BoundaryMode mode);
StateVector load_vector(const std::string& path, int* sites = nullptr,
                        BoundaryMode* mode = nullptr);

}  // namespace bethe::oracle
