#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/types.hpp"

// Scalar products of on-shell and off-shell Bethe vectors, computed four
// independent ways: the determinant representation, the hybrid symmetrized
// forms for every intermediate order m, the fully chained residue sum, and
// the coefficient extracted from the multiple action of the transfer matrix.

namespace bethe {

// Finite linear combination of Bethe vectors, keyed by parameter multisets.
class StateExpansion {
  public:
    explicit StateExpansion(BoundaryMode mode) : mode_(mode) {}
    static StateExpansion single(ParamSet key, BoundaryMode mode);

    void add_term(const ParamSet& key, Scalar coefficient, double match_tol = 1e-9);
    // Drop terms below prune_tol relative to the largest coefficient.
    void prune(double prune_tol = 1e-14);

    const std::vector<std::pair<ParamSet, Scalar>>& terms() const { return terms_; }
    BoundaryMode mode() const { return mode_; }

    // Coefficient of the key matching `key`; throws MissingTerm if absent.
    Scalar coefficient(const ParamSet& key, double match_tol = 1e-9) const;

  private:
    BoundaryMode mode_;
    std::vector<std::pair<ParamSet, Scalar>> terms_;
};

// Entry of the scalar-product matrix for row parameter u and column x_k.
Scalar j_entry(Scalar u, std::size_t k, const ParamSet& x_set, const ModelSpec& model);

// Independent route: c/g(u, x) * d tau(u|x)/d x_k via per-factor products.
Scalar j_entry_derivative_form(Scalar u, std::size_t k, const ParamSet& x_set,
                               const ModelSpec& model);

Eigen::MatrixXcd j_matrix(const ParamSet& u_set, const ParamSet& x_set, const ModelSpec& model);

// Throws OffShellError when x_set fails the cleared Bethe residual check.
void require_on_shell(const ParamSet& x_set, const ModelSpec& model, double tol = 1e-8);

// Determinant representation (pivoted LU), periodic mode.
Scalar slavnov_det(const ParamSet& x_onshell, const ParamSet& u_offshell, const ModelSpec& model,
                   bool unchecked = false);

// Hybrid symmetrized form of order m, 1 <= m <= n; equals slavnov_det for
// every m. m = n reduces to the determinant's Leibniz expansion.
Scalar hny_form(const ParamSet& x_onshell, const ParamSet& u_offshell, int m,
                const ModelSpec& model, bool unchecked = false);

// Fully chained residue sum (n! terms).
Scalar scalar_sum_form(const ParamSet& x_onshell, const ParamSet& u_offshell,
                       const ModelSpec& model, bool unchecked = false);

// Both sides of the contour-sum identity linking J-columns to a residue;
// 1 <= j <= m <= n, 0-based j index.
std::pair<Scalar, Scalar> sum_jm_check(int m, int j, const ParamSet& u_set, const ParamSet& x_set,
                                       const ModelSpec& model);

// One application of the transfer matrix: each size-n term maps to n+1 terms.
StateExpansion apply_transfer(Scalar z, const StateExpansion& state, const ModelSpec& model,
                              double match_tol = 1e-9);

// Coefficient of B(v) in t(v_1)...t(v_n) B(u); equals the scalar product for
// on-shell v. Works in both boundary modes.
Scalar extract_coefficient(const ParamSet& v_onshell, const ParamSet& u_offshell,
                           const ModelSpec& model, bool unchecked = false);

// Norm limit u -> v of the determinant, epsilon-shift + Richardson.
Scalar gaudin_norm(const ParamSet& v_onshell, const ModelSpec& model,
                   std::uint64_t direction_seed = 0x9e3779b9u);

// Reflection determinant representation.
Scalar reflection_det(const ParamSet& x_onshell, const ParamSet& u_offshell,
                      const ModelSpec& model, bool unchecked = false);

// Measured oracle normalization: prod_k lambda_2(x_k).
Scalar kappa_closed_form(const ParamSet& x_onshell, const ModelSpec& model);

}  // namespace bethe
