#pragma once

#include <cstdint>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/types.hpp"

namespace bethe {

struct SolveConfig {
    int n_roots{1};
    int seeds{200};
    double seed_box{2.0};       // half-width of the complex sampling box around centroid(theta)
    double newton_tol{1e-11};   // max cleared residual at convergence
    int max_iter{80};
    double dedup_tol{1e-8};
    std::uint64_t rng_seed{1};
    int jobs{1};

    void validate() const;  // throws ValidationError
};

// Damped Newton with analytic Jacobian on the cleared residuals, multistart,
// deduplicated modulo permutations (and sign flips in reflection mode).
// Seeds that converge onto coinciding or string-collapsed parameter sets are
// discarded. Throws NoConvergence only when no seed survives.
std::vector<BetheRoots> solve_bethe(const ModelSpec& model, const SolveConfig& cfg);

// Quotient converged candidates by the mode's symmetries; canonical
// representative sorts by (re, im), reflection picks the re >= 0 branch.
std::vector<BetheRoots> dedup_roots(std::vector<BetheRoots> candidates, BoundaryMode mode,
                                    double tol);

struct OnShellReport {
    double max_cleared_residual{0.0};
    double max_tau_residue{0.0};
    double eigenvector_residual{0.0};
    bool oracle_checked{false};
    bool pass{false};
};

// Three-way on-shell check: cleared residuals, eigenvalue residues, and (for
// xxx chains up to 10 sites, when enabled) the literal eigenvector residual
// at 3 pseudo-random spectral points.
OnShellReport verify_on_shell(const BetheRoots& roots, const ModelSpec& model, double tol,
                              bool use_oracle = true);

}  // namespace bethe
