#include "bethe/solver.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "bethe/oracle.hpp"
#include "bethe/rat_core.hpp"

namespace bethe {

void SolveConfig::validate() const {
    if (n_roots < 0) throw ValidationError("n must be >= 0");
    if (seeds < 1) throw ValidationError("seeds must be >= 1");
    if (!(newton_tol < dedup_tol))
        throw ValidationError("newton_tol must be smaller than dedup_tol");
    if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
    if (jobs < 1) throw ValidationError("jobs must be >= 1");
}

namespace {

double max_abs(const std::vector<Scalar>& v) {
    double m = 0.0;
    for (auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

// Rejects coinciding parameters, exact string collapses u_i - u_j = +-c, and
// in reflection mode the 0, +-c/2 and opposite-pair degeneracies. Such sets
// zero the cleared residuals without being usable Bethe states.
bool admissible(const ParamSet& u, const ModelSpec& model, double tol) {
    const Scalar c = model.c;
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Scalar d = u[i] - u[j];
            if (std::abs(d) <= tol || std::abs(d - c) <= tol || std::abs(d + c) <= tol)
                return false;
        }
    }
    if (model.mode == BoundaryMode::reflection) {
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(u[i]) <= tol || std::abs(u[i] - c / 2.0) <= tol ||
                std::abs(u[i] + c / 2.0) <= tol)
                return false;
            for (std::size_t j = i + 1; j < n; ++j) {
                const Scalar s = u[i] + u[j];
                if (std::abs(s) <= tol || std::abs(s - c) <= tol || std::abs(s + c) <= tol)
                    return false;
            }
        }
    }
    return true;
}

struct NewtonResult {
    ParamSet roots;
    double residual{0.0};
    bool converged{false};
};

NewtonResult newton_from(ParamSet u, const ModelSpec& model, const SolveConfig& cfg) {
    NewtonResult out;
    const std::size_t n = u.size();
    std::vector<Scalar> f = bethe_residual_raw(u, model);
    double fnorm = max_abs(f);
    for (int it = 0; it < cfg.max_iter; ++it) {
        if (fnorm < cfg.newton_tol) break;
        const Eigen::MatrixXcd jac = bethe_jacobian(u, model);
        Eigen::VectorXcd rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs(i) = -f[i];
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(jac);
        const Eigen::VectorXcd step = lu.solve(rhs);
        if (!step.allFinite()) return out;
        // damping: halve the step until the residual decreases
        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 20; ++halving) {
            ParamSet trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + scale * step(i);
            std::vector<Scalar> ft = bethe_residual_raw(trial, model);
            const double tn = max_abs(ft);
            if (tn < fnorm) {
                u = std::move(trial);
                f = std::move(ft);
                fnorm = tn;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) return out;  // stalled seed
    }
    // polish a little past the tolerance while Newton still improves
    for (int it = 0; it < 6 && fnorm >= 1e-14 && fnorm < cfg.newton_tol; ++it) {
        const Eigen::MatrixXcd jac = bethe_jacobian(u, model);
        Eigen::VectorXcd rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs(i) = -f[i];
        const Eigen::VectorXcd step = Eigen::PartialPivLU<Eigen::MatrixXcd>(jac).solve(rhs);
        if (!step.allFinite()) break;
        ParamSet trial(n);
        for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + step(i);
        const std::vector<Scalar> ft = bethe_residual_raw(trial, model);
        if (max_abs(ft) >= fnorm) break;
        u = std::move(trial);
        f = ft;
        fnorm = max_abs(f);
    }
    out.roots = std::move(u);
    out.residual = fnorm;
    out.converged = fnorm < cfg.newton_tol;
    return out;
}

bool scalar_less(const Scalar& a, const Scalar& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

ParamSet canonical(ParamSet u, BoundaryMode mode, double tol) {
    if (mode == BoundaryMode::reflection) {
        for (auto& z : u) {
            if (z.real() < -tol || (std::abs(z.real()) <= tol && z.imag() < 0.0)) z = -z;
        }
    }
    std::sort(u.begin(), u.end(), scalar_less);
    return u;
}

void run_chunked(int total, int jobs, const std::function<void(int)>& work) {
    if (jobs <= 1 || total <= 1) {
        for (int i = 0; i < total; ++i) work(i);
        return;
    }
    const int workers = std::min(jobs, total);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < total; i += workers) work(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<BetheRoots> solve_bethe(const ModelSpec& model, const SolveConfig& cfg) {
    cfg.validate();
    model.validate();
    const std::size_t n = static_cast<std::size_t>(cfg.n_roots);
    if (n == 0) {
        BetheRoots trivial;
        trivial.mode = model.mode;
        trivial.converged = true;
        return {trivial};
    }

    Scalar centroid = 0.0;
    if (!model.theta.empty()) {
        for (auto& th : model.theta) centroid += th;
        centroid /= static_cast<double>(model.theta.size());
    }

    // draw every start upfront so the schedule cannot affect the stream
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> box(-cfg.seed_box, cfg.seed_box);
    std::vector<ParamSet> starts(cfg.seeds, ParamSet(n));
    for (auto& s : starts)
        for (auto& z : s) z = centroid + Scalar(box(rng), box(rng));

    std::vector<NewtonResult> slots(cfg.seeds);
    run_chunked(cfg.seeds, cfg.jobs,
                [&](int i) { slots[i] = newton_from(starts[i], model, cfg); });

    std::vector<BetheRoots> candidates;
    for (auto& r : slots) {
        if (!r.converged) continue;
        if (!admissible(r.roots, model, kCollisionTol)) continue;  // DegenerateRoot: drop seed
        BetheRoots b;
        b.roots = canonical(std::move(r.roots), model.mode, kCollisionTol);
        b.mode = model.mode;
        b.residual_norm = r.residual;
        b.converged = true;
        candidates.push_back(std::move(b));
    }
    if (candidates.empty())
        throw NoConvergence("no Newton seed converged to an admissible root set (n=" +
                            std::to_string(n) + ", seeds=" + std::to_string(cfg.seeds) + ")");
    return dedup_roots(std::move(candidates), model.mode, cfg.dedup_tol);
}

std::vector<BetheRoots> dedup_roots(std::vector<BetheRoots> candidates, BoundaryMode mode,
                                    double tol) {
    for (auto& c : candidates) c.roots = canonical(c.roots, mode, tol);
    std::sort(candidates.begin(), candidates.end(), [](const BetheRoots& a, const BetheRoots& b) {
        for (std::size_t i = 0; i < std::min(a.roots.size(), b.roots.size()); ++i) {
            if (a.roots[i] != b.roots[i]) return scalar_less(a.roots[i], b.roots[i]);
        }
        return a.roots.size() < b.roots.size();
    });
    std::vector<BetheRoots> out;
    for (auto& c : candidates) {
        bool dup = false;
        for (auto& kept : out) {
            if (kept.roots.size() != c.roots.size()) continue;
            if (multiset_match(kept.roots, c.roots, tol)) {
                dup = true;
                if (c.residual_norm < kept.residual_norm) kept = c;
                break;
            }
        }
        if (!dup) out.push_back(std::move(c));
    }
    return out;
}

OnShellReport verify_on_shell(const BetheRoots& roots, const ModelSpec& model, double tol,
                              bool use_oracle) {
    OnShellReport rep;
    if (roots.roots.empty()) {
        rep.pass = true;
        return rep;
    }
    for (auto& r : bethe_residual(roots.roots, model))
        rep.max_cleared_residual = std::max(rep.max_cleared_residual, std::abs(r));
    for (std::size_t j = 0; j < roots.roots.size(); ++j)
        rep.max_tau_residue =
            std::max(rep.max_tau_residue, std::abs(tau_residue(j, roots.roots, model)));
    rep.pass = rep.max_cleared_residual < tol && rep.max_tau_residue < tol;

    if (use_oracle && model.realization == Realization::xxx_inhomogeneous &&
        model.sites() >= static_cast<int>(roots.roots.size()) && model.sites() <= 10) {
        const oracle::StateVector b = oracle::bethe_vector(roots.roots, model);
        const double bscale = b.cwiseAbs().maxCoeff();
        std::mt19937_64 rng(0x0B57u);
        std::uniform_real_distribution<double> d(0.3, 1.1);
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            const Scalar z(d(rng), d(rng));
            const oracle::Operator tz = oracle::transfer_operator(model, z);
            const Scalar ev = tau(z, roots.roots, model);
            worst = std::max(worst, (tz * b - ev * b).cwiseAbs().maxCoeff() / bscale);
        }
        rep.eigenvector_residual = worst;
        rep.oracle_checked = true;
        rep.pass = rep.pass && worst < 1e-9;
    }
    return rep;
}

}  // namespace bethe
