#include "bethe/oracle.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "bethe/rat_core.hpp"

namespace bethe::oracle {

namespace {

int require_sites(const ModelSpec& model) {
    if (model.realization != Realization::xxx_inhomogeneous)
        throw ValidationError("the oracle requires the xxx realization");
    const int n = model.sites();
    if (n < 1) throw ValidationError("oracle needs at least one site");
    if (n > kMaxSites)
        throw DimensionCap("oracle capped at " + std::to_string(kMaxSites) + " sites, got " +
                           std::to_string(n));
    return n;
}

// Left-multiply M by E_ab acting on site k (0-based, site 0 = most
// significant bit; spin up = bit 0). Only rows with bit_k == a survive,
// sourced from the row with bit_k set to b.
Operator apply_e_left(int a, int b, int k, int sites, const Operator& m) {
    const long dim = m.rows();
    const long bit = 1L << (sites - 1 - k);
    Operator out = Operator::Zero(dim, m.cols());
    for (long r = 0; r < dim; ++r) {
        if (((r & bit) != 0) != (a == 1)) continue;
        const long src = (r & ~bit) | (b == 1 ? bit : 0);
        out.row(r) = m.row(src);
    }
    return out;
}

}  // namespace

Operator permutation_matrix() {
    Operator p = Operator::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) p(2 * i + j, 2 * j + i) = 1.0;
    return p;
}

Operator build_r_matrix(Scalar u, Scalar v, Scalar c) {
    return Operator::Identity(4, 4) + kernel_g(u, v, c) * permutation_matrix();
}

Operator k_matrix(Scalar u, Scalar xi) {
    Operator k = Operator::Zero(2, 2);
    k(0, 0) = xi + u;
    k(1, 1) = xi - u;
    return k;
}

StateVector vacuum(int sites) {
    StateVector v = StateVector::Zero(1L << sites);
    v(0) = 1.0;
    return v;
}

MonodromyBlocks build_monodromy(const ModelSpec& model, Scalar u) {
    const int sites = require_sites(model);
    const long dim = 1L << sites;
    const Scalar c = model.c;
    // aux-space 2x2 identity
    Operator t[2][2] = {{Operator::Identity(dim, dim), Operator::Zero(dim, dim)},
                        {Operator::Zero(dim, dim), Operator::Identity(dim, dim)}};
    for (int k = 0; k < sites; ++k) {
        const Scalar w = u - model.theta[k];
        // L_ij = w delta_ij + c E_ji on site k; new T = L_k T
        Operator nt[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                nt[i][j] = w * t[i][j];
                for (int m = 0; m < 2; ++m)
                    nt[i][j] += c * apply_e_left(m, i, k, sites, t[m][j]);
            }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) t[i][j] = std::move(nt[i][j]);
    }
    return {std::move(t[0][0]), std::move(t[0][1]), std::move(t[1][0]), std::move(t[1][1])};
}

MonodromyBlocks build_double_row(const ModelSpec& model, Scalar u) {
    const MonodromyBlocks tp = build_monodromy(model, u);
    const MonodromyBlocks tm = build_monodromy(model, -u);
    const Scalar k1 = model.xi_minus + u - model.c / 2.0;
    const Scalar k2 = model.xi_minus - u + model.c / 2.0;
    // sigma_2 T^t(-u) sigma_2 = [[T22(-u), -T12(-u)], [-T21(-u), T11(-u)]]
    // (transpose in the auxiliary space only)
    MonodromyBlocks d;
    d.t11 = k1 * tp.t11 * tm.t22 - k2 * tp.t12 * tm.t21;
    d.t12 = -k1 * tp.t11 * tm.t12 + k2 * tp.t12 * tm.t11;
    d.t21 = k1 * tp.t21 * tm.t22 - k2 * tp.t22 * tm.t21;
    d.t22 = -k1 * tp.t21 * tm.t12 + k2 * tp.t22 * tm.t11;
    return d;
}

Operator transfer_operator(const ModelSpec& model, Scalar u) {
    if (model.mode == BoundaryMode::periodic) {
        const MonodromyBlocks t = build_monodromy(model, u);
        return t.t11 + t.t22;
    }
    const MonodromyBlocks d = build_double_row(model, u);
    return (model.xi_plus + u + model.c / 2.0) * d.t11 +
           (model.xi_plus - u - model.c / 2.0) * d.t22;
}

StateVector bethe_vector(const ParamSet& u_set, const ModelSpec& model) {
    const int sites = require_sites(model);
    if (static_cast<int>(u_set.size()) > sites)
        throw DimensionCap("more parameters than down-spin sectors");
    StateVector v = vacuum(sites);
    for (auto it = u_set.rbegin(); it != u_set.rend(); ++it) {
        if (model.mode == BoundaryMode::periodic)
            v = build_monodromy(model, *it).t12 * v;
        else
            v = build_double_row(model, *it).t12 * v;
    }
    return v;
}

StateVector dual_bethe_vector(const ParamSet& v_set, const ModelSpec& model) {
    const int sites = require_sites(model);
    StateVector d = vacuum(sites);
    // <0| T21(v_1) ... T21(v_n), accumulated as a column via transposes
    for (auto& v : v_set) {
        if (model.mode == BoundaryMode::periodic)
            d = build_monodromy(model, v).t21.transpose() * d;
        else
            d = build_double_row(model, v).t21.transpose() * d;
    }
    return d;
}

Scalar inner_product(const StateVector& dual, const StateVector& vec) {
    if (dual.size() != vec.size())
        throw DimensionMismatch("inner_product: dimensions " + std::to_string(dual.size()) +
                                " vs " + std::to_string(vec.size()));
    return dual.transpose() * vec;
}

std::vector<int> sector_indices(int sites, int n_down) {
    std::vector<int> idx;
    for (int b = 0; b < (1 << sites); ++b)
        if (__builtin_popcount(static_cast<unsigned>(b)) == n_down) idx.push_back(b);
    return idx;
}

Operator total_spin_raise(int sites) {
    // S^+ = sum_k E_12 at site k: annihilates a down spin
    const long dim = 1L << sites;
    Operator s = Operator::Zero(dim, dim);
    for (int k = 0; k < sites; ++k) s += apply_e_left(0, 1, k, sites, Operator::Identity(dim, dim));
    return s;
}

double relative_residual(const Operator& lhs, const Operator& rhs) {
    const double scale = std::max(lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff());
    if (scale == 0.0) return 0.0;
    return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

double AlgebraReport::max() const {
    double m = rtt;
    for (double v : {reflection_minus, reflection_plus, vacuum_periodic, vacuum_double_row,
                     commute_periodic, commute_reflection, action_periodic, action_reflection})
        m = std::max(m, v);
    return m;
}

namespace {

double rtt_residual(const ModelSpec& model, Scalar u, Scalar v) {
    const MonodromyBlocks a = build_monodromy(model, u);
    const MonodromyBlocks b = build_monodromy(model, v);
    const Operator* ta[2][2] = {{&a.t11, &a.t12}, {&a.t21, &a.t22}};
    const Operator* tb[2][2] = {{&b.t11, &b.t12}, {&b.t21, &b.t22}};
    const Operator r = build_r_matrix(u, v, model.c);
    const long dim = a.t11.rows();
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j)
                for (int l = 0; l < 2; ++l) {
                    Operator lhs = Operator::Zero(dim, dim);
                    Operator rhs = Operator::Zero(dim, dim);
                    for (int p = 0; p < 2; ++p)
                        for (int q = 0; q < 2; ++q) {
                            lhs += r(2 * i + k, 2 * p + q) * (*ta[p][j]) * (*tb[q][l]);
                            rhs += (*tb[k][q]) * (*ta[i][p]) * r(2 * p + q, 2 * j + l);
                        }
                    err = std::max(err, (lhs - rhs).cwiseAbs().maxCoeff());
                    scale = std::max(scale, lhs.cwiseAbs().maxCoeff());
                }
    return err / scale;
}

Operator r_shift(Scalar w, Scalar c) { return build_r_matrix(w, Scalar(0.0), c); }

Operator on_first(const Operator& k) {
    Operator out = Operator::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int s = 0; s < 2; ++s) out(2 * i + s, 2 * j + s) = k(i, j);
    return out;
}

Operator on_second(const Operator& k) {
    Operator out = Operator::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int s = 0; s < 2; ++s) out(2 * s + i, 2 * s + j) = k(i, j);
    return out;
}

double reflection_equation_minus(Scalar u1, Scalar u2, Scalar c, Scalar xi) {
    const Operator k1 = on_first(k_matrix(u1, xi));
    const Operator k2 = on_second(k_matrix(u2, xi));
    const Operator lhs = r_shift(u1 - u2, c) * k1 * r_shift(u1 + u2, c) * k2;
    const Operator rhs = k2 * r_shift(u1 + u2, c) * k1 * r_shift(u1 - u2, c);
    return relative_residual(lhs, rhs);
}

double reflection_equation_plus(Scalar u1, Scalar u2, Scalar c, Scalar xi) {
    const Operator k1 = on_first(k_matrix(u1 + c, xi));
    const Operator k2 = on_second(k_matrix(u2 + c, xi));
    const Operator lhs = r_shift(-u1 + u2, c) * k1 * r_shift(-u1 - u2 - 2.0 * c, c) * k2;
    const Operator rhs = k2 * r_shift(-u1 - u2 - 2.0 * c, c) * k1 * r_shift(-u1 + u2, c);
    return relative_residual(lhs, rhs);
}

double vacuum_residual_periodic(const ModelSpec& model, Scalar u) {
    const MonodromyBlocks t = build_monodromy(model, u);
    const StateVector v = vacuum(model.sites());
    const Scalar l1 = lambda_eval(model, 1, u);
    const Scalar l2 = lambda_eval(model, 2, u);
    const double scale = std::max({std::abs(l1), std::abs(l2), 1.0});
    double err = (t.t11 * v - l1 * v).cwiseAbs().maxCoeff();
    err = std::max(err, (t.t22 * v - l2 * v).cwiseAbs().maxCoeff());
    err = std::max(err, (t.t21 * v).cwiseAbs().maxCoeff());
    return err / scale;
}

double vacuum_residual_double_row(const ModelSpec& model, Scalar u) {
    const MonodromyBlocks d = build_double_row(model, u);
    const StateVector v = vacuum(model.sites());
    const Scalar c = model.c;
    const Scalar l1p = lambda_eval(model, 1, u), l1m = lambda_eval(model, 1, -u);
    const Scalar l2p = lambda_eval(model, 2, u), l2m = lambda_eval(model, 2, -u);
    const Scalar e11 = (u + model.xi_minus - c / 2.0) * l1p * l2m;
    // two-term display for the 22 block; the second term carries a factor c
    const Scalar e22 = (c - 2.0 * u) / (2.0 * u) * (u - model.xi_minus + c / 2.0) * l1m * l2p +
                       c * (u + model.xi_minus - c / 2.0) / (2.0 * u) * l1p * l2m;
    const double scale = std::max({std::abs(e11), std::abs(e22), 1.0});
    double err = (d.t11 * v - e11 * v).cwiseAbs().maxCoeff();
    err = std::max(err, (d.t22 * v - e22 * v).cwiseAbs().maxCoeff());
    err = std::max(err, (d.t21 * v).cwiseAbs().maxCoeff());
    return err / scale;
}

double commutator_residual(const Operator& a, const Operator& b) {
    const double scale = a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff();
    return (a * b - b * a).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

double action_coefficient_residual(const ModelSpec& model, const ParamSet& u_set, Scalar z) {
    const std::size_t n = u_set.size();
    const Operator tz = transfer_operator(model, z);
    const StateVector lhs = tz * bethe_vector(u_set, model);

    // formula coefficients of the single-action expansion
    std::vector<Scalar> coef(n + 1);
    coef[0] = tau(z, u_set, model);
    const Scalar c = model.c;
    for (std::size_t j = 0; j < n; ++j) {
        if (model.mode == BoundaryMode::periodic) {
            coef[j + 1] = -(1.0 / c) * kernel_g(z, u_set[j], c) * tau_residue(j, u_set, model);
        } else {
            const Scalar uj = u_set[j];
            coef[j + 1] = -(1.0 / c) * (2.0 * uj / (c + 2.0 * uj)) * ((c + 2.0 * z) / c) *
                          kernel_g(z, uj, c) * kernel_g(z, -uj, c) * tau_residue(j, u_set, model);
        }
    }

    // least-squares coefficients of lhs in the basis {B(u), B({z, u_j-bar})}
    Eigen::MatrixXcd basis(lhs.size(), n + 1);
    basis.col(0) = bethe_vector(u_set, model);
    for (std::size_t j = 0; j < n; ++j) {
        ParamSet sub = erase_at(u_set, j);
        sub.insert(sub.begin(), z);
        basis.col(j + 1) = bethe_vector(sub, model);
    }
    const Eigen::VectorXcd fitted = basis.colPivHouseholderQr().solve(lhs);

    double err = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
        const double scale = std::max(std::abs(coef[j]), std::abs(Scalar(fitted(j))));
        if (scale > 1e-13) err = std::max(err, std::abs(coef[j] - fitted(j)) / scale);
    }
    return err;
}

AlgebraReport check_algebra(const ModelSpec& model, Scalar u, Scalar v) {
    AlgebraReport rep;
    rep.rtt = rtt_residual(model, u, v);
    rep.reflection_minus = reflection_equation_minus(u, v, model.c, model.xi_minus);
    rep.reflection_plus = reflection_equation_plus(u, v, model.c, model.xi_plus);
    rep.vacuum_periodic = vacuum_residual_periodic(model, u);
    rep.commute_periodic =
        commutator_residual(transfer_operator(model, u), transfer_operator(model, v));

    ModelSpec refl = model;
    if (refl.mode != BoundaryMode::reflection) {
        refl.mode = BoundaryMode::reflection;
        if (refl.xi_minus == Scalar(0.0) && refl.xi_plus == Scalar(0.0)) {
            refl.xi_minus = Scalar(0.7, 0.1);
            refl.xi_plus = Scalar(1.3, -0.2);
        }
    }
    rep.vacuum_double_row = vacuum_residual_double_row(refl, u);
    rep.commute_reflection =
        commutator_residual(transfer_operator(refl, u), transfer_operator(refl, v));

    ParamSet probe{u + Scalar(0.11, 0.07), v - Scalar(0.23, 0.05)};
    ModelSpec per = model;
    per.mode = BoundaryMode::periodic;
    rep.action_periodic = action_coefficient_residual(per, probe, u + Scalar(0.51, -0.13));
    rep.action_reflection = action_coefficient_residual(refl, probe, u + Scalar(0.51, -0.13));
    return rep;
}

namespace {

constexpr char kMagic[4] = {'B', 'V', 'O', 'R'};

void write_header(std::ofstream& out, int sites, BoundaryMode mode, std::uint64_t rows,
                  std::uint64_t cols) {
    out.write(kMagic, 4);
    const std::uint32_t n = static_cast<std::uint32_t>(sites);
    const std::uint8_t m = mode == BoundaryMode::periodic ? 0 : 1;
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&m), sizeof m);
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
}

void read_header(std::ifstream& in, int* sites, BoundaryMode* mode, std::uint64_t* rows,
                 std::uint64_t* cols) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != std::string(kMagic, 4))
        throw Error("bad dump header");
    std::uint32_t n = 0;
    std::uint8_t m = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&m), sizeof m);
    in.read(reinterpret_cast<char*>(rows), sizeof *rows);
    in.read(reinterpret_cast<char*>(cols), sizeof *cols);
    if (sites) *sites = static_cast<int>(n);
    if (mode) *mode = m == 0 ? BoundaryMode::periodic : BoundaryMode::reflection;
}

}  // namespace

void dump_operator(const std::string& path, const Operator& op, int sites, BoundaryMode mode) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_header(out, sites, mode, op.rows(), op.cols());
    for (long r = 0; r < op.rows(); ++r)
        for (long c = 0; c < op.cols(); ++c) {
            const double re = op(r, c).real(), im = op(r, c).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof re);
            out.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
}

Operator load_operator(const std::string& path, int* sites, BoundaryMode* mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::uint64_t rows = 0, cols = 0;
    read_header(in, sites, mode, &rows, &cols);
    Operator op(rows, cols);
    for (std::uint64_t r = 0; r < rows; ++r)
        for (std::uint64_t c = 0; c < cols; ++c) {
            double re = 0, im = 0;
            in.read(reinterpret_cast<char*>(&re), sizeof re);
            in.read(reinterpret_cast<char*>(&im), sizeof im);
            op(r, c) = Scalar(re, im);
        }
    if (!in) throw Error("truncated dump " + path);
    return op;
}

void dump_vector(const std::string& path, const StateVector& vec, int sites, BoundaryMode mode) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_header(out, sites, mode, vec.size(), 1);
    for (long r = 0; r < vec.size(); ++r) {
        const double re = vec(r).real(), im = vec(r).imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof re);
        out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

StateVector load_vector(const std::string& path, int* sites, BoundaryMode* mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::uint64_t rows = 0, cols = 0;
    read_header(in, sites, mode, &rows, &cols);
    if (cols != 1) throw Error(path + " does not hold a vector");
    StateVector v(rows);
    for (std::uint64_t r = 0; r < rows; ++r) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), sizeof re);
        in.read(reinterpret_cast<char*>(&im), sizeof im);
        v(r) = Scalar(re, im);
    }
    if (!in) throw Error("truncated dump " + path);
    return v;
}

}  // namespace bethe::oracle
