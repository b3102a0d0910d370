#include "bethe/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace bethe {

Check make_check(std::string name, Scalar lhs, Scalar rhs, double tol) {
    Check c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    c.rel_err = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
    c.tol = tol;
    c.pass = c.rel_err < tol;
    return c;
}

Check make_residual_check(std::string name, double residual, double tol) {
    Check c;
    c.name = std::move(name);
    c.lhs = Scalar(residual, 0.0);
    c.rhs = Scalar(0.0);
    c.rel_err = residual;
    c.tol = tol;
    c.pass = residual < tol;
    return c;
}

bool Report::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json scalar_to_json(Scalar z) {
    return nlohmann::json{{"re", z.real()}, {"im", z.imag()}};
}

namespace {

nlohmann::json set_to_json(const ParamSet& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& z : s) arr.push_back(scalar_to_json(z));
    return arr;
}

}  // namespace

nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json model{
        {"c", scalar_to_json(cfg.model.c)},
        {"mode", cfg.model.mode == BoundaryMode::periodic ? "periodic" : "reflection"},
    };
    if (cfg.model.realization == Realization::xxx_inhomogeneous) {
        model["realization"] = "xxx_inhomogeneous";
        model["theta"] = set_to_json(cfg.model.theta);
    } else {
        model["realization"] = "custom";
        model["lambda1_num"] = set_to_json(cfg.model.lambda1.num.coeff);
        model["lambda1_den"] = set_to_json(cfg.model.lambda1.den.coeff);
        model["lambda2_num"] = set_to_json(cfg.model.lambda2.num.coeff);
        model["lambda2_den"] = set_to_json(cfg.model.lambda2.den.coeff);
    }
    if (cfg.model.mode == BoundaryMode::reflection) {
        model["xi_minus"] = scalar_to_json(cfg.model.xi_minus);
        model["xi_plus"] = scalar_to_json(cfg.model.xi_plus);
    }
    nlohmann::json solver{
        {"n", cfg.solver.n_roots},         {"seeds", cfg.solver.seeds},
        {"seed_box", cfg.solver.seed_box}, {"newton_tol", cfg.solver.newton_tol},
        {"max_iter", cfg.solver.max_iter}, {"dedup_tol", cfg.solver.dedup_tol},
        {"rng_seed", cfg.solver.rng_seed}, {"jobs", cfg.solver.jobs},
    };
    nlohmann::json task{
        {"methods", cfg.task.methods},
        {"tol", cfg.task.tol},
        {"root_index", cfg.task.root_index},
        {"offshell_sets", cfg.task.offshell_sets},
        {"unchecked", cfg.task.unchecked},
        {"bench_n_max", cfg.task.bench_n_max},
        {"verify_n_max", cfg.task.verify_n_max},
    };
    if (cfg.task.u_set) task["u_set"] = set_to_json(*cfg.task.u_set);
    nlohmann::json output{{"format", cfg.output.format}, {"path", cfg.output.path}};
    return nlohmann::json{
        {"model", model}, {"solver", solver}, {"task", task}, {"output", output}};
}

nlohmann::json report_to_json(const Report& rep, const RunConfig& cfg) {
    nlohmann::json checks = nlohmann::json::array();
    for (auto& c : rep.checks) {
        checks.push_back(nlohmann::json{{"name", c.name},
                                        {"lhs", scalar_to_json(c.lhs)},
                                        {"rhs", scalar_to_json(c.rhs)},
                                        {"rel_err", c.rel_err},
                                        {"tol", c.tol},
                                        {"pass", c.pass}});
    }
    return nlohmann::json{{"command", rep.command},
                          {"config", config_to_json(cfg)},
                          {"checks", checks},
                          {"extra", rep.extra},
                          {"pass", rep.pass()}};
}

std::string report_to_table(const Report& rep) {
    std::ostringstream os;
    os << "command: " << rep.command << "\n";
    os << std::left << std::setw(52) << "check" << std::setw(14) << "rel_err" << std::setw(12)
       << "tol"
       << "status\n";
    for (auto& c : rep.checks) {
        os << std::left << std::setw(52) << c.name << std::setw(14) << std::scientific
           << std::setprecision(3) << c.rel_err << std::setw(12) << c.tol
           << (c.pass ? "pass" : "FAIL") << "\n";
    }
    os << (rep.pass() ? "all checks passed" : "FAILURES present") << "\n";
    return os.str();
}

}  // namespace bethe
