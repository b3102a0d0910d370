#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "bethe/config.hpp"
#include "bethe/types.hpp"

namespace bethe {

// One numeric comparison. rel_err = |lhs-rhs| / max(|lhs|,|rhs|), or |lhs|
// when the check is a pure residual against zero.
struct Check {
    std::string name;
    Scalar lhs{0.0};
    Scalar rhs{0.0};
    double rel_err{0.0};
    double tol{0.0};
    bool pass{false};
};

Check make_check(std::string name, Scalar lhs, Scalar rhs, double tol);
Check make_residual_check(std::string name, double residual, double tol);

struct Report {
    std::string command;
    std::vector<Check> checks;
    nlohmann::json extra = nlohmann::json::object();
    bool pass() const;
};

nlohmann::json scalar_to_json(Scalar z);
nlohmann::json config_to_json(const RunConfig& cfg);
nlohmann::json report_to_json(const Report& rep, const RunConfig& cfg);
std::string report_to_table(const Report& rep);

}  // namespace bethe
