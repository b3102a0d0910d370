#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/solver.hpp"

namespace bethe {

// Parsed [task] + [output] blocks; command-specific keys stay optional.
struct TaskConfig {
    std::vector<std::string> methods{"det", "action"};
    double tol{1e-8};
    int root_index{0};
    std::optional<ParamSet> u_set;  // explicit off-shell set
    int offshell_sets{5};
    bool unchecked{false};
    int bench_n_max{5};
    int verify_n_max{3};            // periodic sizes; reflection capped at 2
};

struct OutputConfig {
    std::string format{"json"};  // json | table
    std::string path;            // empty = stdout
};

struct RunConfig {
    ModelSpec model;
    SolveConfig solver;
    TaskConfig task;
    OutputConfig output;
};

// Scalar literal: "1.5", "-2i", "0.3+0.25i", "1-2e-3i".
Scalar parse_scalar(const std::string& text);
std::string format_scalar(Scalar z);

// INI-like sections [model], [solver], [task], [output]. Duplicate keys and
// malformed lines raise ParseError; unknown or inconsistent keys raise
// ValidationError. Defaults are filled for everything omitted.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace bethe
