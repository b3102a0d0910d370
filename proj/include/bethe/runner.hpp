#pragma once

#include "bethe/config.hpp"
#include "bethe/report.hpp"

namespace bethe {

// Command implementations shared by the CLI and the test suites.
Report run_solve(const RunConfig& cfg);
Report run_scalar(const RunConfig& cfg);
Report run_norm(const RunConfig& cfg);
Report run_verify(const RunConfig& cfg);
Report run_bench(const RunConfig& cfg);

Report run_command(const std::string& command, const RunConfig& cfg);

// Serialized report, stable byte-for-byte for a fixed config and rng_seed.
std::string render_report(const Report& rep, const RunConfig& cfg);

}  // namespace bethe
