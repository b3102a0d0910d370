#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "bethe/log.hpp"
#include "bethe/runner.hpp"

namespace {

int run(const std::string& command, const std::string& config_path, int jobs,
        const std::string& output_path, const std::vector<std::string>& methods, bool unchecked) {
    bethe::RunConfig cfg = bethe::load_config(config_path);
    if (jobs > 0) cfg.solver.jobs = jobs;
    if (!methods.empty()) cfg.task.methods = methods;
    if (unchecked) cfg.task.unchecked = true;
    if (!output_path.empty()) cfg.output.path = output_path;

    const bethe::Report rep = bethe::run_command(command, cfg);
    const std::string rendered = bethe::render_report(rep, cfg);
    if (cfg.output.path.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream out(cfg.output.path);
        if (!out) throw bethe::Error("cannot write " + cfg.output.path);
        out << rendered;
        bethe::log::emit(bethe::log::info, "report written to %s", cfg.output.path.c_str());
    }
    return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scalar products of Bethe vectors: solver, determinant and action routes, "
                 "verification suites"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_path;
    int jobs = 0;
    std::vector<std::string> methods;
    bool unchecked = false;

    for (const char* name : {"solve", "scalar", "norm", "verify", "bench"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "path to the INI config")->required();
        sub->add_option("--jobs", jobs, "worker cap for parallel stages");
        sub->add_option("--output", output_path, "write the report here instead of stdout");
        if (std::string(name) == "scalar")
            sub->add_option("--methods", methods,
                            "comma-free list of methods: det hny:<m> sum action oracle")
                ->delimiter(',');
        sub->add_flag("--unchecked", unchecked, "skip the on-shell precondition check");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return run(app.get_subcommands().front()->get_name(), config_path, jobs, output_path,
                   methods, unchecked);
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
}
