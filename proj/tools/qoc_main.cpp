// Command-line front end: run the free-decay, constant-control, and
// constrained-optimization experiments and emit CSV time series.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qoc/models.hpp"
#include "qoc/run.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    int steps = 0;
    int max_iters = -1;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file (defaults when omitted)");
    cmd->add_option("--out", flags.out_dir, "Output directory");
    cmd->add_option("--steps", flags.steps, "Override the number of grid steps");
    cmd->add_option("--max-iters", flags.max_iters, "Override the sweep iteration cap");
    cmd->add_flag("--quiet", flags.quiet, "Suppress the one-line run report");
}

int load_and_run(const CommonFlags& flags, qoc::RunMode mode) {
    qoc::ExperimentConfig cfg;
    try {
        cfg = flags.config_path.empty() ? qoc::default_experiment()
                                        : qoc::load_config(flags.config_path);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.steps > 0) cfg.steps = flags.steps;
    if (flags.max_iters >= 0) cfg.solver.max_iters = flags.max_iters;
    cfg.mode = mode;

    if (mode == qoc::RunMode::optimize) return qoc::cmd_optimize(cfg, flags.quiet);
    return qoc::cmd_simulate(cfg, mode, flags.quiet);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open-system coherence control: Lindblad simulation and "
                 "state-constrained minimum-energy control"};
    app.require_subcommand(1);

    CommonFlags free_flags;
    CLI::App* cmd_free =
        app.add_subcommand("simulate-free", "Evolve the system with no control field");
    add_common(cmd_free, free_flags);

    CommonFlags const_flags;
    CLI::App* cmd_const =
        app.add_subcommand("simulate-const", "Evolve the system with a constant-amplitude drive");
    add_common(cmd_const, const_flags);

    CommonFlags opt_flags;
    CLI::App* cmd_opt = app.add_subcommand(
        "optimize", "Solve the coherence-constrained minimum-energy control problem");
    add_common(cmd_opt, opt_flags);

    CLI11_PARSE(app, argc, argv);

    if (cmd_free->parsed()) return load_and_run(free_flags, qoc::RunMode::free_evolution);
    if (cmd_const->parsed()) return load_and_run(const_flags, qoc::RunMode::constant_control);
    return load_and_run(opt_flags, qoc::RunMode::optimize);
}
