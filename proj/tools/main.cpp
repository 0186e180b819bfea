#include <string>

#include <CLI11.hpp>

#include "nlch/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nonlocal Cahn-Hilliard relaxation/limit simulation harness"};
    app.require_subcommand(1);

    std::string config_path;
    nlch::HarnessOptions opt;
    std::string out_dir;
    double slope = -1.0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides the config)");
        cmd->add_flag("--override-hypotheses", opt.override_hypotheses,
                      "run even if a hypothesis check fails");
        cmd->add_option("--threads", opt.threads, "worker threads for sweeps")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--quiet", opt.quiet, "suppress progress output");
        return cmd;
    };

    add_common(app.add_subcommand("hypotheses", "audit (H1)-(H6) and write the report"));
    add_common(app.add_subcommand("simulate", "integrate the configured problem"));
    auto* conv = add_common(
        app.add_subcommand("converge", "sweep (alpha, epsilon) and fit the trajectory-"
                                       "difference rate"));
    conv->add_option("--slope-threshold", slope, "required log-log slope of sup D");
    add_common(app.add_subcommand("dissipate", "long-horizon decay and absorbing-set study"));

    CLI11_PARSE(app, argc, argv);

    if (!out_dir.empty()) opt.out_dir = out_dir;
    if (slope >= 0.0) opt.slope_threshold = slope;

    const std::string command = app.get_subcommands().front()->get_name();
    return nlch::run_command(command, config_path, opt);
}
