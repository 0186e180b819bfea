#pragma once

// Campaign drivers behind the CLI subcommands. Each returns a process exit
// code: 0 success, 2 config error, 3 hypothesis failure, 4 numerical
// blow-up, 5 acceptance-threshold failure.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlch/config.hpp"

namespace nlch {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int hypothesis = 3;
inline constexpr int blow_up = 4;
inline constexpr int threshold = 5;
} // namespace exit_code

struct HarnessOptions {
    std::optional<std::filesystem::path> out_dir;
    bool override_hypotheses = false;
    int threads = 1;
    std::optional<double> slope_threshold;
    bool quiet = false;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n_points = 0;
};

// Least-squares log-log fit of sup D against (alpha + epsilon); points with
// D <= 0 are excluded and at least three must remain. Points are sorted
// before fitting, so any permutation of the sweep yields the same fit.
RateFit fit_rate(std::vector<std::pair<double, double>> x_and_supD);

int cmd_hypotheses(const RunConfig& cfg, const HarnessOptions& opt);
int cmd_simulate(const RunConfig& cfg, const HarnessOptions& opt);
int cmd_converge(const RunConfig& cfg, const HarnessOptions& opt);
int cmd_dissipate(const RunConfig& cfg, const HarnessOptions& opt);

// Loads the config and dispatches; maps exceptions onto exit codes.
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const HarnessOptions& opt);

} // namespace nlch
