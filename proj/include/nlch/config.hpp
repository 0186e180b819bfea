#pragma once

// Run configuration: a single JSON file describing the grid, the kernel,
// the potential, the solver parameters, the initial data, the output
// location and the sweep/dissipate campaigns. See docs/config.md for the
// schema and configs/ for shipped examples.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlch/diagnostics.hpp"
#include "nlch/dynamics.hpp"

namespace nlch {

enum class ProblemKind { relaxation, limit };

struct InitialSpec {
    enum class Type { homogeneous, cosine_modes, seeded_random };
    Type type = Type::seeded_random;
    // homogeneous
    double M = 0.0; // phi level
    double N = 0.0; // theta level
    // cosine_modes: amplitude of axis mode k+1 for entry k
    std::vector<double> phi_amplitudes;
    std::vector<double> theta_amplitudes;
    // seeded_random: low-pass random cosine data, reproducible by seed
    std::uint64_t seed = 1;
    double amplitude = 0.1;
    int cutoff = 8;
    double phi_mean = 0.0;
    double theta_mean = 0.0;
};

struct SweepSpec {
    std::vector<std::pair<double, double>> pairs; // (alpha, epsilon)
};

struct DissipateSpec {
    std::vector<double> amplitudes{0.4, 0.8, 1.6};
    double T = 30.0;
    std::optional<double> radius; // absorbing radius; measured bound + 10% if unset
};

struct RunConfig {
    ProblemKind problem = ProblemKind::relaxation;

    int dim = 1;
    std::vector<double> lengths{1.0};
    std::vector<int> n{64};

    KernelShape kernel;
    PotentialParams potential;
    Params params;
    InitialSpec initial;

    std::filesystem::path output_dir = "runs/out";
    int snapshot_stride = 100;

    LyapunovParams lyapunov;
    bool lyapunov_auto_shift = true;

    SweepSpec sweep;
    DissipateSpec dissipate;
    double slope_threshold = 0.9;

    static RunConfig from_file(const std::filesystem::path& path);
    static RunConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
    void validate() const;
};

DomainPtr make_domain(const RunConfig& cfg);
Field make_initial_phi(const DomainPtr& dom, const InitialSpec& spec, double scale = 1.0);
Field make_initial_theta(const DomainPtr& dom, const InitialSpec& spec, double scale = 1.0);

} // namespace nlch
