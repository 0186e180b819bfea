#pragma once

// On-disk formats: raw little-endian float64 field snapshots with a JSON
// sidecar, the fixed-header diagnostics CSV, and JSON reports.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nlch/domain.hpp"

namespace nlch {

struct SnapshotMeta {
    int dim = 1;
    std::vector<int> n;
    std::vector<double> lengths;
    double time = 0.0;
    std::int64_t step = 0;
    std::string field; // "phi" or "theta"
};

// Writes <stem>.f64 (raw doubles, little-endian) and <stem>.meta.json.
void write_snapshot(const std::filesystem::path& stem, const Field& f, const SnapshotMeta& meta);

// Reads the pair back; the field is attached to the supplied domain, which
// must match the sidecar.
Field read_snapshot(const std::filesystem::path& stem, const DomainPtr& dom,
                    SnapshotMeta* meta_out = nullptr);

// diagnostics.csv: fixed header, one row per stride
class DiagnosticsCsv {
public:
    explicit DiagnosticsCsv(const std::filesystem::path& path);
    void row(double t, double mean_phi, double mean_theta, double l2_phi, double vprime_phi,
             double l2_theta, double energy_eps, double balance_residual, double lyapunov_E,
             double max_abs_phi);
    static constexpr const char* header =
        "t,mean_phi,mean_theta,l2_phi,vprime_phi,l2_theta,energy_eps,balance_residual,"
        "lyapunov_E,max_abs_phi";

private:
    std::ofstream out_;
};

struct CsvRow {
    double t, mean_phi, mean_theta, l2_phi, vprime_phi, l2_theta, energy_eps, balance_residual,
        lyapunov_E, max_abs_phi;
};
std::vector<CsvRow> read_diagnostics_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace nlch
