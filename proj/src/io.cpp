#include "nlch/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <sstream>

#include <json.hpp>

#include "nlch/errors.hpp"

namespace nlch {

using nlohmann::json;

namespace {

static_assert(sizeof(double) == 8, "snapshots assume 64-bit IEEE doubles");

void byteswap_if_needed(std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        (void)v;
    } else {
        for (double& x : v) {
            std::uint64_t u;
            std::memcpy(&u, &x, 8);
            u = __builtin_bswap64(u);
            std::memcpy(&x, &u, 8);
        }
    }
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

void write_snapshot(const std::filesystem::path& stem, const Field& f, const SnapshotMeta& meta) {
    {
        std::vector<double> payload = f.v;
        byteswap_if_needed(payload);
        std::ofstream raw(stem.string() + ".f64", std::ios::binary);
        if (!raw) throw std::runtime_error("cannot write snapshot " + stem.string());
        raw.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size() * sizeof(double)));
    }
    json j;
    j["dims"] = meta.dim;
    j["n"] = meta.n;
    j["lengths"] = meta.lengths;
    j["dtype"] = "float64";
    j["byte_order"] = "little";
    j["time"] = meta.time;
    j["step"] = meta.step;
    j["field"] = meta.field;
    write_text_file(stem.string() + ".meta.json", j.dump(2) + "\n");
}

Field read_snapshot(const std::filesystem::path& stem, const DomainPtr& dom,
                    SnapshotMeta* meta_out) {
    std::ifstream metaf(stem.string() + ".meta.json");
    if (!metaf) throw std::runtime_error("missing snapshot sidecar for " + stem.string());
    json j = json::parse(metaf);
    SnapshotMeta meta;
    meta.dim = j.at("dims").get<int>();
    meta.n = j.at("n").get<std::vector<int>>();
    meta.lengths = j.at("lengths").get<std::vector<double>>();
    meta.time = j.at("time").get<double>();
    meta.step = j.value("step", std::int64_t{0});
    meta.field = j.value("field", std::string{});
    if (meta.dim != dom->dim)
        throw std::runtime_error("snapshot dimension does not match the domain");
    std::size_t cells = 1;
    for (int ni : meta.n) cells *= static_cast<std::size_t>(ni);
    if (cells != dom->cells) throw std::runtime_error("snapshot size does not match the domain");

    Field f(dom);
    std::ifstream raw(stem.string() + ".f64", std::ios::binary);
    if (!raw) throw std::runtime_error("missing snapshot payload for " + stem.string());
    raw.read(reinterpret_cast<char*>(f.data()),
             static_cast<std::streamsize>(cells * sizeof(double)));
    if (static_cast<std::size_t>(raw.gcount()) != cells * sizeof(double))
        throw std::runtime_error("snapshot payload truncated: " + stem.string());
    byteswap_if_needed(f.v);
    if (meta_out) *meta_out = meta;
    return f;
}

DiagnosticsCsv::DiagnosticsCsv(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    out_ << header << "\n";
}

void DiagnosticsCsv::row(double t, double mean_phi, double mean_theta, double l2_phi,
                         double vprime_phi, double l2_theta, double energy_eps,
                         double balance_residual, double lyapunov_E, double max_abs_phi) {
    out_ << format_g17(t) << ',' << format_g17(mean_phi) << ',' << format_g17(mean_theta) << ','
         << format_g17(l2_phi) << ',' << format_g17(vprime_phi) << ',' << format_g17(l2_theta)
         << ',' << format_g17(energy_eps) << ',' << format_g17(balance_residual) << ','
         << format_g17(lyapunov_E) << ',' << format_g17(max_abs_phi) << '\n';
    out_.flush();
}

std::vector<CsvRow> read_diagnostics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path.string());
    if (line != DiagnosticsCsv::header)
        throw std::runtime_error("unexpected csv header in " + path.string());
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CsvRow r{};
        double* cols[] = {&r.t,       &r.mean_phi, &r.mean_theta,       &r.l2_phi,
                          &r.vprime_phi, &r.l2_theta, &r.energy_eps,
                          &r.balance_residual, &r.lyapunov_E, &r.max_abs_phi};
        std::stringstream ss(line);
        std::string cell;
        for (double* c : cols) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error("short csv row in " + path.string());
            *c = std::stod(cell);
        }
        rows.push_back(r);
    }
    return rows;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

} // namespace nlch
