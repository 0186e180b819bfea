#include "nlch/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nlch/errors.hpp"
#include "nlch/ops.hpp"

namespace nlch {

using nlohmann::json;

namespace {

double get_num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<double>();
}

// "auto" or a number; negative marks auto
double get_num_or_auto(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() == "auto") return -1.0;
        throw ConfigError(std::string("expected number or \"auto\" for ") + key);
    }
    return v.get<double>();
}

} // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    try {
        if (j.contains("problem")) {
            const std::string p = j.at("problem").get<std::string>();
            if (p == "relaxation")
                c.problem = ProblemKind::relaxation;
            else if (p == "limit")
                c.problem = ProblemKind::limit;
            else
                throw ConfigError("problem must be \"relaxation\" or \"limit\"");
        }
        if (j.contains("domain")) {
            const auto& d = j.at("domain");
            c.dim = d.value("dim", 1);
            if (d.contains("lengths")) c.lengths = d.at("lengths").get<std::vector<double>>();
            if (d.contains("n")) c.n = d.at("n").get<std::vector<int>>();
        }
        if (j.contains("kernel")) {
            const auto& k = j.at("kernel");
            const std::string shape = k.value("shape", std::string("gaussian"));
            if (shape == "gaussian") {
                c.kernel.family = KernelShape::Family::gaussian;
                c.kernel.width = get_num(k, "width", 0.1);
            } else if (shape == "top_hat") {
                c.kernel.family = KernelShape::Family::top_hat;
                c.kernel.width = get_num(k, "radius", 0.1);
            } else {
                throw ConfigError("kernel shape must be \"gaussian\" or \"top_hat\"");
            }
            c.kernel.amplitude = get_num(k, "amplitude", 1.0);
        }
        if (j.contains("potential")) {
            const auto& p = j.at("potential");
            const std::string family = p.value("family", std::string("stabilized_double_well"));
            if (family != "stabilized_double_well" && family != "double_well")
                throw ConfigError("potential family must be the (stabilized) double well");
            c.potential.kappa = get_num(p, "kappa", family == "double_well" ? 0.0 : 2.5);
            c.potential.s_max = get_num(p, "s_max", 2.0);
            c.potential.samples = static_cast<int>(get_num(p, "samples", 4001));
            c.potential.p = get_num(p, "p", 4.0 / 3.0);
            c.potential.q = get_num(p, "q", 1.0);
        }
        if (j.contains("params")) {
            const auto& p = j.at("params");
            c.params.alpha = get_num(p, "alpha", c.params.alpha);
            c.params.epsilon = get_num(p, "epsilon", c.params.epsilon);
            c.params.delta = get_num(p, "delta", c.params.delta);
            c.params.delta0 = get_num(p, "delta0", c.params.delta0);
            c.params.m = get_num(p, "m", c.params.m);
            c.params.dt = get_num(p, "dt", c.params.dt);
            c.params.T = get_num(p, "T", c.params.T);
            c.params.stabilizer = get_num_or_auto(p, "stabilizer", -1.0);
        }
        if (j.contains("initial")) {
            const auto& i = j.at("initial");
            const std::string type = i.value("type", std::string("seeded_random"));
            if (type == "homogeneous") {
                c.initial.type = InitialSpec::Type::homogeneous;
                c.initial.M = get_num(i, "M", 0.0);
                c.initial.N = get_num(i, "N", 0.0);
            } else if (type == "cosine_modes") {
                c.initial.type = InitialSpec::Type::cosine_modes;
                if (i.contains("phi_amplitudes"))
                    c.initial.phi_amplitudes = i.at("phi_amplitudes").get<std::vector<double>>();
                if (i.contains("theta_amplitudes"))
                    c.initial.theta_amplitudes =
                        i.at("theta_amplitudes").get<std::vector<double>>();
                c.initial.phi_mean = get_num(i, "phi_mean", 0.0);
                c.initial.theta_mean = get_num(i, "theta_mean", 0.0);
            } else if (type == "seeded_random") {
                c.initial.type = InitialSpec::Type::seeded_random;
                c.initial.seed = i.value("seed", std::uint64_t{1});
                c.initial.amplitude = get_num(i, "amplitude", 0.1);
                c.initial.cutoff = static_cast<int>(get_num(i, "cutoff", 8));
                c.initial.phi_mean = get_num(i, "phi_mean", 0.0);
                c.initial.theta_mean = get_num(i, "theta_mean", 0.0);
            } else {
                throw ConfigError("initial type must be homogeneous, cosine_modes or "
                                  "seeded_random");
            }
        }
        if (j.contains("output")) {
            const auto& o = j.at("output");
            if (o.contains("directory"))
                c.output_dir = o.at("directory").get<std::string>();
            c.snapshot_stride = static_cast<int>(get_num(o, "snapshot_stride", 100));
        }
        if (j.contains("lyapunov")) {
            const auto& l = j.at("lyapunov");
            c.lyapunov.xi = get_num(l, "xi", 0.1);
            c.lyapunov.tau = get_num(l, "tau", 0.05);
            const double shift = get_num_or_auto(l, "C_F_shift", -1.0);
            c.lyapunov_auto_shift = shift < 0.0;
            c.lyapunov.C_F_shift = c.lyapunov_auto_shift ? 0.0 : shift;
        }
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            if (s.contains("pairs")) {
                for (const auto& pr : s.at("pairs")) {
                    if (!pr.is_array() || pr.size() != 2)
                        throw ConfigError("sweep pairs must be [alpha, epsilon] arrays");
                    c.sweep.pairs.emplace_back(pr.at(0).get<double>(), pr.at(1).get<double>());
                }
            }
            if (s.contains("diagonal")) {
                for (const auto& v : s.at("diagonal")) {
                    const double x = v.get<double>();
                    c.sweep.pairs.emplace_back(x, x);
                }
            }
        }
        if (j.contains("dissipate")) {
            const auto& d = j.at("dissipate");
            if (d.contains("amplitudes"))
                c.dissipate.amplitudes = d.at("amplitudes").get<std::vector<double>>();
            c.dissipate.T = get_num(d, "T", c.dissipate.T);
            const double rad = get_num_or_auto(d, "radius", -1.0);
            if (rad >= 0.0) c.dissipate.radius = rad;
        }
        if (j.contains("converge")) {
            c.slope_threshold = get_num(j.at("converge"), "slope_threshold", 0.9);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    c.validate();
    return c;
}

std::string RunConfig::to_json_text() const {
    json j;
    j["problem"] = problem == ProblemKind::relaxation ? "relaxation" : "limit";
    j["domain"] = {{"dim", dim}, {"lengths", lengths}, {"n", n}};
    if (kernel.family == KernelShape::Family::gaussian)
        j["kernel"] = {{"shape", "gaussian"}, {"amplitude", kernel.amplitude},
                       {"width", kernel.width}};
    else
        j["kernel"] = {{"shape", "top_hat"}, {"amplitude", kernel.amplitude},
                       {"radius", kernel.width}};
    j["potential"] = {{"family", "stabilized_double_well"}, {"kappa", potential.kappa},
                      {"s_max", potential.s_max}, {"samples", potential.samples},
                      {"p", potential.p}, {"q", potential.q}};
    j["params"] = {{"alpha", params.alpha}, {"epsilon", params.epsilon},
                   {"delta", params.delta}, {"delta0", params.delta0}, {"m", params.m},
                   {"dt", params.dt}, {"T", params.T}};
    if (params.stabilizer >= 0.0)
        j["params"]["stabilizer"] = params.stabilizer;
    else
        j["params"]["stabilizer"] = "auto";
    switch (initial.type) {
        case InitialSpec::Type::homogeneous:
            j["initial"] = {{"type", "homogeneous"}, {"M", initial.M}, {"N", initial.N}};
            break;
        case InitialSpec::Type::cosine_modes:
            j["initial"] = {{"type", "cosine_modes"},
                            {"phi_amplitudes", initial.phi_amplitudes},
                            {"theta_amplitudes", initial.theta_amplitudes},
                            {"phi_mean", initial.phi_mean},
                            {"theta_mean", initial.theta_mean}};
            break;
        case InitialSpec::Type::seeded_random:
            j["initial"] = {{"type", "seeded_random"}, {"seed", initial.seed},
                            {"amplitude", initial.amplitude}, {"cutoff", initial.cutoff},
                            {"phi_mean", initial.phi_mean}, {"theta_mean", initial.theta_mean}};
            break;
    }
    j["output"] = {{"directory", output_dir.string()}, {"snapshot_stride", snapshot_stride}};
    j["lyapunov"] = {{"xi", lyapunov.xi}, {"tau", lyapunov.tau}};
    if (lyapunov_auto_shift)
        j["lyapunov"]["C_F_shift"] = "auto";
    else
        j["lyapunov"]["C_F_shift"] = lyapunov.C_F_shift;
    if (!sweep.pairs.empty()) {
        json arr = json::array();
        for (const auto& [a, e] : sweep.pairs) arr.push_back({a, e});
        j["sweep"] = {{"pairs", arr}};
    }
    j["dissipate"] = {{"amplitudes", dissipate.amplitudes}, {"T", dissipate.T}};
    if (dissipate.radius)
        j["dissipate"]["radius"] = *dissipate.radius;
    else
        j["dissipate"]["radius"] = "auto";
    j["converge"] = {{"slope_threshold", slope_threshold}};
    return j.dump(2) + "\n";
}

void RunConfig::validate() const {
    if (dim != 1 && dim != 2) throw ConfigError("domain dim must be 1 or 2");
    if (lengths.size() < static_cast<std::size_t>(dim) ||
        n.size() < static_cast<std::size_t>(dim))
        throw ConfigError("domain lengths/n must list one entry per axis");
    if (kernel.amplitude < 0.0 || kernel.width <= 0.0)
        throw ConfigError("kernel parameters must be positive");
    if (potential.kappa < 0.0) throw ConfigError("kappa must be nonnegative");
    if (potential.s_max <= 0.0 || potential.samples < 3)
        throw ConfigError("potential sample range is empty");
    if (params.dt <= 0.0 || params.T <= 0.0) throw ConfigError("dt and T must be positive");
    if (params.delta < 0.0 || params.delta0 <= 0.0 || params.delta > params.delta0)
        throw ConfigError("delta must lie in [0, delta0]");
    if (problem == ProblemKind::relaxation)
        params.validate_relaxation();
    else
        params.validate_limit();
    if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
    lyapunov.validate();

    double m_phi = 0.0, m_theta = 0.0;
    switch (initial.type) {
        case InitialSpec::Type::homogeneous:
            m_phi = std::abs(initial.M);
            m_theta = std::abs(initial.N);
            break;
        default:
            m_phi = std::abs(initial.phi_mean);
            m_theta = std::abs(initial.theta_mean);
            break;
    }
    if (m_phi > params.m || m_theta > params.m)
        throw ConfigError("params.m must bound the initial means");
}

DomainPtr make_domain(const RunConfig& cfg) {
    return Domain::make(cfg.dim, cfg.lengths, cfg.n);
}

namespace {

// Low-pass random field: uniform coefficients on the tensor modes below the
// cutoff, weighted down with the mode order. Fully determined by the seed.
Field seeded_field(const DomainPtr& dom, std::uint64_t seed, double amplitude, int cutoff,
                   double mean_value) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> c(dom->cells, 0.0);
    const int kx_max = std::min(cutoff, dom->n[0] - 1);
    const int ky_max = (dom->dim == 2) ? std::min(cutoff, dom->n[1] - 1) : 0;
    for (int ky = 0; ky <= ky_max; ++ky) {
        for (int kx = 0; kx <= kx_max; ++kx) {
            if (kx == 0 && ky == 0) continue;
            const double order = std::hypot(static_cast<double>(kx), static_cast<double>(ky));
            c[dom->index(kx, ky)] = uni(rng) / (1.0 + order * order);
        }
    }
    Field out;
    from_coeffs(dom, c, out);
    const double scale = amplitude / std::max(1e-30, nlch::max_abs(out));
    ops::scale(scale, out.data(), out.size());
    ops::add_scalar(mean_value - mean(out), out.data(), out.size());
    return out;
}

Field modes_field(const DomainPtr& dom, const std::vector<double>& amps, double mean_value) {
    Field out(dom, mean_value);
    for (std::size_t k = 0; k < amps.size(); ++k) {
        if (amps[k] == 0.0) continue;
        const int mode = static_cast<int>(k) + 1;
        Field mx = cosine_mode(dom, mode, 0, amps[k]);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += mx[i];
        if (dom->dim == 2) {
            Field my = cosine_mode(dom, 0, mode, amps[k]);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += my[i];
        }
    }
    return out;
}

} // namespace

Field make_initial_phi(const DomainPtr& dom, const InitialSpec& spec, double scale) {
    switch (spec.type) {
        case InitialSpec::Type::homogeneous:
            return Field(dom, spec.M);
        case InitialSpec::Type::cosine_modes: {
            std::vector<double> amps = spec.phi_amplitudes;
            for (double& a : amps) a *= scale;
            return modes_field(dom, amps, spec.phi_mean);
        }
        case InitialSpec::Type::seeded_random:
        default:
            return seeded_field(dom, spec.seed, spec.amplitude * scale, spec.cutoff,
                                spec.phi_mean);
    }
}

Field make_initial_theta(const DomainPtr& dom, const InitialSpec& spec, double scale) {
    switch (spec.type) {
        case InitialSpec::Type::homogeneous:
            return Field(dom, spec.N);
        case InitialSpec::Type::cosine_modes: {
            std::vector<double> amps = spec.theta_amplitudes;
            for (double& a : amps) a *= scale;
            return modes_field(dom, amps, spec.theta_mean);
        }
        case InitialSpec::Type::seeded_random:
        default:
            return seeded_field(dom, spec.seed ^ 0x9e3779b97f4a7c15ull, spec.amplitude * scale,
                                spec.cutoff, spec.theta_mean);
    }
}

} // namespace nlch
