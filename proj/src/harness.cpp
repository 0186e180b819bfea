#include "nlch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "nlch/diagnostics.hpp"
#include "nlch/errors.hpp"
#include "nlch/io.hpp"
#include "nlch/ops.hpp"

namespace nlch {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct Setup {
    DomainPtr dom;
    KernelData K;
    Potential P;
    HypothesisReport hyp;
};

Setup build_setup(const RunConfig& cfg) {
    Setup s;
    s.dom = make_domain(cfg);
    s.K = build_kernel(s.dom, cfg.kernel);
    s.P = Potential{cfg.potential};
    s.hyp = verify_hypotheses(s.P, s.K);
    return s;
}

json hypothesis_json(const HypothesisReport& r) {
    json j;
    j["constants"] = {{"c0", r.c0}, {"c1", r.c1}, {"c2", r.c2}, {"c3", r.c3},
                      {"c4", r.c4}, {"c5", r.c5}, {"c6", r.c6}, {"p", r.p},
                      {"q", r.q},   {"c_J", r.c_J}, {"d_J", r.d_J}, {"a_0", r.a_0},
                      {"a_min", r.a_min}, {"a_star", r.a_star}, {"h6_margin", r.h6_margin}};
    json items = json::array();
    for (const auto& it : r.items) {
        json e = {{"name", it.name}, {"pass", it.pass}, {"detail", it.detail}};
        if (it.witness_s) e["witness_s"] = *it.witness_s;
        items.push_back(e);
    }
    j["checks"] = items;
    j["all_pass"] = r.all_pass();
    return j;
}

fs::path resolve_out(const RunConfig& cfg, const HarnessOptions& opt) {
    fs::path dir = opt.out_dir.value_or(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

int gate_hypotheses(const Setup& s, const HarnessOptions& opt) {
    if (s.hyp.all_pass() || opt.override_hypotheses) return exit_code::ok;
    for (const auto& it : s.hyp.items)
        if (!it.pass && !opt.quiet)
            std::cerr << "hypothesis " << it.name << " failed: " << it.detail << "\n";
    return exit_code::hypothesis;
}

SnapshotMeta meta_for(const RunConfig& cfg, double time, std::int64_t step,
                      const std::string& field) {
    SnapshotMeta m;
    m.dim = cfg.dim;
    m.n.assign(cfg.n.begin(), cfg.n.begin() + cfg.dim);
    m.lengths.assign(cfg.lengths.begin(), cfg.lengths.begin() + cfg.dim);
    m.time = time;
    m.step = step;
    m.field = field;
    return m;
}

} // namespace

RateFit fit_rate(std::vector<std::pair<double, double>> pts) {
    std::erase_if(pts, [](const auto& p) { return !(p.second > 0.0) || !(p.first > 0.0); });
    if (pts.size() < 3)
        throw ConfigError("rate fit needs at least 3 sweep points with positive distance");
    std::sort(pts.begin(), pts.end());
    std::vector<double> lx, ly;
    lx.reserve(pts.size());
    ly.reserve(pts.size());
    for (const auto& [x, y] : pts) {
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    const LinearFit f = linear_fit(lx, ly);
    return RateFit{f.slope, f.intercept, f.r2, f.n};
}

// ---------------------------------------------------------------------------
// hypotheses
// ---------------------------------------------------------------------------

int cmd_hypotheses(const RunConfig& cfg, const HarnessOptions& opt) {
    Setup s = build_setup(cfg);
    const fs::path dir = resolve_out(cfg, opt);
    const json j = hypothesis_json(s.hyp);
    write_text_file(dir / "hypotheses.json", j.dump(2) + "\n");
    if (!opt.quiet) {
        for (const auto& it : s.hyp.items)
            std::cout << (it.pass ? "pass " : "FAIL ") << it.name << "  " << it.detail << "\n";
        std::cout << "report: " << (dir / "hypotheses.json").string() << "\n";
    }
    return s.hyp.all_pass() ? exit_code::ok : exit_code::hypothesis;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, const HarnessOptions& opt) {
    Setup s = build_setup(cfg);
    if (int rc = gate_hypotheses(s, opt); rc != exit_code::ok) return rc;

    const fs::path dir = resolve_out(cfg, opt);
    write_text_file(dir / "config.json", cfg.to_json_text());
    write_text_file(dir / "hypotheses.json", hypothesis_json(s.hyp).dump(2) + "\n");

    const bool relaxation = cfg.problem == ProblemKind::relaxation;
    State st;
    st.phi = make_initial_phi(s.dom, cfg.initial);
    if (relaxation) st.theta = make_initial_theta(s.dom, cfg.initial);
    st.mu = Field(s.dom);
    st.phi_t = Field(s.dom);

    LyapunovParams lp = cfg.lyapunov;
    if (cfg.lyapunov_auto_shift)
        lp.C_F_shift = calibrate_lyapunov_shift({st}, s.K, s.P, cfg.params.alpha,
                                                cfg.params.epsilon, lp);

    const double mu_factor =
        relaxation ? 1.0 : 1.0 / (1.0 + cfg.params.delta * cfg.params.delta);
    BalanceAccumulator balance(energy_eps(st, s.K, s.P, cfg.params.epsilon), cfg.params.alpha,
                               mu_factor);

    DiagnosticsCsv csv(dir / "diagnostics.csv");
    auto write_row = [&](const State& state) {
        const double mt = state.theta ? mean(*state.theta) : 0.0;
        const double lt = state.theta ? l2_norm(*state.theta) : 0.0;
        const double ee = energy_eps(state, s.K, s.P, cfg.params.epsilon);
        csv.row(state.t, mean(state.phi), mt, l2_norm(state.phi), vprime_norm(state.phi), lt, ee,
                balance.residual(ee),
                lyapunov(state, s.K, s.P, cfg.params.alpha, cfg.params.epsilon, lp),
                max_abs(state.phi));
    };
    auto snapshot = [&](const State& state, std::int64_t step) {
        char name[64];
        std::snprintf(name, sizeof(name), "phi_%08lld", static_cast<long long>(step));
        write_snapshot(dir / name, state.phi, meta_for(cfg, state.t, step, "phi"));
        if (state.theta) {
            std::snprintf(name, sizeof(name), "theta_%08lld", static_cast<long long>(step));
            write_snapshot(dir / name, *state.theta, meta_for(cfg, state.t, step, "theta"));
        }
    };

    const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.params.T / cfg.params.dt));
    bool range_violation = false;
    double max_range = 0.0;
    double measured_CF = 0.0;

    write_row(st);
    snapshot(st, 0);

    std::optional<RelaxationStepper> rstep;
    std::optional<LimitStepper> lstep;
    if (relaxation)
        rstep.emplace(s.K, s.P, cfg.params);
    else
        lstep.emplace(s.K, s.P, cfg.params);

    try {
        for (std::size_t n = 1; n <= steps; ++n) {
            const StepStats stats = relaxation ? rstep->step(st) : lstep->step(st);
            balance.add_step(stats, cfg.params.dt);

            const double ma = max_abs(st.phi);
            max_range = std::max(max_range, ma);
            if (ma > s.P.prm.s_max) range_violation = true;

            const double mphi = std::abs(mean(st.phi));
            const double mtheta = st.theta ? std::abs(mean(*st.theta)) : 0.0;
            if (mphi > 1e-30)
                measured_CF = std::max(
                    measured_CF,
                    (std::abs(stats.mean_mu) - cfg.params.delta0 * mtheta) / mphi);

            if (n % static_cast<std::size_t>(cfg.snapshot_stride) == 0 || n == steps) {
                write_row(st);
                snapshot(st, static_cast<std::int64_t>(n));
            }
        }
    } catch (const BlowUpError& e) {
        snapshot(st, -1); // last good state
        if (!opt.quiet) std::cerr << e.what() << "\n";
        return exit_code::blow_up;
    }

    json summary;
    summary["steps"] = steps;
    summary["final_time"] = st.t;
    summary["max_abs_phi"] = max_range;
    summary["range_violation"] = range_violation;
    summary["sample_range_s_max"] = s.P.prm.s_max;
    summary["measured_C_F"] = measured_CF;
    summary["lyapunov_shift"] = lp.C_F_shift;
    summary["stabilizer"] = cfg.params.resolve_stabilizer(s.P);
    summary["simd"] = ops::isa_name();
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");

    if (range_violation && !opt.quiet)
        std::cerr << "warning: max|phi| = " << max_range
                  << " left the hypothesis sample range [-s_max, s_max]; re-run the "
                     "hypothesis audit with a larger s_max\n";
    if (!opt.quiet) std::cout << "run directory: " << dir.string() << "\n";
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

int cmd_converge(const RunConfig& cfg, const HarnessOptions& opt) {
    if (cfg.sweep.pairs.size() < 3)
        throw ConfigError("converge needs a sweep block with at least 3 (alpha, epsilon) pairs");
    Setup s = build_setup(cfg);
    if (int rc = gate_hypotheses(s, opt); rc != exit_code::ok) return rc;

    const fs::path dir = resolve_out(cfg, opt);
    write_text_file(dir / "config.json", cfg.to_json_text());

    const Field phi0 = make_initial_phi(s.dom, cfg.initial);

    std::vector<DifferenceSeries> results(cfg.sweep.pairs.size());
    std::atomic<std::size_t> next{0};
    const int threads = std::max(1, opt.threads);
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.sweep.pairs.size()) return;
            const auto [a, e] = cfg.sweep.pairs[i];
            results[i] = run_difference(phi0, s.K, s.P, cfg.params, a, e);
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<std::pair<double, double>> pts;
    json per_pair = json::array();
    for (const auto& r : results) {
        const auto& last = r.points.back();
        per_pair.push_back({{"alpha", r.alpha},
                            {"epsilon", r.epsilon},
                            {"sup_D", r.sup_D},
                            {"D_final", last.D},
                            {"int_phit_vprime", last.int_phit_vprime},
                            {"int_alpha_phit", last.int_alpha_phit},
                            {"int_eps_theta_V", last.int_eps_theta_v},
                            {"x11_metric_final", r.x11_final}});
        if (r.alpha + r.epsilon > 0.0) pts.emplace_back(r.alpha + r.epsilon, r.sup_D);
        // per-pair distance series for post-hoc plotting
        json series = json::array();
        for (const auto& p : r.points) series.push_back({p.t, p.D});
        per_pair.back()["D_series"] = series;
    }

    const RateFit fit = fit_rate(pts);
    const double threshold = opt.slope_threshold.value_or(cfg.slope_threshold);

    // the bound is one-sided, so a non-monotone sweep is only worth a warning
    bool monotone = true;
    {
        auto sorted = pts;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
            if (sorted[i].second > sorted[i + 1].second) monotone = false;
    }

    json report;
    report["pairs"] = per_pair;
    report["fit"] = {{"slope", fit.slope},
                     {"intercept", fit.intercept},
                     {"r2", fit.r2},
                     {"n_points", fit.n_points},
                     {"norm_rate", 0.5 * fit.slope}};
    report["slope_threshold"] = threshold;
    report["monotone"] = monotone;
    report["pass"] = fit.slope >= threshold;
    report["simd"] = ops::isa_name();
    write_text_file(dir / "report.json", report.dump(2) + "\n");

    if (!opt.quiet) {
        std::cout << "sup_t D vs (alpha+epsilon): slope = " << fit.slope << ", r2 = " << fit.r2
                  << " over " << fit.n_points << " points (norm rate " << 0.5 * fit.slope
                  << ")\n";
        if (!monotone) std::cout << "warning: sup_t D is not monotone across the sweep\n";
        std::cout << "report: " << (dir / "report.json").string() << "\n";
    }
    return fit.slope >= threshold ? exit_code::ok : exit_code::threshold;
}

// ---------------------------------------------------------------------------
// dissipate
// ---------------------------------------------------------------------------

int cmd_dissipate(const RunConfig& cfg, const HarnessOptions& opt) {
    Setup s = build_setup(cfg);
    if (int rc = gate_hypotheses(s, opt); rc != exit_code::ok) return rc;

    const fs::path dir = resolve_out(cfg, opt);
    write_text_file(dir / "config.json", cfg.to_json_text());

    struct RunSeries {
        double amplitude;
        std::vector<double> t, E;
        std::vector<std::pair<double, double>> hsq;
        double tail_h = 0.0;
        double E0 = 0.0;
    };

    Params prm = cfg.params;
    prm.T = cfg.dissipate.T;
    const std::size_t steps = static_cast<std::size_t>(std::llround(prm.T / prm.dt));
    const std::size_t stride = std::max<std::size_t>(1, cfg.snapshot_stride);

    std::vector<RunSeries> runs;
    LyapunovParams lp = cfg.lyapunov;

    for (double amp : cfg.dissipate.amplitudes) {
        RunSeries rs;
        rs.amplitude = amp;
        State st;
        st.phi = make_initial_phi(s.dom, cfg.initial, amp);
        st.theta = make_initial_theta(s.dom, cfg.initial, amp);

        if (cfg.lyapunov_auto_shift && runs.empty())
            lp.C_F_shift =
                calibrate_lyapunov_shift({st}, s.K, s.P, prm.alpha, prm.epsilon, lp);

        RelaxationStepper stepper(s.K, s.P, prm);
        auto sample = [&]() {
            rs.t.push_back(st.t);
            rs.E.push_back(lyapunov(st, s.K, s.P, prm.alpha, prm.epsilon, lp));
            rs.hsq.emplace_back(st.t, h_norm_sq(st, prm.alpha, prm.epsilon));
        };
        sample();
        for (std::size_t n = 1; n <= steps; ++n) {
            stepper.step(st);
            if (n % stride == 0 || n == steps) sample();
        }
        rs.E0 = rs.E.front();
        const std::size_t tail_from = rs.hsq.size() - std::max<std::size_t>(1, rs.hsq.size() / 5);
        for (std::size_t i = tail_from; i < rs.hsq.size(); ++i)
            rs.tail_h = std::max(rs.tail_h, std::sqrt(rs.hsq[i].second));
        runs.push_back(std::move(rs));
    }

    double measured_bound = 0.0;
    for (const auto& r : runs) measured_bound = std::max(measured_bound, r.tail_h);
    const double radius = cfg.dissipate.radius.value_or(1.1 * measured_bound);

    json per_run = json::array();
    bool rates_positive = true;
    std::vector<double> entries;
    double fitted_rate_first = 0.0;
    for (const auto& r : runs) {
        const LinearFit rate = fit_decay_rate(r.t, r.E);
        if (&r == &runs.front()) fitted_rate_first = rate.slope;
        const auto entry = absorbing_entry(r.hsq, radius);
        if (!(rate.slope > 0.0)) rates_positive = false;
        per_run.push_back({{"amplitude", r.amplitude},
                           {"E0", r.E0},
                           {"decay_rate", rate.slope},
                           {"decay_fit_r2", rate.r2},
                           {"entry_time", entry ? json(*entry) : json(nullptr)},
                           {"tail_h_norm", r.tail_h},
                           {"t0_from_fit", rate.slope > 0.0 && r.E0 > 1.0
                                               ? std::log(r.E0) / rate.slope
                                               : 0.0}});
        entries.push_back(entry ? *entry : std::numeric_limits<double>::infinity());
    }

    bool entries_monotone = true;
    for (std::size_t i = 0; i + 1 < entries.size(); ++i)
        if (entries[i] > entries[i + 1] + 1e-12) entries_monotone = false;

    json report;
    report["runs"] = per_run;
    report["radius"] = radius;
    report["measured_long_time_bound"] = measured_bound;
    report["lyapunov_shift"] = lp.C_F_shift;
    report["nu3_fit"] = fitted_rate_first;
    report["entry_times_monotone"] = entries_monotone;
    report["pass"] = rates_positive;
    write_text_file(dir / "report.json", report.dump(2) + "\n");

    if (!opt.quiet) {
        std::cout << "absorbing radius " << radius << " (measured bound " << measured_bound
                  << ")\n";
        for (std::size_t i = 0; i < runs.size(); ++i)
            std::cout << "amplitude " << runs[i].amplitude << ": entry t = " << entries[i]
                      << "\n";
        std::cout << "report: " << (dir / "report.json").string() << "\n";
    }
    return rates_positive ? exit_code::ok : exit_code::threshold;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

int run_command(const std::string& command, const std::filesystem::path& config_path,
                const HarnessOptions& opt) {
    try {
        const RunConfig cfg = RunConfig::from_file(config_path);
        if (command == "hypotheses") return cmd_hypotheses(cfg, opt);
        if (command == "simulate") return cmd_simulate(cfg, opt);
        if (command == "converge") return cmd_converge(cfg, opt);
        if (command == "dissipate") return cmd_dissipate(cfg, opt);
        std::cerr << "unknown command: " << command << "\n";
        return exit_code::config;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_code::config;
    } catch (const HypothesisError& e) {
        std::cerr << e.what() << "\n";
        return exit_code::hypothesis;
    } catch (const BlowUpError& e) {
        std::cerr << e.what() << "\n";
        return exit_code::blow_up;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::config;
    }
}

} // namespace nlch
