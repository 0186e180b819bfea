#include "nlch/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "nlch/errors.hpp"
#include "nlch/ops.hpp"

namespace nlch {

double energy_eps(const State& s, const KernelData& K, const Potential& P, double epsilon) {
    double e = nonlocal_pair_energy(K, s.phi) + P.F_integral(s.phi);
    if (epsilon != 0.0 && s.theta) {
        const double nt = l2_norm(*s.theta);
        e += 0.5 * epsilon * nt * nt;
    }
    return e;
}

double h_norm_sq(const State& s, double alpha, double epsilon) {
    const double vp = vprime_norm(s.phi);
    double out = vp * vp;
    if (alpha != 0.0) {
        const double l2 = l2_norm(s.phi);
        out += alpha * l2 * l2;
    }
    if (epsilon != 0.0 && s.theta) {
        const double lt = l2_norm(*s.theta);
        out += epsilon * lt * lt;
    }
    return out;
}

double h_norm(const State& s, double alpha, double epsilon) {
    return std::sqrt(h_norm_sq(s, alpha, epsilon));
}

double x_metric(const State& a, const State& b, const Potential& P, double alpha,
                double epsilon) {
    Field dphi(a.phi.dom);
    for (std::size_t i = 0; i < dphi.size(); ++i) dphi[i] = a.phi[i] - b.phi[i];
    const double vp = vprime_norm(dphi);
    double nsq = vp * vp;
    if (alpha != 0.0) {
        const double l2 = l2_norm(dphi);
        nsq += alpha * l2 * l2;
    }
    if (epsilon != 0.0 && a.theta && b.theta) {
        Field dth(a.phi.dom);
        for (std::size_t i = 0; i < dth.size(); ++i) dth[i] = (*a.theta)[i] - (*b.theta)[i];
        const double lt = l2_norm(dth);
        nsq += epsilon * lt * lt;
    }
    return std::sqrt(nsq) + std::sqrt(std::abs(P.F_integral(a.phi) - P.F_integral(b.phi)));
}

void LyapunovParams::validate() const {
    if (!(0.0 < tau && tau < xi && xi < 1.0))
        throw ConfigError("lyapunov parameters must satisfy 0 < tau < xi < 1");
}

double lyapunov(const State& s, const KernelData& K, const Potential& P, double alpha,
                double epsilon, const LyapunovParams& lp) {
    const Field ph = hat(s.phi);
    const double vp = vprime_norm(ph);
    const double l2h = l2_norm(ph);
    double e = lp.xi * vp * vp + lp.xi * alpha * l2h * l2h;

    // |sqrt(a) phi|^2 by quadrature of a(x) phi(x)^2
    e += s.phi.dom->cell_volume *
         ops::weighted_sq_sum(K.a_field.data(), s.phi.data(), s.phi.size());

    if (epsilon != 0.0 && s.theta) {
        const Field th = hat(*s.theta);
        const double l2t = l2_norm(th);
        e += epsilon * l2t * l2t;
    }

    e += 2.0 * P.F_integral(s.phi);
    e -= inner(convolve(K, s.phi), ph);
    return e + lp.C_F_shift;
}

double calibrate_lyapunov_shift(const std::vector<State>& states, const KernelData& K,
                                const Potential& P, double alpha, double epsilon,
                                const LyapunovParams& lp) {
    LyapunovParams unshifted = lp;
    unshifted.C_F_shift = 0.0;
    double lo = 0.0;
    for (const auto& s : states) lo = std::min(lo, lyapunov(s, K, P, alpha, epsilon, unshifted));
    return std::max(0.0, -lo) + 1.0;
}

std::optional<double> absorbing_entry(const std::vector<std::pair<double, double>>& series,
                                      double radius) {
    const double r2 = radius * radius;
    std::optional<double> entry;
    for (const auto& [t, hsq] : series) {
        if (hsq <= r2) {
            if (!entry) entry = t;
        } else {
            entry.reset();
        }
    }
    return entry;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit f;
    f.n = static_cast<int>(x.size());
    if (x.size() != y.size() || x.size() < 2) return f;
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) return f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
    }
    f.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

LinearFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& E,
                         double window_fraction) {
    LinearFit f;
    if (t.size() != E.size() || t.size() < 3) return f;
    const double floor = *std::min_element(E.begin(), E.end());
    const double excess0 = E.front() - floor;
    if (excess0 <= 0.0) return f;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ex = E[i] - floor;
        if (ex < window_fraction * excess0) break;
        xs.push_back(t[i]);
        ys.push_back(std::log(ex));
    }
    if (xs.size() < 3) return f;
    LinearFit lf = linear_fit(xs, ys);
    lf.slope = -lf.slope; // report the decay rate as a positive number
    return lf;
}

} // namespace nlch
