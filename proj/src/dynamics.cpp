#include "nlch/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "nlch/errors.hpp"
#include "nlch/ops.hpp"

namespace nlch {

void Params::validate_relaxation() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ConfigError("relaxation problem needs alpha in (0, 1]");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw ConfigError("relaxation problem needs epsilon in (0, 1]; use the limit problem "
                          "for alpha = epsilon = 0");
    if (delta < 0.0 || delta > delta0) throw ConfigError("delta must lie in [0, delta0]");
    if (dt <= 0.0 || T <= 0.0) throw ConfigError("dt and T must be positive");
}

void Params::validate_limit() const {
    if (alpha != 0.0 || epsilon != 0.0)
        throw ConfigError("limit problem runs with alpha = epsilon = 0");
    if (delta < 0.0 || delta > delta0) throw ConfigError("delta must lie in [0, delta0]");
    if (dt <= 0.0 || T <= 0.0) throw ConfigError("dt and T must be positive");
}

Field plain_potential(const Field& phi, const KernelData& K, const Potential& P) {
    Field conv = convolve(K, phi);
    Field out(phi.dom);
    ops::nonlocal_rho(K.a_field.data(), phi.data(), conv.data(), out.data(), phi.size(),
                      P.prm.kappa);
    return out;
}

Field chemical_potential_explicit(const Field& phi, const Field* theta, const KernelData& K,
                                  const Potential& P, double delta) {
    Field out = plain_potential(phi, K, P);
    if (theta && delta != 0.0) ops::axpy(-delta, theta->data(), out.data(), out.size());
    return out;
}

namespace {

void check_finite(const State& s) {
    const double m = max_abs(s.phi);
    if (!std::isfinite(m))
        throw BlowUpError(s.t, m, "solution blew up at t = " + std::to_string(s.t));
}

// Removes the mean twice over: the zero-mode coefficient is zeroed in
// spectral space and the reconstructed increment is re-centered, so the
// conserved means cannot drift by transform roundoff.
void recenter(Field& f) {
    ops::add_scalar(-mean(f), f.data(), f.size());
}

} // namespace

// ---------------------------------------------------------------------------
// relaxation stepper
// ---------------------------------------------------------------------------

RelaxationStepper::RelaxationStepper(const KernelData& K, const Potential& P, const Params& prm)
    : K_(K), P_(P), prm_(prm), S_(prm.resolve_stabilizer(P)) {
    prm_.validate_relaxation();
    const Domain& d = *K.dom;
    phi_gain_.resize(d.cells);
    theta_gain_.resize(d.cells);
    const double dt = prm_.dt;
    for (std::size_t k = 0; k < d.cells; ++k) {
        const double lam = d.eig[k];
        phi_gain_[k] = -dt * lam / (1.0 + prm_.alpha * lam + dt * S_ * lam);
        theta_gain_[k] = 1.0 / (prm_.epsilon / dt + lam);
    }
    phi_gain_[0] = 0.0;
    rhs_ = Field(K.dom);
    dphi_ = Field(K.dom);
    dtheta_ = Field(K.dom);
}

StepStats RelaxationStepper::step(State& s) {
    if (!s.theta) throw std::invalid_argument("relaxation step needs a theta component");
    const Domain& d = *K_.dom;
    const double dt = prm_.dt;
    StepStats st;

    // explicit part: rhs = a phi + F'(phi) - J*phi - delta theta
    Field conv = convolve(K_, s.phi);
    ops::nonlocal_rho(K_.a_field.data(), s.phi.data(), conv.data(), rhs_.data(), d.cells,
                      P_.prm.kappa);
    if (prm_.delta != 0.0) ops::axpy(-prm_.delta, s.theta->data(), rhs_.data(), d.cells);
    st.mean_mu = mean(rhs_);

    // phase increment, solved per mode on the mean-free part
    ops::add_scalar(-st.mean_mu, rhs_.data(), d.cells);
    to_coeffs(rhs_, c_);
    dc_.resize(d.cells);
    ops::mul(c_.data(), phi_gain_.data(), dc_.data(), d.cells);
    dc_[0] = 0.0;
    from_coeffs(s.phi.dom, dc_, dphi_);
    recenter(dphi_);

    // mu = rhs + (alpha/dt + S) dphi; spectrally mu_k = c_k + (alpha/dt+S) dc_k
    mu_c_.resize(d.cells);
    for (std::size_t k = 0; k < d.cells; ++k)
        mu_c_[k] = c_[k] + (prm_.alpha / dt + S_) * dc_[k];
    st.dirichlet_mu = ops::weighted_sq_sum(d.eig.data(), mu_c_.data(), d.cells);
    double pts = 0.0, ptv = 0.0;
    for (std::size_t k = 1; k < d.cells; ++k) {
        const double r = dc_[k] / dt;
        pts += r * r;
        ptv += r * r * d.inv_eig[k];
    }
    st.phi_t_sq = pts;
    st.phi_t_vprime_sq = ptv;

    s.mu = rhs_;
    ops::add_scalar(st.mean_mu, s.mu.data(), d.cells);
    ops::axpy(prm_.alpha / dt + S_, dphi_.data(), s.mu.data(), d.cells);

    // theta increment: (eps/dt + A_N) dtheta = -A_N theta - delta phi_t
    Field theta_hat = *s.theta;
    const double theta_mean = mean(theta_hat);
    ops::add_scalar(-theta_mean, theta_hat.data(), d.cells);
    to_coeffs(theta_hat, ct_);
    dct_.resize(d.cells);
    double dir_theta = 0.0;
    for (std::size_t k = 0; k < d.cells; ++k) {
        const double lam = d.eig[k];
        dct_[k] = (-lam * ct_[k] - prm_.delta * dc_[k] / dt) * theta_gain_[k];
        const double tn1 = ct_[k] + dct_[k];
        dir_theta += lam * tn1 * tn1;
    }
    dct_[0] = 0.0;
    st.dirichlet_theta = dir_theta;
    from_coeffs(s.phi.dom, dct_, dtheta_);
    recenter(dtheta_);

    // advance
    s.phi_t = dphi_;
    ops::scale(1.0 / dt, s.phi_t.data(), d.cells);
    for (std::size_t i = 0; i < d.cells; ++i) s.phi[i] += dphi_[i];
    for (std::size_t i = 0; i < d.cells; ++i) (*s.theta)[i] += dtheta_[i];
    s.t += dt;
    check_finite(s);
    return st;
}

// ---------------------------------------------------------------------------
// limit stepper
// ---------------------------------------------------------------------------

LimitStepper::LimitStepper(const KernelData& K, const Potential& P, const Params& prm)
    : K_(K), P_(P), prm_(prm), S_(prm.resolve_stabilizer(P)) {
    prm_.validate_limit();
    const Domain& d = *K.dom;
    phi_gain_.resize(d.cells);
    const double dt = prm_.dt;
    const double visc = 1.0 + prm_.delta * prm_.delta;
    for (std::size_t k = 0; k < d.cells; ++k) {
        const double lam = d.eig[k];
        phi_gain_[k] = -dt * lam / (visc + dt * S_ * lam);
    }
    phi_gain_[0] = 0.0;
    rhs_ = Field(K.dom);
    dphi_ = Field(K.dom);
}

StepStats LimitStepper::step(State& s) {
    const Domain& d = *K_.dom;
    const double dt = prm_.dt;
    StepStats st;

    Field conv = convolve(K_, s.phi);
    ops::nonlocal_rho(K_.a_field.data(), s.phi.data(), conv.data(), rhs_.data(), d.cells,
                      P_.prm.kappa);
    st.mean_mu = mean(rhs_);

    ops::add_scalar(-st.mean_mu, rhs_.data(), d.cells);
    to_coeffs(rhs_, c_);
    dc_.resize(d.cells);
    ops::mul(c_.data(), phi_gain_.data(), dc_.data(), d.cells);
    dc_[0] = 0.0;
    from_coeffs(s.phi.dom, dc_, dphi_);
    recenter(dphi_);

    mu_c_.resize(d.cells);
    for (std::size_t k = 0; k < d.cells; ++k) mu_c_[k] = c_[k] + S_ * dc_[k];
    st.dirichlet_mu = ops::weighted_sq_sum(d.eig.data(), mu_c_.data(), d.cells);
    double pts = 0.0, ptv = 0.0;
    for (std::size_t k = 1; k < d.cells; ++k) {
        const double r = dc_[k] / dt;
        pts += r * r;
        ptv += r * r * d.inv_eig[k];
    }
    st.phi_t_sq = pts;
    st.phi_t_vprime_sq = ptv;

    s.mu = rhs_;
    ops::add_scalar(st.mean_mu, s.mu.data(), d.cells);
    ops::axpy(S_, dphi_.data(), s.mu.data(), d.cells);

    s.phi_t = dphi_;
    ops::scale(1.0 / dt, s.phi_t.data(), d.cells);
    for (std::size_t i = 0; i < d.cells; ++i) s.phi[i] += dphi_[i];
    s.t += dt;
    check_finite(s);
    return st;
}

// ---------------------------------------------------------------------------
// lift and trajectory difference
// ---------------------------------------------------------------------------

Field lift_theta(const Field& phi, const KernelData& K, const Potential& P, double delta) {
    Field mu = plain_potential(phi, K, P);
    ops::scale(delta / (1.0 + delta * delta), mu.data(), mu.size());
    return mu;
}

State lift(const State& limit_state, const KernelData& K, const Potential& P, double delta) {
    State s;
    s.t = limit_state.t;
    s.phi = limit_state.phi;
    s.theta = lift_theta(limit_state.phi, K, P, delta);
    s.mu = limit_state.mu;
    s.phi_t = limit_state.phi_t;
    return s;
}

DifferenceSeries run_difference(const Field& phi0, const KernelData& K, const Potential& P,
                                const Params& base, double alpha, double epsilon) {
    DifferenceSeries out;
    out.alpha = alpha;
    out.epsilon = epsilon;

    Params rel = base;
    rel.alpha = alpha;
    rel.epsilon = epsilon;
    Params lim = base;
    lim.alpha = 0.0;
    lim.epsilon = 0.0;

    const bool degenerate = (alpha == 0.0 && epsilon == 0.0);

    State srel;
    srel.phi = phi0;
    srel.theta = lift_theta(phi0, K, P, base.delta);
    State slim;
    slim.phi = phi0;

    LimitStepper limit_stepper(K, P, lim);
    std::optional<RelaxationStepper> rel_stepper;
    std::optional<LimitStepper> rel_as_limit; // sanity configuration alpha = eps = 0
    if (degenerate)
        rel_as_limit.emplace(K, P, lim);
    else
        rel_stepper.emplace(K, P, rel);

    const Domain& d = *K.dom;
    const std::size_t steps = static_cast<std::size_t>(std::llround(base.T / base.dt));

    Field phi_diff(K.dom), theta_diff(K.dom), prev_phi_diff(K.dom);
    auto record = [&](double t, DifferencePoint& pt) {
        for (std::size_t i = 0; i < d.cells; ++i) phi_diff[i] = srel.phi[i] - slim.phi[i];
        Field theta_lift = lift_theta(slim.phi, K, P, base.delta);
        const Field& th = degenerate ? theta_lift : *srel.theta;
        for (std::size_t i = 0; i < d.cells; ++i) theta_diff[i] = th[i] - theta_lift[i];
        const double vp = vprime_norm(phi_diff);
        const double l2p = l2_norm(phi_diff);
        const double l2t = l2_norm(theta_diff);
        pt.t = t;
        pt.D = vp * vp + alpha * l2p * l2p + epsilon * l2t * l2t;
        return std::pair<double, double>{l2t, v_norm(theta_diff)};
    };

    DifferencePoint p0;
    auto [l2t0, vt0] = record(0.0, p0);
    out.points.push_back(p0);
    out.sup_D = p0.D;

    double int_pv = 0.0, int_ap = 0.0, int_tv = 0.0;
    double prev_theta_v = vt0;
    prev_phi_diff = phi_diff;

    for (std::size_t n = 1; n <= steps; ++n) {
        if (degenerate)
            rel_as_limit->step(srel);
        else
            rel_stepper->step(srel);
        limit_stepper.step(slim);

        DifferencePoint pt;
        auto [l2t, vt] = record(srel.t, pt);
        (void)l2t;

        // interval quantities: the rate of the difference over the step
        Field rate = phi_diff;
        for (std::size_t i = 0; i < d.cells; ++i)
            rate[i] = (phi_diff[i] - prev_phi_diff[i]) / base.dt;
        const double rv = vprime_norm(rate);
        const double rl = l2_norm(rate);
        int_pv += base.dt * rv * rv;
        int_ap += base.dt * alpha * rl * rl;
        int_tv += 0.5 * base.dt * epsilon * (prev_theta_v * prev_theta_v + vt * vt);

        pt.int_phit_vprime = int_pv;
        pt.int_alpha_phit = int_ap;
        pt.int_eps_theta_v = int_tv;
        out.points.push_back(pt);
        out.sup_D = std::max(out.sup_D, pt.D);

        prev_phi_diff = phi_diff;
        prev_theta_v = vt;
    }

    // X^{1,1} metric between the endpoint states
    {
        Field theta_lift = lift_theta(slim.phi, K, P, base.delta);
        const Field& th = degenerate ? theta_lift : *srel.theta;
        for (std::size_t i = 0; i < d.cells; ++i) phi_diff[i] = srel.phi[i] - slim.phi[i];
        for (std::size_t i = 0; i < d.cells; ++i) theta_diff[i] = th[i] - theta_lift[i];
        const double vp = vprime_norm(phi_diff);
        const double l2p = l2_norm(phi_diff);
        const double l2t = l2_norm(theta_diff);
        const double hn = std::sqrt(vp * vp + l2p * l2p + l2t * l2t);
        const double df = std::abs(P.F_integral(srel.phi) - P.F_integral(slim.phi));
        out.x11_final = hn + std::sqrt(df);
    }
    return out;
}

std::vector<Field> run_limit_trajectory(const Field& phi0, const KernelData& K,
                                        const Potential& P, const Params& prm,
                                        State* final_state) {
    Params lim = prm;
    lim.alpha = 0.0;
    lim.epsilon = 0.0;
    LimitStepper stepper(K, P, lim);
    State s;
    s.phi = phi0;
    const std::size_t steps = static_cast<std::size_t>(std::llround(prm.T / prm.dt));
    std::vector<Field> traj;
    traj.reserve(steps + 1);
    traj.push_back(s.phi);
    for (std::size_t n = 0; n < steps; ++n) {
        stepper.step(s);
        traj.push_back(s.phi);
    }
    if (final_state) *final_state = s;
    return traj;
}

double second_difference_bound(const std::vector<Field>& phi, double dt) {
    if (phi.size() < 3)
        throw std::invalid_argument("second_difference_bound needs at least 3 snapshots");
    const DomainPtr dom = phi.front().dom;
    const std::size_t cells = dom->cells;
    std::vector<double> g; // |phi_tt|_{V'}^2 at the interior nodes
    g.reserve(phi.size() - 2);
    Field buf(dom);
    for (std::size_t n = 1; n + 1 < phi.size(); ++n) {
        for (std::size_t i = 0; i < cells; ++i)
            buf[i] = (phi[n + 1][i] - 2.0 * phi[n][i] + phi[n - 1][i]) / (dt * dt);
        const double v = vprime_norm(buf);
        g.push_back(v * v);
    }
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) integral += 0.5 * dt * (g[i] + g[i + 1]);
    if (g.size() == 1) integral = dt * g[0];
    return integral;
}

} // namespace nlch
