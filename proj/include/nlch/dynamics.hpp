#pragma once

// Time integration of the relaxation problem
//   phi_t = -A_N mu,   mu = a phi - J*phi + F'(phi) + alpha phi_t - delta theta
//   eps theta_t + A_N theta = -delta phi_t
// and of its isothermal non-viscous limit
//   (1 + delta^2) phi_t = -A_N mu,   mu = a phi - J*phi + F'(phi),
// with a first-order stabilized IMEX scheme: the nonlocal and nonlinear
// terms are explicit, the viscosity and the stabilizer S (phi^{n+1}-phi^n)
// implicit. Every linear solve is diagonal per cosine mode, so the zero
// mode of each increment vanishes identically and the means of phi and
// theta are conserved. Homogeneous states are exact fixed points.

#include <functional>
#include <optional>
#include <vector>

#include "nlch/domain.hpp"
#include "nlch/kernel.hpp"
#include "nlch/potential.hpp"

namespace nlch {

struct Params {
    double alpha = 0.0;
    double epsilon = 0.0;
    double delta = 0.1;
    double delta0 = 0.25;
    double m = 1.0;     // bound on the initial means
    double dt = 1e-3;
    double T = 1.0;
    double stabilizer = -1.0; // < 0 selects max F'' on the sample range + 1

    double resolve_stabilizer(const Potential& P) const {
        return stabilizer >= 0.0 ? stabilizer : P.max_ddF_on_range() + 1.0;
    }
    void validate_relaxation() const;
    void validate_limit() const;
};

struct State {
    double t = 0.0;
    Field phi;
    std::optional<Field> theta; // absent for the limit problem
    Field mu;                   // last computed chemical potential
    Field phi_t;                // last computed discrete rate
};

// Per-step quantities read off the spectral solve at no extra transform
// cost; the energy-balance integral is accumulated from these.
struct StepStats {
    double dirichlet_mu = 0.0;      // |grad mu|^2
    double phi_t_sq = 0.0;          // |phi_t|^2
    double phi_t_vprime_sq = 0.0;   // |phi_t|^2 in the dual norm
    double dirichlet_theta = 0.0;   // |grad theta^{n+1}|^2 (relaxation only)
    double mean_mu = 0.0;
};

// r(phi) - delta theta, the explicit part of the chemical potential
Field chemical_potential_explicit(const Field& phi, const Field* theta, const KernelData& K,
                                  const Potential& P, double delta);

// a phi - J*phi + F'(phi)
Field plain_potential(const Field& phi, const KernelData& K, const Potential& P);

class RelaxationStepper {
public:
    RelaxationStepper(const KernelData& K, const Potential& P, const Params& prm);
    StepStats step(State& s);
    const Params& params() const { return prm_; }
    double stabilizer() const { return S_; }

private:
    const KernelData& K_;
    const Potential& P_;
    Params prm_;
    double S_;
    std::vector<double> phi_gain_;   // per-mode -dt*lambda / (1 + alpha*lambda + dt*S*lambda)
    std::vector<double> theta_gain_; // per-mode 1 / (eps/dt + lambda)
    std::vector<double> c_, dc_, ct_, dct_, mu_c_;
    Field rhs_, dphi_, dtheta_;
};

class LimitStepper {
public:
    LimitStepper(const KernelData& K, const Potential& P, const Params& prm);
    StepStats step(State& s);
    const Params& params() const { return prm_; }
    double stabilizer() const { return S_; }

private:
    const KernelData& K_;
    const Potential& P_;
    Params prm_;
    double S_;
    std::vector<double> phi_gain_; // -dt*lambda / ((1+delta^2) + dt*S*lambda)
    std::vector<double> c_, dc_, mu_c_;
    Field rhs_, dphi_;
};

// Canonical extension of a limit state into the relaxation phase space:
// theta^0 = delta mu^0 where mu^0 solves mu^0 = a phi - J*phi + F'(phi)
// - delta theta^0, i.e. theta^0 = delta (a phi - J*phi + F'(phi)) / (1+delta^2).
Field lift_theta(const Field& phi, const KernelData& K, const Potential& P, double delta);
State lift(const State& limit_state, const KernelData& K, const Potential& P, double delta);

struct DifferencePoint {
    double t = 0.0;
    double D = 0.0;                  // |~phi|_{V'}^2 + alpha |~phi|^2 + eps |~theta|^2
    double int_phit_vprime = 0.0;    // running integral of |~phi_t|_{V'}^2
    double int_alpha_phit = 0.0;     // running integral of alpha |~phi_t|^2
    double int_eps_theta_v = 0.0;    // running integral of eps |~theta|_V^2
};

struct DifferenceSeries {
    double alpha = 0.0;
    double epsilon = 0.0;
    std::vector<DifferencePoint> points;
    double sup_D = 0.0;
    double x11_final = 0.0; // X^{1,1} metric between the endpoint states
};

// Integrates the relaxation problem at (alpha, epsilon) and the limit
// problem from the same phi0 with theta0 = lift(phi0), in lockstep on the
// same grid, dt and horizon, and records the phase-space distance of the
// trajectory difference.
DifferenceSeries run_difference(const Field& phi0, const KernelData& K, const Potential& P,
                                const Params& base, double alpha, double epsilon);

// Integrates the limit problem keeping every step; used by the
// second-difference probe.
std::vector<Field> run_limit_trajectory(const Field& phi0, const KernelData& K,
                                        const Potential& P, const Params& prm,
                                        State* final_state = nullptr);

// Trapezoid value of the integral of |phi_tt|_{V'}^2 over the trajectory,
// with phi_tt formed by second differences on the interior nodes (the probe
// starts one step in, where the discrete second difference first exists).
double second_difference_bound(const std::vector<Field>& phi_every_step, double dt);

} // namespace nlch
