#pragma once

// Stabilized double-well configurational potential
//   F(s) = (1 - s^2)^2 / 4 + (kappa/2) s^2
// and numerical verification of the structural hypotheses tying it to the
// interaction kernel. Constants are produced by scans over the sample range
// combined with closed-form tail arguments for the quartic family.

#include <optional>
#include <string>
#include <vector>

#include "nlch/domain.hpp"
#include "nlch/kernel.hpp"

namespace nlch {

struct PotentialParams {
    double kappa = 2.5;
    double s_max = 2.0; // hypothesis scans cover [-s_max, s_max]
    int samples = 4001;
    double p = 4.0 / 3.0; // requested (H4) exponent, must lie in (6/5, 2]
    double q = 1.0;       // requested (H5) exponent, must satisfy q >= 1/2
};

struct Potential {
    PotentialParams prm;

    double F(double s) const {
        const double u = 1.0 - s * s;
        return 0.25 * u * u + 0.5 * prm.kappa * s * s;
    }
    double dF(double s) const { return s * (s * s + prm.kappa - 1.0); }
    double ddF(double s) const { return 3.0 * s * s - 1.0 + prm.kappa; }

    // field-wide evaluations through the dispatched kernels
    void F_values(const Field& s, Field& out) const;
    void dF_values(const Field& s, Field& out) const;
    double F_integral(const Field& s) const; // quadrature of F(s(x))

    double min_ddF() const { return prm.kappa - 1.0; } // attained at s = 0
    double max_ddF_on_range() const { return ddF(prm.s_max); }
};

struct HypothesisItem {
    std::string name;
    bool pass = false;
    std::optional<double> witness_s;
    std::string detail;
};

struct HypothesisReport {
    // constants named by the hypotheses block
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0;
    double p = 0.0, q = 0.0;
    double c_J = 0.0, d_J = 0.0, a_0 = 0.0, a_min = 0.0, a_star = 0.0;
    double h6_margin = 0.0;
    std::vector<HypothesisItem> items; // H1..H6 plus the convex-splitting check
    bool all_pass() const;
    const HypothesisItem* find(const std::string& name) const;
};

HypothesisReport verify_hypotheses(const Potential& P, const KernelData& K);

// Throws HypothesisError naming the first failed hypothesis.
void require_hypotheses(const HypothesisReport& r);

} // namespace nlch
