#pragma once

// Even interaction kernel J sampled on the offset lattice of the grid,
// the induced coefficient field a(x) = (J*1)(x), and the truncated
// (integrate-only-over-the-box) convolution. The convolution is evaluated
// by zero-padded FFT of length >= 2n-1 per axis, which reproduces the
// direct double sum to roundoff.

#include <complex>
#include <string>
#include <vector>

#include "nlch/domain.hpp"

namespace nlch {

struct KernelShape {
    enum class Family { gaussian, top_hat };
    Family family = Family::gaussian;
    double amplitude = 1.0;
    double width = 0.1;   // std dev (gaussian) or radius (top_hat)

    double operator()(double r2) const; // J as a function of |z|^2
    std::string name() const;
};

struct KernelData {
    DomainPtr dom;
    KernelShape shape;
    // J(z) on offsets z in {-(n-1)h, ..., (n-1)h} per axis, row-major,
    // axis extent 2n-1, offset o stored at o + (n-1)
    std::vector<double> stencil;
    Field a_field;       // a(x) = integral of J(x-y) over the box
    double c_J = 0.0;    // L1 norm of J over the offset window, quadrature
    double d_J = 0.0;    // L1 norm of the stencil gradient, logged only
    double a_star = 0.0; // max a(x)
    double a_min = 0.0;  // min a(x) over grid samples
    double a_0 = 0.0;    // strict lower bound, 0.999 * a_min

    // cached padded spectrum of the stencil for fast convolution
    std::array<std::size_t, 2> pad{1, 1};
    std::vector<std::complex<double>> stencil_hat;

    double stencil_at(int ox, int oy = 0) const {
        const std::size_t sx = 2 * static_cast<std::size_t>(dom->n[0]) - 1;
        return stencil[(static_cast<std::size_t>(oy) + dom->n[1] - 1) * sx +
                       (static_cast<std::size_t>(ox) + dom->n[0] - 1)];
    }
};

// Samples the shape on the offset lattice and precomputes a_field and the
// constants. Throws HypothesisError("H1") if a(x) is not strictly positive
// everywhere.
KernelData build_kernel(const DomainPtr& dom, const KernelShape& shape);

// (J*phi)(x_j) = sum_i J((j-i)h) phi_i * cell_volume
Field convolve(const KernelData& K, const Field& phi);

// (1/2)[ (a phi, phi) - (J*phi, phi) ], the quadratic part of the energy
double nonlocal_pair_energy(const KernelData& K, const Field& phi);

struct H6Report {
    double c0 = 0.0;
    double c_J = 0.0;
    bool pass = false;
    double quasiconvex_margin = 0.0; // inf_x int(J(y-x)-J(y))dy + (c0 - a*)
};

// c0 comes from the potential's (H2) scan; reported, never throws.
H6Report check_h6(const KernelData& K, double c0);

} // namespace nlch
