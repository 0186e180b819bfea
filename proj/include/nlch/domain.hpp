#pragma once

// Discretization substrate: uniform cell-centered grid on a box with the
// cosine eigenbasis of the second-order finite-difference Neumann Laplacian.
// Mode k of axis i has eigenvalue (2/h^2)(1 - cos(pi k / n)), so spectral
// apply/solve agree with the dense FD matrix to roundoff.

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace nlch {

struct Domain {
    int dim = 1;
    std::array<int, 2> n{1, 1};            // cells per axis (x fastest in storage)
    std::array<double, 2> lengths{1.0, 1.0};
    std::array<double, 2> h{1.0, 1.0};
    std::size_t cells = 1;
    double volume = 1.0;
    double cell_volume = 1.0;              // quadrature weight per cell

    // per-axis Euclidean-orthonormal cosine basis, row-major n x n:
    // basis[k*n + j] = beta_k cos(pi k (j+1/2)/n), and its transpose
    std::array<std::vector<double>, 2> basis;
    std::array<std::vector<double>, 2> basis_t;
    std::array<std::vector<double>, 2> axis_eig;

    std::vector<double> eig;      // eigenvalue per tensor mode, coeff layout
    std::vector<double> inv_eig;  // 1/eig with the zero mode weighted 0

    double lambda_min_pos = 0.0;
    double poincare_const = 0.0;  // 1 / lambda_min_pos

    static std::shared_ptr<const Domain> make_1d(double length, int n);
    static std::shared_ptr<const Domain> make_2d(double lx, double ly, int nx, int ny);
    static std::shared_ptr<const Domain> make(int dim, const std::vector<double>& lengths,
                                              const std::vector<int>& n);

    double coord(int axis, int cell_index) const {
        return (cell_index + 0.5) * h[axis];
    }
    std::size_t index(int ix, int iy = 0) const {
        return static_cast<std::size_t>(iy) * n[0] + ix;
    }
};

using DomainPtr = std::shared_ptr<const Domain>;

struct Field {
    DomainPtr dom;
    std::vector<double> v;

    Field() = default;
    explicit Field(DomainPtr d, double fill = 0.0) : dom(std::move(d)), v(dom->cells, fill) {}

    std::size_t size() const { return v.size(); }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
};

// transforms between cell values and L2-orthonormal cosine coefficients
void to_coeffs(const Field& f, std::vector<double>& c);
void from_coeffs(const DomainPtr& dom, const std::vector<double>& c, Field& out);

double mean(const Field& f);
Field hat(const Field& f);                 // f - <f>
double inner(const Field& a, const Field& b);
double l2_norm(const Field& f);
double max_abs(const Field& f);

Field apply_laplacian(const Field& f);     // A_N f = -Laplace f, Neumann BC
Field solve_helmholtz(double c0, double c1, const Field& f); // (c0 I + c1 A_N) u = f

double vprime_norm(const Field& f);        // dual norm of the H^-1 structure
double v_norm(const Field& f);             // H^1-type norm
double dirichlet_energy(const Field& f);   // <A_N f, f> = |grad f|^2

Field cosine_mode(const DomainPtr& dom, int kx, int ky = 0, double amplitude = 1.0);

} // namespace nlch
