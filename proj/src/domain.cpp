#include "nlch/domain.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nlch/errors.hpp"
#include "nlch/ops.hpp"

namespace nlch {

namespace {

void build_axis(int n, double h, std::vector<double>& basis, std::vector<double>& basis_t,
                std::vector<double>& eig) {
    basis.assign(static_cast<std::size_t>(n) * n, 0.0);
    basis_t.assign(static_cast<std::size_t>(n) * n, 0.0);
    eig.assign(n, 0.0);
    const double pi = std::numbers::pi;
    for (int k = 0; k < n; ++k) {
        const double beta = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (int j = 0; j < n; ++j) {
            const double val = beta * std::cos(pi * k * (j + 0.5) / n);
            basis[static_cast<std::size_t>(k) * n + j] = val;
            basis_t[static_cast<std::size_t>(j) * n + k] = val;
        }
        const double s = std::sin(0.5 * pi * k / n);
        eig[k] = 4.0 / (h * h) * s * s;   // == (2/h^2)(1 - cos(pi k/n))
    }
}

void finish(Domain& d) {
    d.cells = static_cast<std::size_t>(d.n[0]) * d.n[1];
    d.cell_volume = d.h[0] * (d.dim == 2 ? d.h[1] : 1.0);
    d.volume = d.lengths[0] * (d.dim == 2 ? d.lengths[1] : 1.0);

    build_axis(d.n[0], d.h[0], d.basis[0], d.basis_t[0], d.axis_eig[0]);
    if (d.dim == 2) {
        build_axis(d.n[1], d.h[1], d.basis[1], d.basis_t[1], d.axis_eig[1]);
    } else {
        d.basis[1] = {1.0};
        d.basis_t[1] = {1.0};
        d.axis_eig[1] = {0.0};
    }

    d.eig.assign(d.cells, 0.0);
    d.inv_eig.assign(d.cells, 0.0);
    double lmin = std::numeric_limits<double>::infinity();
    for (int ky = 0; ky < d.n[1]; ++ky) {
        for (int kx = 0; kx < d.n[0]; ++kx) {
            const double lam = d.axis_eig[0][kx] + d.axis_eig[1][ky];
            const std::size_t idx = d.index(kx, ky);
            d.eig[idx] = lam;
            d.inv_eig[idx] = (kx == 0 && ky == 0) ? 0.0 : 1.0 / lam;
            if (lam > 0.0 && lam < lmin) lmin = lam;
        }
    }
    d.eig[0] = 0.0; // constant mode, exactly
    d.lambda_min_pos = lmin;
    d.poincare_const = 1.0 / lmin;
}

} // namespace

std::shared_ptr<const Domain> Domain::make_1d(double length, int n) {
    return make(1, {length}, {n});
}

std::shared_ptr<const Domain> Domain::make_2d(double lx, double ly, int nx, int ny) {
    return make(2, {lx, ly}, {nx, ny});
}

std::shared_ptr<const Domain> Domain::make(int dim, const std::vector<double>& lengths,
                                           const std::vector<int>& n) {
    if (dim != 1 && dim != 2)
        throw ConfigError("domain dim must be 1 or 2");
    if (lengths.size() < static_cast<std::size_t>(dim) || n.size() < static_cast<std::size_t>(dim))
        throw ConfigError("domain lengths/n must have one entry per axis");
    auto d = std::make_shared<Domain>();
    d->dim = dim;
    for (int ax = 0; ax < dim; ++ax) {
        if (lengths[ax] <= 0.0) throw ConfigError("domain lengths must be positive");
        if (n[ax] < 2) throw ConfigError("domain needs at least 2 cells per axis");
        d->n[ax] = n[ax];
        d->lengths[ax] = lengths[ax];
        d->h[ax] = lengths[ax] / n[ax];
    }
    if (dim == 1) {
        d->n[1] = 1;
        d->lengths[1] = 1.0;
        d->h[1] = 1.0;
    }
    finish(*d);
    return d;
}

// ---------------------------------------------------------------------------
// transforms
// ---------------------------------------------------------------------------

namespace {

// y = B x for one axis, rows of B contiguous
void matvec(const std::vector<double>& B, const double* x, double* y, int n) {
    for (int k = 0; k < n; ++k)
        y[k] = ops::dot(B.data() + static_cast<std::size_t>(k) * n, x, n);
}

// out[k][:] = sum_j B[k][j] rows[j][:], rows contiguous of length rowlen
void matmul_rows(const std::vector<double>& B, const double* x, double* y, int n, int rowlen) {
    for (int k = 0; k < n; ++k) {
        double* dst = y + static_cast<std::size_t>(k) * rowlen;
        std::fill(dst, dst + rowlen, 0.0);
        const double* brow = B.data() + static_cast<std::size_t>(k) * n;
        for (int j = 0; j < n; ++j)
            ops::axpy(brow[j], x + static_cast<std::size_t>(j) * rowlen, dst, rowlen);
    }
}

} // namespace

void to_coeffs(const Field& f, std::vector<double>& c) {
    const Domain& d = *f.dom;
    const int nx = d.n[0], ny = d.n[1];
    c.resize(d.cells);
    if (d.dim == 1) {
        matvec(d.basis[0], f.data(), c.data(), nx);
    } else {
        std::vector<double> tmp(d.cells);
        for (int iy = 0; iy < ny; ++iy)
            matvec(d.basis[0], f.data() + d.index(0, iy), tmp.data() + d.index(0, iy), nx);
        matmul_rows(d.basis[1], tmp.data(), c.data(), ny, nx);
    }
    ops::scale(std::sqrt(d.cell_volume), c.data(), d.cells);
}

void from_coeffs(const DomainPtr& dom, const std::vector<double>& c, Field& out) {
    const Domain& d = *dom;
    const int nx = d.n[0], ny = d.n[1];
    assert(c.size() == d.cells);
    if (!out.dom) out = Field(dom);
    if (d.dim == 1) {
        matvec(d.basis_t[0], c.data(), out.data(), nx);
    } else {
        std::vector<double> tmp(d.cells);
        matmul_rows(d.basis_t[1], c.data(), tmp.data(), ny, nx);
        for (int iy = 0; iy < ny; ++iy)
            matvec(d.basis_t[0], tmp.data() + d.index(0, iy), out.data() + d.index(0, iy), nx);
    }
    ops::scale(1.0 / std::sqrt(d.cell_volume), out.data(), d.cells);
}

// ---------------------------------------------------------------------------
// means, norms, operators
// ---------------------------------------------------------------------------

double mean(const Field& f) {
    return ops::sum(f.data(), f.size()) / static_cast<double>(f.size());
}

Field hat(const Field& f) {
    Field out = f;
    ops::add_scalar(-mean(f), out.data(), out.size());
    return out;
}

double inner(const Field& a, const Field& b) {
    assert(a.dom == b.dom || (a.dom && b.dom && a.dom->cells == b.dom->cells));
    return a.dom->cell_volume * ops::dot(a.data(), b.data(), a.size());
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

double max_abs(const Field& f) { return ops::max_abs(f.data(), f.size()); }

Field apply_laplacian(const Field& f) {
    std::vector<double> c;
    to_coeffs(f, c);
    ops::mul(c.data(), f.dom->eig.data(), c.data(), c.size());
    Field out;
    from_coeffs(f.dom, c, out);
    return out;
}

Field solve_helmholtz(double c0, double c1, const Field& f) {
    const Domain& d = *f.dom;
    if (c0 < 0.0 || c1 < 0.0)
        throw std::invalid_argument("solve_helmholtz: coefficients must be nonnegative");
    std::vector<double> c;
    to_coeffs(f, c);
    if (c0 == 0.0) {
        if (c1 == 0.0) throw SingularSystemError("solve_helmholtz: zero operator");
        const double m = mean(f);
        const double tol = 1e-10 * std::max(1.0, max_abs(f));
        if (std::abs(m) > tol)
            throw SingularSystemError("solve_helmholtz: c0 = 0 with nonzero-mean right-hand side");
        c[0] = 0.0;
        for (std::size_t k = 1; k < c.size(); ++k) c[k] /= c1 * d.eig[k];
    } else {
        for (std::size_t k = 0; k < c.size(); ++k) c[k] /= c0 + c1 * d.eig[k];
    }
    Field out;
    from_coeffs(f.dom, c, out);
    return out;
}

double vprime_norm(const Field& f) {
    const Domain& d = *f.dom;
    std::vector<double> c;
    to_coeffs(f, c);
    const double m = c[0] / std::sqrt(d.volume);
    return std::sqrt(ops::weighted_sq_sum(d.inv_eig.data(), c.data(), c.size()) + m * m);
}

double v_norm(const Field& f) {
    const Domain& d = *f.dom;
    std::vector<double> c;
    to_coeffs(f, c);
    const double m = c[0] / std::sqrt(d.volume);
    return std::sqrt(ops::weighted_sq_sum(d.eig.data(), c.data(), c.size()) + m * m);
}

double dirichlet_energy(const Field& f) {
    const Domain& d = *f.dom;
    std::vector<double> c;
    to_coeffs(f, c);
    return ops::weighted_sq_sum(d.eig.data(), c.data(), c.size());
}

Field cosine_mode(const DomainPtr& dom, int kx, int ky, double amplitude) {
    Field out(dom);
    const double pi = std::numbers::pi;
    for (int iy = 0; iy < dom->n[1]; ++iy) {
        const double cy = (dom->dim == 2) ? std::cos(pi * ky * (iy + 0.5) / dom->n[1]) : 1.0;
        for (int ix = 0; ix < dom->n[0]; ++ix) {
            const double cx = std::cos(pi * kx * (ix + 0.5) / dom->n[0]);
            out[dom->index(ix, iy)] = amplitude * cx * cy;
        }
    }
    return out;
}

} // namespace nlch
