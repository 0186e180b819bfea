#include "nlch/kernel.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "nlch/errors.hpp"
#include "nlch/fft.hpp"
#include "nlch/ops.hpp"

namespace nlch {

double KernelShape::operator()(double r2) const {
    switch (family) {
        case Family::gaussian:
            return amplitude * std::exp(-0.5 * r2 / (width * width));
        case Family::top_hat:
            return (r2 <= width * width) ? amplitude : 0.0;
    }
    return 0.0;
}

std::string KernelShape::name() const {
    return family == Family::gaussian ? "gaussian" : "top_hat";
}

namespace {

// direct truncated convolution of the constant-1 field
Field direct_a_field(const Domain& d, const KernelData& K) {
    Field a(K.dom);
    const int nx = d.n[0], ny = d.n[1];
    for (int jy = 0; jy < ny; ++jy) {
        for (int jx = 0; jx < nx; ++jx) {
            double s = 0.0;
            for (int iy = 0; iy < ny; ++iy)
                for (int ix = 0; ix < nx; ++ix) s += K.stencil_at(jx - ix, jy - iy);
            a[d.index(jx, jy)] = s * d.cell_volume;
        }
    }
    return a;
}

} // namespace

KernelData build_kernel(const DomainPtr& dom, const KernelShape& shape) {
    if (shape.amplitude < 0.0 || shape.width <= 0.0)
        throw ConfigError("kernel shape parameters must be positive");

    const Domain& d = *dom;
    KernelData K;
    K.dom = dom;
    K.shape = shape;

    const int nx = d.n[0], ny = d.n[1];
    const std::size_t sx = 2 * static_cast<std::size_t>(nx) - 1;
    const std::size_t sy = (d.dim == 2) ? 2 * static_cast<std::size_t>(ny) - 1 : 1;
    K.stencil.assign(sx * sy, 0.0);

    // sample the |z|-radial shape; evenness is exact by construction
    for (std::size_t oy = 0; oy < sy; ++oy) {
        const double zy = (d.dim == 2) ? (static_cast<double>(oy) - (ny - 1)) * d.h[1] : 0.0;
        for (std::size_t ox = 0; ox < sx; ++ox) {
            const double zx = (static_cast<double>(ox) - (nx - 1)) * d.h[0];
            K.stencil[oy * sx + ox] = shape(zx * zx + zy * zy);
        }
    }

    // c_J: quadrature of |J| over the full offset window (the set of
    // differences x - y with both points in the box); this is the constant
    // that dominates the operator norm of the truncated convolution
    K.c_J = ops::sum(K.stencil.data(), K.stencil.size()) * d.cell_volume;

    // d_J: total variation of the stencil per axis, logged only
    double dj = 0.0;
    for (std::size_t oy = 0; oy < sy; ++oy)
        for (std::size_t ox = 0; ox + 1 < sx; ++ox)
            dj += std::abs(K.stencil[oy * sx + ox + 1] - K.stencil[oy * sx + ox]) / d.h[0];
    if (d.dim == 2)
        for (std::size_t oy = 0; oy + 1 < sy; ++oy)
            for (std::size_t ox = 0; ox < sx; ++ox)
                dj += std::abs(K.stencil[(oy + 1) * sx + ox] - K.stencil[oy * sx + ox]) / d.h[1];
    K.d_J = dj * d.cell_volume;

    K.a_field = direct_a_field(d, K);
    double amin = std::numeric_limits<double>::infinity();
    double amax = -amin;
    for (std::size_t i = 0; i < K.a_field.size(); ++i) {
        amin = std::min(amin, K.a_field[i]);
        amax = std::max(amax, K.a_field[i]);
    }
    K.a_min = amin;
    K.a_star = amax;
    K.a_0 = 0.999 * amin;
    if (!(amin > 0.0))
        throw HypothesisError("H1", "interaction kernel violates (H1): a(x) = (J*1)(x) is not "
                                    "strictly positive on the grid (min a = " +
                                        std::to_string(amin) + ")");

    // cache the padded spectrum for fast convolution
    K.pad[0] = fft::next_pow2(sx);
    K.pad[1] = (d.dim == 2) ? fft::next_pow2(sy) : 1;
    std::vector<std::complex<double>> buf(K.pad[0] * K.pad[1], {0.0, 0.0});
    for (std::size_t oy = 0; oy < sy; ++oy) {
        const long wy = static_cast<long>(oy) - (ny - 1);
        const std::size_t py = (d.dim == 2)
                                   ? static_cast<std::size_t>((wy + static_cast<long>(K.pad[1])) % K.pad[1])
                                   : 0;
        for (std::size_t ox = 0; ox < sx; ++ox) {
            const long wx = static_cast<long>(ox) - (nx - 1);
            const std::size_t px =
                static_cast<std::size_t>((wx + static_cast<long>(K.pad[0])) % K.pad[0]);
            buf[py * K.pad[0] + px] = K.stencil[oy * sx + ox];
        }
    }
    fft::transform_2d(buf.data(), K.pad[0], K.pad[1], false);
    K.stencil_hat = std::move(buf);
    return K;
}

Field convolve(const KernelData& K, const Field& phi) {
    const Domain& d = *K.dom;
    if (phi.dom->cells != d.cells || phi.dom->dim != d.dim)
        throw std::invalid_argument("convolve: field lives on a different domain");

    // Split off the mean: J*phi = J*(phi - m) + m * a. The split keeps
    // homogeneous states exact and costs nothing.
    const double m = mean(phi);
    const int nx = d.n[0], ny = d.n[1];
    std::vector<std::complex<double>> buf(K.pad[0] * K.pad[1], {0.0, 0.0});
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            buf[static_cast<std::size_t>(iy) * K.pad[0] + ix] = phi[d.index(ix, iy)] - m;

    fft::transform_2d(buf.data(), K.pad[0], K.pad[1], false);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= K.stencil_hat[i];
    fft::transform_2d(buf.data(), K.pad[0], K.pad[1], true);

    Field out(K.dom);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            out[d.index(ix, iy)] =
                d.cell_volume * buf[static_cast<std::size_t>(iy) * K.pad[0] + ix].real();
    ops::axpy(m, K.a_field.data(), out.data(), out.size());
    return out;
}

double nonlocal_pair_energy(const KernelData& K, const Field& phi) {
    Field conv = convolve(K, phi);
    const double aphi_phi =
        K.dom->cell_volume * ops::weighted_sq_sum(K.a_field.data(), phi.data(), phi.size());
    return 0.5 * (aphi_phi - inner(conv, phi));
}

H6Report check_h6(const KernelData& K, double c0) {
    H6Report r;
    r.c0 = c0;
    r.c_J = K.c_J;
    r.pass = c0 > K.c_J;

    // quadrature of J over the box itself (offsets in the box, not the window)
    const Domain& d = *K.dom;
    double j_box = 0.0;
    for (int iy = 0; iy < d.n[1]; ++iy)
        for (int ix = 0; ix < d.n[0]; ++ix) {
            const double zy = (d.dim == 2) ? d.coord(1, iy) : 0.0;
            const double zx = d.coord(0, ix);
            j_box += K.shape(zx * zx + zy * zy);
        }
    j_box *= d.cell_volume;
    r.quasiconvex_margin = (K.a_min - j_box) + (c0 - K.a_star);
    return r;
}

} // namespace nlch
