#include "nlch/fft.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <vector>

namespace nlch::fft {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void transform(std::complex<double>* a, std::size_t n, bool inverse) {
    assert((n & (n - 1)) == 0);
    if (n <= 1) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) a[i] *= inv_n;
    }
}

void transform_2d(std::complex<double>* a, std::size_t nx, std::size_t ny, bool inverse) {
    for (std::size_t iy = 0; iy < ny; ++iy) transform(a + iy * nx, nx, inverse);
    if (ny <= 1) return;
    std::vector<std::complex<double>> col(ny);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iy = 0; iy < ny; ++iy) col[iy] = a[iy * nx + ix];
        transform(col.data(), ny, inverse);
        for (std::size_t iy = 0; iy < ny; ++iy) a[iy * nx + ix] = col[iy];
    }
}

} // namespace nlch::fft
