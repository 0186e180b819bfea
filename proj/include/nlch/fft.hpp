#pragma once

#include <complex>
#include <cstddef>

namespace nlch::fft {

// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

// In-place radix-2 complex FFT; n must be a power of two.
// inverse=true applies the conjugate transform and the 1/n scaling.
void transform(std::complex<double>* a, std::size_t n, bool inverse);

// 2D transform on a row-major ny x nx array; both dims powers of two.
void transform_2d(std::complex<double>* a, std::size_t nx, std::size_t ny, bool inverse);

} // namespace nlch::fft
