#pragma once

// Primitive array kernels used by the transforms, the steppers, and the
// diagnostics. Every kernel has a scalar reference implementation and,
// where the host supports it, a SIMD variant (AVX2+FMA on x86-64, NEON on
// aarch64) selected once at runtime. Pointwise kernels are written so that
// the scalar and SIMD paths perform the same floating-point operations in
// the same order per element (std::fma mirrors the vector FMA); reductions
// may reassociate and are compared under a small relative tolerance.
//
// Force a specific path with NLCH_ISA=scalar|avx2|neon (ignored when the
// host lacks the requested ISA).

#include <cstddef>

namespace nlch::ops {

enum class Isa { scalar, avx2, neon };

Isa active_isa();
const char* isa_name();

// reductions
double sum(const double* a, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double weighted_sq_sum(const double* w, const double* a, std::size_t n); // sum w_i a_i^2
double max_abs(const double* a, std::size_t n);

// pointwise
void axpy(double alpha, const double* x, double* y, std::size_t n); // y += alpha x
void scale(double alpha, double* x, std::size_t n);                 // x *= alpha
void add_scalar(double c, double* x, std::size_t n);                // x += c
void mul(const double* a, const double* b, double* out, std::size_t n);

// double-well potential F(s) = (1-s^2)^2/4 + (kappa/2) s^2 over arrays
void dwell(const double* s, double* out, std::size_t n, double kappa);       // F(s)
void dwell_prime(const double* s, double* out, std::size_t n, double kappa); // s^3 - s + kappa s

// rho(x) = a(x) phi + F'(phi) - conv, the explicit nonlocal chemical term
void nonlocal_rho(const double* a, const double* phi, const double* conv,
                  double* out, std::size_t n, double kappa);

// Scalar reference path, always available; the dispatched functions above
// are equivalence-tested against these.
namespace scalar {
double sum(const double* a, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double weighted_sq_sum(const double* w, const double* a, std::size_t n);
double max_abs(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void add_scalar(double c, double* x, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);
void dwell(const double* s, double* out, std::size_t n, double kappa);
void dwell_prime(const double* s, double* out, std::size_t n, double kappa);
void nonlocal_rho(const double* a, const double* phi, const double* conv,
                  double* out, std::size_t n, double kappa);
} // namespace scalar

} // namespace nlch::ops
