#include "nlch/ops.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#if defined(__x86_64__) || defined(_M_X64)
#define NLCH_X86 1
#include <immintrin.h>
#else
#define NLCH_X86 0
#endif

#if defined(__aarch64__)
#define NLCH_NEON 1
#include <arm_neon.h>
#else
#define NLCH_NEON 0
#endif

namespace nlch::ops {

// ---------------------------------------------------------------------------
// scalar reference kernels
// ---------------------------------------------------------------------------

namespace scalar {

double sum(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_sq_sum(const double* w, const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * a[i];
    return s;
}

double max_abs(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void scale(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void add_scalar(double c, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] += c;
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void dwell(const double* s, double* out, std::size_t n, double kappa) {
    const double hk = 0.5 * kappa;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = s[i];
        const double u = std::fma(-v, v, 1.0); // 1 - s^2
        out[i] = (0.25 * u) * u + hk * (v * v);
    }
}

void dwell_prime(const double* s, double* out, std::size_t n, double kappa) {
    const double km1 = kappa - 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = s[i];
        const double t = std::fma(v, v, km1); // s^2 + kappa - 1
        out[i] = v * t;
    }
}

void nonlocal_rho(const double* a, const double* phi, const double* conv,
                  double* out, std::size_t n, double kappa) {
    const double km1 = kappa - 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = phi[i];
        const double t = std::fma(v, v, km1);
        const double r = std::fma(a[i], v, v * t); // a phi + F'(phi)
        out[i] = r - conv[i];
    }
}

} // namespace scalar

// ---------------------------------------------------------------------------
// AVX2 + FMA kernels
// ---------------------------------------------------------------------------

#if NLCH_X86

namespace avx2 {

__attribute__((target("avx2,fma")))
double sum(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc0);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += a[i];
    return s;
}

__attribute__((target("avx2,fma")))
double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc0);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s = std::fma(a[i], b[i], s);
    return s;
}

__attribute__((target("avx2,fma")))
double weighted_sq_sum(const double* w, const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d av = _mm256_loadu_pd(a + i);
        const __m256d wv = _mm256_loadu_pd(w + i);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(wv, av), av, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += w[i] * a[i] * a[i];
    return s;
}

__attribute__((target("avx2,fma")))
double max_abs(const double* a, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(a + i)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

__attribute__((target("avx2,fma")))
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

__attribute__((target("avx2,fma")))
void scale(double alpha, double* x, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

__attribute__((target("avx2,fma")))
void add_scalar(double c, double* x, std::size_t n) {
    const __m256d cv = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_add_pd(cv, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] += c;
}

__attribute__((target("avx2,fma")))
void mul(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

__attribute__((target("avx2,fma")))
void dwell(const double* s, double* out, std::size_t n, double kappa) {
    const double hk = 0.5 * kappa;
    const __m256d hkv = _mm256_set1_pd(hk);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d quarter = _mm256_set1_pd(0.25);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(s + i);
        const __m256d u = _mm256_fnmadd_pd(v, v, one);
        const __m256d p = _mm256_mul_pd(_mm256_mul_pd(quarter, u), u);
        const __m256d q = _mm256_mul_pd(hkv, _mm256_mul_pd(v, v));
        _mm256_storeu_pd(out + i, _mm256_add_pd(p, q));
    }
    for (; i < n; ++i) {
        const double v = s[i];
        const double u = std::fma(-v, v, 1.0);
        out[i] = (0.25 * u) * u + hk * (v * v);
    }
}

__attribute__((target("avx2,fma")))
void dwell_prime(const double* s, double* out, std::size_t n, double kappa) {
    const double km1 = kappa - 1.0;
    const __m256d km1v = _mm256_set1_pd(km1);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(s + i);
        const __m256d t = _mm256_fmadd_pd(v, v, km1v);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(v, t));
    }
    for (; i < n; ++i) {
        const double v = s[i];
        out[i] = v * std::fma(v, v, km1);
    }
}

__attribute__((target("avx2,fma")))
void nonlocal_rho(const double* a, const double* phi, const double* conv,
                  double* out, std::size_t n, double kappa) {
    const double km1 = kappa - 1.0;
    const __m256d km1v = _mm256_set1_pd(km1);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(phi + i);
        const __m256d t = _mm256_fmadd_pd(v, v, km1v);
        const __m256d r = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), v, _mm256_mul_pd(v, t));
        _mm256_storeu_pd(out + i, _mm256_sub_pd(r, _mm256_loadu_pd(conv + i)));
    }
    for (; i < n; ++i) {
        const double v = phi[i];
        const double t = std::fma(v, v, km1);
        out[i] = std::fma(a[i], v, v * t) - conv[i];
    }
}

} // namespace avx2

#endif // NLCH_X86

// ---------------------------------------------------------------------------
// NEON kernels
// ---------------------------------------------------------------------------

#if NLCH_NEON

namespace neon {

double sum(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += a[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s = std::fma(a[i], b[i], s);
    return s;
}

double weighted_sq_sum(const double* w, const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t av = vld1q_f64(a + i);
        acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), av), av);
    }
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += w[i] * a[i] * a[i];
    return s;
}

double max_abs(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(a + i)));
    double m = std::max(vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1));
    for (; i < n; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t av = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void scale(double alpha, double* x, std::size_t n) {
    const float64x2_t av = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(av, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void add_scalar(double c, double* x, std::size_t n) {
    const float64x2_t cv = vdupq_n_f64(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vaddq_f64(cv, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] += c;
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void dwell(const double* s, double* out, std::size_t n, double kappa) {
    scalar::dwell(s, out, n, kappa);
}

void dwell_prime(const double* s, double* out, std::size_t n, double kappa) {
    const double km1 = kappa - 1.0;
    const float64x2_t km1v = vdupq_n_f64(km1);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(s + i);
        vst1q_f64(out + i, vmulq_f64(v, vfmaq_f64(km1v, v, v)));
    }
    for (; i < n; ++i) {
        const double v = s[i];
        out[i] = v * std::fma(v, v, km1);
    }
}

void nonlocal_rho(const double* a, const double* phi, const double* conv,
                  double* out, std::size_t n, double kappa) {
    const double km1 = kappa - 1.0;
    const float64x2_t km1v = vdupq_n_f64(km1);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(phi + i);
        const float64x2_t t = vfmaq_f64(km1v, v, v);
        const float64x2_t r = vfmaq_f64(vmulq_f64(v, t), vld1q_f64(a + i), v);
        vst1q_f64(out + i, vsubq_f64(r, vld1q_f64(conv + i)));
    }
    for (; i < n; ++i) {
        const double v = phi[i];
        out[i] = std::fma(a[i], v, v * std::fma(v, v, km1)) - conv[i];
    }
}

} // namespace neon

#endif // NLCH_NEON

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

namespace {

struct Table {
    Isa isa;
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*weighted_sq_sum)(const double*, const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*add_scalar)(double, double*, std::size_t);
    void (*mul)(const double*, const double*, double*, std::size_t);
    void (*dwell)(const double*, double*, std::size_t, double);
    void (*dwell_prime)(const double*, double*, std::size_t, double);
    void (*nonlocal_rho)(const double*, const double*, const double*, double*, std::size_t, double);
};

constexpr Table scalar_table() {
    return {Isa::scalar,
            scalar::sum, scalar::dot, scalar::weighted_sq_sum, scalar::max_abs,
            scalar::axpy, scalar::scale, scalar::add_scalar, scalar::mul,
            scalar::dwell, scalar::dwell_prime, scalar::nonlocal_rho};
}

Table pick_table() {
    const char* req = std::getenv("NLCH_ISA");
    const std::string want = req ? req : "";
    if (want == "scalar") return scalar_table();
#if NLCH_X86
    if (want.empty() || want == "avx2") {
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
            return {Isa::avx2,
                    avx2::sum, avx2::dot, avx2::weighted_sq_sum, avx2::max_abs,
                    avx2::axpy, avx2::scale, avx2::add_scalar, avx2::mul,
                    avx2::dwell, avx2::dwell_prime, avx2::nonlocal_rho};
        }
    }
#endif
#if NLCH_NEON
    if (want.empty() || want == "neon") {
        return {Isa::neon,
                neon::sum, neon::dot, neon::weighted_sq_sum, neon::max_abs,
                neon::axpy, neon::scale, neon::add_scalar, neon::mul,
                neon::dwell, neon::dwell_prime, neon::nonlocal_rho};
    }
#endif
    return scalar_table();
}

const Table& table() {
    static const Table t = pick_table();
    return t;
}

} // namespace

Isa active_isa() { return table().isa; }

const char* isa_name() {
    switch (table().isa) {
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
        default: return "scalar";
    }
}

double sum(const double* a, std::size_t n) { return table().sum(a, n); }
double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }
double weighted_sq_sum(const double* w, const double* a, std::size_t n) {
    return table().weighted_sq_sum(w, a, n);
}
double max_abs(const double* a, std::size_t n) { return table().max_abs(a, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { table().axpy(alpha, x, y, n); }
void scale(double alpha, double* x, std::size_t n) { table().scale(alpha, x, n); }
void add_scalar(double c, double* x, std::size_t n) { table().add_scalar(c, x, n); }
void mul(const double* a, const double* b, double* out, std::size_t n) { table().mul(a, b, out, n); }
void dwell(const double* s, double* out, std::size_t n, double kappa) {
    table().dwell(s, out, n, kappa);
}
void dwell_prime(const double* s, double* out, std::size_t n, double kappa) {
    table().dwell_prime(s, out, n, kappa);
}
void nonlocal_rho(const double* a, const double* phi, const double* conv,
                  double* out, std::size_t n, double kappa) {
    table().nonlocal_rho(a, phi, conv, out, n, kappa);
}

} // namespace nlch::ops
