// NEON variants for aarch64, where NEON is baseline (no runtime probe needed).

#if defined(__aarch64__)

#include <arm_neon.h>

#include "seal/kernels.hpp"

namespace seal::kernels {

namespace {

inline double hsum128(float64x2_t v) { return vaddvq_f64(v); }

double dot_f64_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = hsum128(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double l2sq_f32_neon(const float* a, const float* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t va = vld1q_f32(a + i);
    float32x4_t vb = vld1q_f32(b + i);
    float64x2_t lo = vsubq_f64(vcvt_f64_f32(vget_low_f32(va)),
                               vcvt_f64_f32(vget_low_f32(vb)));
    float64x2_t hi = vsubq_f64(vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
    acc = vfmaq_f64(acc, lo, lo);
    acc = vfmaq_f64(acc, hi, hi);
  }
  double total = hsum128(acc);
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    total += d * d;
  }
  return total;
}

double sum_f64_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double total = hsum128(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

double sumsq_f32_neon(const float* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t v = vld1q_f32(x + i);
    float64x2_t lo = vcvt_f64_f32(vget_low_f32(v));
    float64x2_t hi = vcvt_high_f64_f32(v);
    acc = vfmaq_f64(acc, lo, lo);
    acc = vfmaq_f64(acc, hi, hi);
  }
  double total = hsum128(acc);
  for (; i < n; ++i) {
    total += static_cast<double>(x[i]) * static_cast<double>(x[i]);
  }
  return total;
}

void axpy_f32_neon(float alpha, const float* x, float* y, std::size_t n) {
  const float32x4_t va = vdupq_n_f32(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t vy = vld1q_f32(y + i);
    vy = vfmaq_f32(vy, va, vld1q_f32(x + i));
    vst1q_f32(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const Backend* neon_backend() {
  static const Backend backend{
      "neon",        dot_f64_neon, l2sq_f32_neon,
      sum_f64_neon,  sumsq_f32_neon, axpy_f32_neon,
  };
  return &backend;
}

}  // namespace seal::kernels

#endif  // aarch64
