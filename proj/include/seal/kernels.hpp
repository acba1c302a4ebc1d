#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace seal::kernels {

// Data-parallel inner loops. Each has a scalar reference implementation and
// (on x86-64) an AVX2 variant selected at runtime. SIMD variants may
// reassociate reductions, so results agree with the scalar kernels only to
// rounding; equivalence is tested to tight tolerances, not bitwise.
struct Backend {
  const char* name;
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  double (*l2sq_f32)(const float* a, const float* b, std::size_t n);
  double (*sum_f64)(const double* x, std::size_t n);
  double (*sumsq_f32)(const float* x, std::size_t n);
  // y += alpha * x
  void (*axpy_f32)(float alpha, const float* x, float* y, std::size_t n);
};

const Backend& scalar_backend();
std::vector<const Backend*> available_backends();

// Active backend: best available at first use, overridable via the
// SEAL_KERNELS environment variable (e.g. SEAL_KERNELS=scalar) or set_backend.
const Backend& active();
void set_backend(const std::string& name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot_f64(a.data(), b.data(), a.size());
}

inline double l2_distance_sq(std::span<const float> a, std::span<const float> b) {
  return active().l2sq_f32(a.data(), b.data(), a.size());
}

inline double sum(std::span<const double> x) {
  return active().sum_f64(x.data(), x.size());
}

inline double sum_sq(std::span<const float> x) {
  return active().sumsq_f32(x.data(), x.size());
}

inline void axpy(float alpha, std::span<const float> x, std::span<float> y) {
  active().axpy_f32(alpha, x.data(), y.data(), x.size());
}

}  // namespace seal::kernels
