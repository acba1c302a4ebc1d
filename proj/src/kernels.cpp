#include "seal/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "seal/errors.hpp"

namespace seal::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Backend* avx2_backend();  // kernels_avx2.cpp
#endif
#if defined(__aarch64__)
const Backend* neon_backend();  // kernels_neon.cpp
#endif

namespace {

const Backend* probe_best() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return avx2_backend();
  }
#endif
#if defined(__aarch64__)
  return neon_backend();
#endif
  return &scalar_backend();
}

std::atomic<const Backend*> g_active{nullptr};

const Backend* select_initial() {
  if (const char* env = std::getenv("SEAL_KERNELS")) {
    for (const Backend* b : available_backends()) {
      if (std::string(b->name) == env) return b;
    }
    // Unknown name: fall through to auto-detection rather than fail startup.
  }
  return probe_best();
}

}  // namespace

std::vector<const Backend*> available_backends() {
  std::vector<const Backend*> out{&scalar_backend()};
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    out.push_back(avx2_backend());
  }
#endif
#if defined(__aarch64__)
  out.push_back(neon_backend());
#endif
  return out;
}

const Backend& active() {
  const Backend* b = g_active.load(std::memory_order_acquire);
  if (b == nullptr) {
    b = select_initial();
    g_active.store(b, std::memory_order_release);
  }
  return *b;
}

void set_backend(const std::string& name) {
  for (const Backend* b : available_backends()) {
    if (name == b->name) {
      g_active.store(b, std::memory_order_release);
      return;
    }
  }
  throw ValidationError("unknown or unsupported kernel backend: " + name);
}

}  // namespace seal::kernels
