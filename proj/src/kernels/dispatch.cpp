#include <atomic>
#include <cstdlib>
#include <cstring>

#include "jsg/kernels.hpp"

namespace jsg::kernels {

namespace {

#ifndef JSG_BUILD_AVX2
// Without the AVX2 translation unit the vector entry points alias the reference.
void avx2_min_fallback(const TriangleBatch& t, double* a, double* b) { scalar::minimal_coefficients(t, a, b); }
void avx2_ten_fallback(const TriangleBatch& t, double* x, double* y, double* z) { scalar::graph_tensor(t, x, y, z); }
#endif

bool cpu_has_avx2() {
#if defined(JSG_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial() {
  const char* env = std::getenv("JSG_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial()};
  return isa;
}

}  // namespace

#ifndef JSG_BUILD_AVX2
namespace avx2 {
void minimal_coefficients(const TriangleBatch& t, double* a, double* b) { avx2_min_fallback(t, a, b); }
void graph_tensor(const TriangleBatch& t, double* x, double* y, double* z) { avx2_ten_fallback(t, x, y, z); }
}  // namespace avx2
#endif

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() { return cpu_has_avx2(); }

Isa active() { return current().load(); }

void select(Isa isa) {
  if (isa == Isa::Avx2 && !cpu_has_avx2()) return;
  current().store(isa);
}

void minimal_coefficients(const TriangleBatch& batch, double* a, double* b) {
  if (active() == Isa::Avx2)
    avx2::minimal_coefficients(batch, a, b);
  else
    scalar::minimal_coefficients(batch, a, b);
}

void graph_tensor(const TriangleBatch& batch, double* kxx, double* kxy, double* kyy) {
  if (active() == Isa::Avx2)
    avx2::graph_tensor(batch, kxx, kxy, kyy);
  else
    scalar::graph_tensor(batch, kxx, kxy, kyy);
}

}  // namespace jsg::kernels
