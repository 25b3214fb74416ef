#include <immintrin.h>

#include "jsg/kernels.hpp"

namespace jsg::kernels::avx2 {

namespace {

// Tail lanes go through the scalar reference, which rounds identically.
TriangleBatch tail(const TriangleBatch& t, std::size_t from) {
  TriangleBatch r = t;
  r.n = t.n - from;
  r.qx += from;
  r.qy += from;
  r.area += from;
  r.il0 += from;
  r.il1 += from;
  r.il2 += from;
  return r;
}

}  // namespace

void minimal_coefficients(const TriangleBatch& t, double* a, double* b) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d three = _mm256_set1_pd(3.0);
  std::size_t i = 0;
  for (; i + 4 <= t.n; i += 4) {
    const __m256d qx = _mm256_loadu_pd(t.qx + i);
    const __m256d qy = _mm256_loadu_pd(t.qy + i);
    const __m256d s = _mm256_add_pd(_mm256_mul_pd(qx, qx), _mm256_mul_pd(qy, qy));
    const __m256d il[3] = {_mm256_loadu_pd(t.il0 + i), _mm256_loadu_pd(t.il1 + i), _mm256_loadu_pd(t.il2 + i)};
    __m256d sa = _mm256_setzero_pd();
    __m256d sb = _mm256_setzero_pd();
    for (int p = 0; p < 3; ++p) {
      const __m256d w2 = _mm256_add_pd(one, _mm256_mul_pd(s, il[p]));
      const __m256d w = _mm256_sqrt_pd(w2);
      const __m256d inv = _mm256_div_pd(one, w);
      sa = _mm256_add_pd(sa, inv);
      sb = _mm256_add_pd(sb, _mm256_div_pd(_mm256_mul_pd(il[p], inv), w2));
    }
    const __m256d scale = _mm256_div_pd(_mm256_loadu_pd(t.area + i), three);
    _mm256_storeu_pd(a + i, _mm256_mul_pd(sa, scale));
    _mm256_storeu_pd(b + i, _mm256_mul_pd(sb, scale));
  }
  if (i < t.n) scalar::minimal_coefficients(tail(t, i), a + i, b + i);
}

void graph_tensor(const TriangleBatch& t, double* kxx, double* kxy, double* kyy) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d three = _mm256_set1_pd(3.0);
  std::size_t i = 0;
  for (; i + 4 <= t.n; i += 4) {
    const __m256d qx = _mm256_loadu_pd(t.qx + i);
    const __m256d qy = _mm256_loadu_pd(t.qy + i);
    const __m256d s = _mm256_add_pd(_mm256_mul_pd(qx, qx), _mm256_mul_pd(qy, qy));
    const __m256d qxx = _mm256_mul_pd(qx, qx);
    const __m256d qxy = _mm256_mul_pd(qx, qy);
    const __m256d qyy = _mm256_mul_pd(qy, qy);
    const __m256d il[3] = {_mm256_loadu_pd(t.il0 + i), _mm256_loadu_pd(t.il1 + i), _mm256_loadu_pd(t.il2 + i)};
    __m256d xx = _mm256_setzero_pd();
    __m256d xy = _mm256_setzero_pd();
    __m256d yy = _mm256_setzero_pd();
    for (int p = 0; p < 3; ++p) {
      const __m256d w2 = _mm256_add_pd(one, _mm256_mul_pd(s, il[p]));
      const __m256d w = _mm256_sqrt_pd(w2);
      const __m256d c = _mm256_div_pd(il[p], w2);
      xx = _mm256_add_pd(xx, _mm256_mul_pd(w, _mm256_sub_pd(one, _mm256_mul_pd(qxx, c))));
      xy = _mm256_sub_pd(xy, _mm256_mul_pd(w, _mm256_mul_pd(qxy, c)));
      yy = _mm256_add_pd(yy, _mm256_mul_pd(w, _mm256_sub_pd(one, _mm256_mul_pd(qyy, c))));
    }
    const __m256d scale = _mm256_div_pd(_mm256_loadu_pd(t.area + i), three);
    _mm256_storeu_pd(kxx + i, _mm256_mul_pd(xx, scale));
    _mm256_storeu_pd(kxy + i, _mm256_mul_pd(xy, scale));
    _mm256_storeu_pd(kyy + i, _mm256_mul_pd(yy, scale));
  }
  if (i < t.n) scalar::graph_tensor(tail(t, i), kxx + i, kxy + i, kyy + i);
}

}  // namespace jsg::kernels::avx2
