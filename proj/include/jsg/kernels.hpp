#pragma once

// Per-triangle quadrature kernels shared by the minimal-surface assembly and
// the graph-metric modulus. Scalar reference plus an AVX2 variant picked at
// runtime; both evaluate the same operations in the same order, so their
// results agree bit for bit.

#include <cstddef>

namespace jsg::kernels {

/// Structure-of-arrays view of n triangles: constant chart gradient (qx, qy),
/// chart area, and 1/lambda^2 at the three edge-midpoint quadrature points.
struct TriangleBatch {
  std::size_t n = 0;
  const double* qx = nullptr;
  const double* qy = nullptr;
  const double* area = nullptr;
  const double* il0 = nullptr;
  const double* il1 = nullptr;
  const double* il2 = nullptr;
};

/// a = int 1/W, b = int 1/(lambda^2 W^3), W = sqrt(1 + |q|^2 / lambda^2).
using MinimalFn = void (*)(const TriangleBatch&, double* a, double* b);
/// Graph-metric Dirichlet tensor int W (I - q q^T / (lambda^2 + |q|^2)).
using TensorFn = void (*)(const TriangleBatch&, double* kxx, double* kxy, double* kyy);

enum class Isa { Scalar, Avx2 };
const char* to_string(Isa isa);

bool avx2_available();
/// Currently selected variant (AVX2 when the CPU has it, unless overridden).
Isa active();
/// Test hook: force a variant; forcing AVX2 on a CPU without it is ignored.
void select(Isa isa);

void minimal_coefficients(const TriangleBatch& batch, double* a, double* b);
void graph_tensor(const TriangleBatch& batch, double* kxx, double* kxy, double* kyy);

namespace scalar {
void minimal_coefficients(const TriangleBatch& batch, double* a, double* b);
void graph_tensor(const TriangleBatch& batch, double* kxx, double* kxy, double* kyy);
}  // namespace scalar

namespace avx2 {
void minimal_coefficients(const TriangleBatch& batch, double* a, double* b);
void graph_tensor(const TriangleBatch& batch, double* kxx, double* kxy, double* kyy);
}  // namespace avx2

}  // namespace jsg::kernels
