#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "jsg/kernels.hpp"
#include "jsg/parallel.hpp"

using namespace jsg;
namespace k = jsg::kernels;

namespace {

struct Batch {
  std::vector<double> qx, qy, area, il0, il1, il2;
  k::TriangleBatch view() const {
    return {qx.size(), qx.data(), qy.data(), area.data(), il0.data(), il1.data(), il2.data()};
  }
};

Batch random_batch(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> q(-50.0, 50.0), a(1e-6, 1e-2), r(0.0, 0.99);
  Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    b.qx.push_back(q(rng));
    b.qy.push_back(i % 7 == 0 ? 0.0 : q(rng));
    b.area.push_back(a(rng));
    for (auto* il : {&b.il0, &b.il1, &b.il2}) {
      const double rr = r(rng);
      il->push_back((1 - rr * rr) * (1 - rr * rr) / 4.0);
    }
  }
  return b;
}

bool same_bits(const std::vector<double>& x, const std::vector<double>& y) {
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

// Independent reference: edge-midpoint rule written out directly.
void reference(const Batch& b, std::size_t i, double& a, double& bb, double& kxx, double& kxy, double& kyy) {
  a = bb = kxx = kxy = kyy = 0;
  const double q2 = b.qx[i] * b.qx[i] + b.qy[i] * b.qy[i];
  for (double il : {b.il0[i], b.il1[i], b.il2[i]}) {
    const double w = std::sqrt(1.0 + q2 * il);
    a += b.area[i] / 3.0 / w;
    bb += b.area[i] / 3.0 * il / (w * w * w);
    const double s = il / (w * w);  // 1 / (lambda^2 + |q|^2)
    kxx += b.area[i] / 3.0 * w * (1.0 - b.qx[i] * b.qx[i] * s);
    kxy += b.area[i] / 3.0 * w * (-b.qx[i] * b.qy[i] * s);
    kyy += b.area[i] / 3.0 * w * (1.0 - b.qy[i] * b.qy[i] * s);
  }
}

}  // namespace

TEST_CASE("scalar kernels against a direct evaluation") {
  const Batch b = random_batch(101, 3);
  std::vector<double> a(101), bb(101), xx(101), xy(101), yy(101);
  k::scalar::minimal_coefficients(b.view(), a.data(), bb.data());
  k::scalar::graph_tensor(b.view(), xx.data(), xy.data(), yy.data());
  for (std::size_t i = 0; i < 101; ++i) {
    double ra, rb, rxx, rxy, ryy;
    reference(b, i, ra, rb, rxx, rxy, ryy);
    CHECK(a[i] == doctest::Approx(ra).epsilon(1e-13));
    CHECK(bb[i] == doctest::Approx(rb).epsilon(1e-13));
    CHECK(xx[i] == doctest::Approx(rxx).epsilon(1e-12));
    CHECK(xy[i] == doctest::Approx(rxy).epsilon(1e-12).scale(b.area[i]));
    CHECK(yy[i] == doctest::Approx(ryy).epsilon(1e-12));
  }
}

TEST_CASE("AVX2 kernels match the scalar reference bit for bit") {
  if (!k::avx2_available()) {
    MESSAGE("AVX2 not available on this CPU; vector path not exercised");
    return;
  }
  // lengths around the vector width exercise the tail handling
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 1000u, 1003u}) {
    const Batch b = random_batch(n, static_cast<unsigned>(n) + 10);
    std::vector<double> sa(n), sb(n), va(n), vb(n);
    k::scalar::minimal_coefficients(b.view(), sa.data(), sb.data());
    k::avx2::minimal_coefficients(b.view(), va.data(), vb.data());
    CHECK(same_bits(sa, va));
    CHECK(same_bits(sb, vb));
    std::vector<double> sx(n), sy(n), sz(n), vx(n), vy(n), vz(n);
    k::scalar::graph_tensor(b.view(), sx.data(), sy.data(), sz.data());
    k::avx2::graph_tensor(b.view(), vx.data(), vy.data(), vz.data());
    CHECK(same_bits(sx, vx));
    CHECK(same_bits(sy, vy));
    CHECK(same_bits(sz, vz));
  }
}

TEST_CASE("runtime dispatch") {
  const k::Isa before = k::active();
  k::select(k::Isa::Scalar);
  CHECK(k::active() == k::Isa::Scalar);
  CHECK(std::string(k::to_string(k::Isa::Scalar)) == "scalar");
  const Batch b = random_batch(33, 1);
  std::vector<double> d1(33), d2(33), s1(33), s2(33);
  k::minimal_coefficients(b.view(), d1.data(), d2.data());
  k::scalar::minimal_coefficients(b.view(), s1.data(), s2.data());
  CHECK(same_bits(d1, s1));
  k::select(k::Isa::Avx2);
  CHECK(k::active() == (k::avx2_available() ? k::Isa::Avx2 : k::Isa::Scalar));
  k::minimal_coefficients(b.view(), d1.data(), d2.data());
  CHECK(same_bits(d1, s1));
  k::select(before);
}

TEST_CASE("parallel_for covers the range once") {
  for (std::size_t n : {0u, 1u, 17u, 10000u}) {
    std::vector<int> hits(n, 0);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) ++hits[i];
    });
    for (int h : hits) CHECK(h == 1);
  }
  CHECK(thread_count() >= 1);
}
