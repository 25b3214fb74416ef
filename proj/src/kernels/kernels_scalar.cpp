#include <cmath>

#include "jsg/kernels.hpp"

namespace jsg::kernels::scalar {

void minimal_coefficients(const TriangleBatch& t, double* a, double* b) {
  for (std::size_t i = 0; i < t.n; ++i) {
    const double s = t.qx[i] * t.qx[i] + t.qy[i] * t.qy[i];
    const double il[3] = {t.il0[i], t.il1[i], t.il2[i]};
    double sa = 0.0;
    double sb = 0.0;
    for (int p = 0; p < 3; ++p) {
      const double w2 = 1.0 + s * il[p];
      const double w = std::sqrt(w2);
      const double inv = 1.0 / w;
      sa = sa + inv;
      sb = sb + il[p] * inv / w2;
    }
    const double scale = t.area[i] / 3.0;
    a[i] = sa * scale;
    b[i] = sb * scale;
  }
}

void graph_tensor(const TriangleBatch& t, double* kxx, double* kxy, double* kyy) {
  for (std::size_t i = 0; i < t.n; ++i) {
    const double qx = t.qx[i];
    const double qy = t.qy[i];
    const double s = qx * qx + qy * qy;
    const double il[3] = {t.il0[i], t.il1[i], t.il2[i]};
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
    for (int p = 0; p < 3; ++p) {
      const double w2 = 1.0 + s * il[p];
      const double w = std::sqrt(w2);
      // 1 / (lambda^2 + |q|^2) = il / w2
      const double c = il[p] / w2;
      xx = xx + w * (1.0 - qx * qx * c);
      xy = xy - w * (qx * qy * c);
      yy = yy + w * (1.0 - qy * qy * c);
    }
    const double scale = t.area[i] / 3.0;
    kxx[i] = xx * scale;
    kxy[i] = xy * scale;
    kyy[i] = yy * scale;
  }
}

}  // namespace jsg::kernels::scalar
