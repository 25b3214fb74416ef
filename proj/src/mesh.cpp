#include "jsg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "jsg/errors.hpp"

namespace jsg {

namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

void add_triangle(TriMesh& mesh, int a, int b, int c) {
  const Complex pa = mesh.nodes[static_cast<size_t>(a)];
  const double area = cross(mesh.nodes[static_cast<size_t>(b)] - pa, mesh.nodes[static_cast<size_t>(c)] - pa);
  if (area == 0.0) throw DomainError("degenerate triangle while meshing (resolution too coarse?)");
  if (area > 0.0)
    mesh.triangles.push_back({a, b, c});
  else
    mesh.triangles.push_back({a, c, b});
}

// Inner node index used as apex of outer interval b; ties go toward the sector middle.
int apex_of(int b, int c_in, int c_out) {
  const long num = static_cast<long>(2 * b + 1) * c_in;
  const long den = 2L * c_out;
  const long fl = num / den;
  const long rem = num - fl * den;
  if (2 * rem < den) return static_cast<int>(fl);
  if (2 * rem > den) return static_cast<int>(fl + 1);
  return (2 * b + 1 < c_out) ? static_cast<int>(fl + 1) : static_cast<int>(fl);
}

double gd(double x) { return 2.0 * std::atan(std::tanh(0.5 * x)); }
double gd_inv(double x) { return std::asinh(std::tan(x)); }

}  // namespace

int TriMesh::tag_id(const std::string& name) const {
  for (size_t i = 0; i < tag_names.size(); ++i)
    if (tag_names[i] == name) return static_cast<int>(i);
  return -1;
}

double TriMesh::signed_area(int t) const {
  const auto& tri = triangles[static_cast<size_t>(t)];
  const Complex a = nodes[static_cast<size_t>(tri[0])];
  return 0.5 * cross(nodes[static_cast<size_t>(tri[1])] - a, nodes[static_cast<size_t>(tri[2])] - a);
}

double TriMesh::chart_area() const {
  double s = 0.0;
  for (int t = 0; t < triangle_count(); ++t) s += signed_area(t);
  return s;
}

double TriMesh::min_angle_deg() const {
  double best = 180.0;
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      const Complex p = nodes[static_cast<size_t>(tri[static_cast<size_t>(k)])];
      const Complex u = nodes[static_cast<size_t>(tri[static_cast<size_t>((k + 1) % 3)])] - p;
      const Complex v = nodes[static_cast<size_t>(tri[static_cast<size_t>((k + 2) % 3)])] - p;
      const double ang = std::abs(std::arg(v / u)) * 180.0 / kPi;
      best = std::min(best, ang);
    }
  }
  return best;
}

Complex TriMesh::gradient(int t, const std::vector<double>& values) const {
  const auto& tri = triangles[static_cast<size_t>(t)];
  const Complex p0 = nodes[static_cast<size_t>(tri[0])];
  const Complex p1 = nodes[static_cast<size_t>(tri[1])];
  const Complex p2 = nodes[static_cast<size_t>(tri[2])];
  const double two_a = cross(p1 - p0, p2 - p0);
  const Complex i(0.0, 1.0);
  return i * (values[static_cast<size_t>(tri[0])] * (p2 - p1) + values[static_cast<size_t>(tri[1])] * (p0 - p2) +
              values[static_cast<size_t>(tri[2])] * (p1 - p0)) /
         two_a;
}

void TriMesh::validate() const {
  for (const auto& z : nodes)
    if (!(std::norm(z) < 1.0)) throw DomainError("mesh node outside the open unit disk");
  for (int t = 0; t < triangle_count(); ++t)
    if (!(signed_area(t) > 0.0)) throw DomainError("inverted or degenerate triangle");
  if (node_tag.size() != nodes.size()) throw DomainError("node tags missing");
  for (const auto& s : segments)
    if (node_tag[static_cast<size_t>(s.a)] < 0 || node_tag[static_cast<size_t>(s.b)] < 0)
      throw DomainError("boundary node without tag");
}

void tag_boundary(TriMesh& mesh, const std::function<int(int, int)>& tag_of_segment) {
  const auto n = static_cast<long long>(mesh.nodes.size());
  std::unordered_map<long long, int> count;
  count.reserve(mesh.triangles.size() * 3);
  for (const auto& tri : mesh.triangles)
    for (int k = 0; k < 3; ++k) ++count[tri[static_cast<size_t>(k)] * n + tri[static_cast<size_t>((k + 1) % 3)]];
  mesh.segments.clear();
  mesh.node_tag.assign(mesh.nodes.size(), -1);
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[static_cast<size_t>(k)];
      const int b = tri[static_cast<size_t>((k + 1) % 3)];
      if (count.count(b * n + a)) continue;
      const int tag = tag_of_segment(a, b);
      mesh.segments.push_back({a, b, tag});
      mesh.node_tag[static_cast<size_t>(a)] = tag;
    }
  }
  std::sort(mesh.segments.begin(), mesh.segments.end(),
            [](const BoundarySegment& x, const BoundarySegment& y) { return x.a < y.a; });
}

TriMesh ring_mesh(const RingLayout& L, const std::function<Complex(double, double)>& place) {
  const int m = L.sectors;
  const size_t K = L.radii.size();
  if (m < 1 || K < 2 || L.counts.size() != K) throw DomainError("ring layout needs >= 2 rings and one count per ring");
  TriMesh mesh;
  std::vector<int> base(K);
  auto is_center = [&](size_t k) { return L.has_center && k == 0; };
  for (size_t k = 0; k < K; ++k) {
    base[k] = mesh.node_count();
    if (is_center(k)) {
      mesh.center = mesh.node_count();
      mesh.nodes.push_back(place(0.0, L.radii[0]));
      mesh.ring.push_back(0);
      mesh.node_param.push_back(0.0);
      continue;
    }
    const int c = L.counts[k];
    if (c < 1) throw DomainError("ring interval count must be positive");
    const int size = m * c + (L.closed ? 0 : 1);
    for (int j = 0; j < size; ++j) {
      const double u = static_cast<double>(j) / c;
      mesh.nodes.push_back(place(u, L.radii[k]));
      mesh.ring.push_back(static_cast<int>(k));
      mesh.node_param.push_back(u);
    }
  }
  auto idx = [&](size_t k, int s, int j) {
    if (is_center(k)) return base[k];
    const int c = L.counts[k];
    int g = s * c + j;
    if (L.closed) g %= m * c;
    return base[k] + g;
  };
  for (size_t k = 1; k < K; ++k) {
    const int c_out = L.counts[k];
    for (int s = 0; s < m; ++s) {
      if (is_center(k - 1)) {
        for (int b = 0; b < c_out; ++b) add_triangle(mesh, base[0], idx(k, s, b), idx(k, s, b + 1));
        continue;
      }
      const int c_in = L.counts[k - 1];
      int prev = 0;
      for (int b = 0; b < c_out; ++b) {
        const int a = apex_of(b, c_in, c_out);
        for (int q = prev; q < a; ++q) add_triangle(mesh, idx(k - 1, s, q), idx(k - 1, s, q + 1), idx(k, s, b));
        add_triangle(mesh, idx(k - 1, s, a), idx(k, s, b), idx(k, s, b + 1));
        prev = a;
      }
      for (int q = prev; q < c_in; ++q) add_triangle(mesh, idx(k - 1, s, q), idx(k - 1, s, q + 1), idx(k, s, c_out));
    }
  }
  mesh.node_tag.assign(mesh.nodes.size(), -1);
  return mesh;
}

RingLayout hyperbolic_rings(double radius, double spacing, int sectors, double angular_span, const Metric& metric) {
  if (!(radius > 0.0) || !(spacing > 0.0)) throw DomainError("ring radius and spacing must be positive");
  const long K = std::lround(radius / spacing);
  if (K < 2) throw DomainError("resolution too coarse: fewer than two rings");
  const double h = (std::abs(K * spacing - radius) <= 1e-9 * radius) ? spacing : radius / static_cast<double>(K);
  const double R = metric.scale();
  RingLayout L;
  L.sectors = sectors;
  L.radii.push_back(0.0);
  L.counts.push_back(0);
  for (long k = 1; k <= K; ++k) {
    const double rho = metric.is_flat() ? k * h : std::tanh(0.5 * k * h / R);
    const double dr = rho - L.radii.back();
    const int want = static_cast<int>(std::lround(rho * angular_span / sectors / dr));
    int c = std::max({1, want, L.counts.back()});
    // Even counts keep every sector mirror-symmetric.
    if (k > 1 && c % 2 != 0) ++c;
    L.radii.push_back(rho);
    L.counts.push_back(c);
  }
  return L;
}

TriMesh halfplane_mesh(const Geodesic& gamma, double n, const Metric& metric, int resolution, int sectors) {
  if (!gamma.is_complete()) throw DomainError("half-plane mesh needs a complete geodesic");
  if (resolution < 1 || sectors < 2) throw DomainError("resolution too coarse");
  RingLayout L = hyperbolic_rings(n, 1.0 / resolution, sectors, kPi, metric);
  L.closed = false;
  const Mobius frame = gamma.frame();
  const double m = sectors;
  TriMesh mesh = ring_mesh(L, [&](double u, double rho) { return frame(std::polar(rho, kPi * u / m)); });
  auto on_b = [&](int i) {
    const double u = mesh.node_param[static_cast<size_t>(i)];
    return i == mesh.center || u == 0.0 || u == m;
  };
  mesh.tag_names = {"A", "B"};
  tag_boundary(mesh, [&](int a, int b) { return (on_b(a) && on_b(b)) ? 1 : 0; });
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (mesh.is_boundary(i) && on_b(i)) mesh.node_tag[static_cast<size_t>(i)] = 1;
    mesh.node_param[static_cast<size_t>(i)] *= kPi / m;
  }
  mesh.validate();
  return mesh;
}

TriMesh geodesic_disk_mesh(SurfacePoint p0, double n, const Metric& metric, int resolution, int sectors) {
  require_in_disk(p0);
  if (resolution < 1 || sectors < 3) throw DomainError("resolution too coarse");
  RingLayout L = hyperbolic_rings(n, 1.0 / resolution, sectors, kTwoPi, metric);
  const Mobius move = Mobius::translation(p0.z());
  const double m = sectors;
  TriMesh mesh = ring_mesh(L, [&](double u, double rho) { return move(std::polar(rho, kTwoPi * u / m)); });
  mesh.tag_names = {"circle"};
  tag_boundary(mesh, [](int, int) { return 0; });
  for (auto& u : mesh.node_param) u *= kTwoPi / m;
  mesh.validate();
  return mesh;
}

namespace {

struct PolygonBoundary {
  std::vector<double> start;   // unwrapped start angle of each piece, plus the closing angle
  std::vector<int> kind;       // 0 side, 1 horocycle
  std::vector<int> index;      // side index or vertex index
  std::vector<double> alpha;   // vertex angles
  std::vector<double> level;
  double R = 1.0;

  int piece_at(double theta) const {
    double t = theta;
    const double a0 = start.front();
    while (t < a0) t += kTwoPi;
    while (t >= a0 + kTwoPi) t -= kTwoPi;
    const auto it = std::upper_bound(start.begin(), start.end() - 1, t);
    return static_cast<int>(std::max<long>(0, (it - start.begin()) - 1));
  }

  double radius(double theta) const {
    const int p = piece_at(theta);
    const size_t n = alpha.size();
    if (kind[static_cast<size_t>(p)] == 0) {
      const size_t i = static_cast<size_t>(index[static_cast<size_t>(p)]);
      const double a = alpha[i];
      const double delta = ccw_span(a, alpha[(i + 1) % n]);
      const double k = std::cos(theta - (a + 0.5 * delta)) / std::cos(0.5 * delta);
      return 1.0 / (k + std::sqrt(std::max(0.0, k * k - 1.0)));
    }
    const size_t j = static_cast<size_t>(index[static_cast<size_t>(p)]);
    const double r = 1.0 / (std::exp(level[j] / R) + 1.0);
    const double c = (1.0 - r) * std::cos(theta - alpha[j]);
    return c - std::sqrt(std::max(0.0, c * c - (1.0 - 2.0 * r)));
  }
};

}  // namespace

TriMesh polygon_mesh(const std::vector<IdealPoint>& vertices, const std::vector<double>& levels, const Metric& metric,
                     const PolygonMeshOptions& options, PolygonCorners* corners) {
  const size_t n = vertices.size();
  if (n < 3 || levels.size() != n) throw DomainError("polygon mesh needs >= 3 vertices and one level each");
  if (options.rings < 2 || options.sectors < 1) throw DomainError("resolution too coarse");
  PolygonBoundary pb;
  pb.R = metric.scale();
  pb.level = levels;
  for (const auto& v : vertices) pb.alpha.push_back(v.theta());

  PolygonCorners pc;
  for (size_t i = 0; i < n; ++i) {
    const IdealPoint a = vertices[i];
    const IdealPoint b = vertices[(i + 1) % n];
    if (!(ccw_span(a.theta(), b.theta()) < kPi)) throw DomainError("the chart origin must lie inside the polygon");
    const Geodesic g = geodesic_between(a, b, metric);
    // Busemann functions are affine with slope +-1 along the side.
    const double ca = busemann(a, g.point(0.0), metric);
    const double cb = busemann(b, g.point(0.0), metric);
    const double s0 = -levels[i] - ca;
    const double s1 = levels[(i + 1) % n] + cb;
    if (!(s0 < s1)) throw DomainError("horocycles overlap along a polygon side");
    pc.side_start.push_back(g.point(s0));
    pc.side_end.push_back(g.point(s1));
  }

  double angle = std::arg(pc.side_start[0].z());
  for (size_t i = 0; i < n; ++i) {
    pb.start.push_back(angle);
    pb.kind.push_back(0);
    pb.index.push_back(static_cast<int>(i));
    angle += ccw_span(angle, std::arg(pc.side_end[i].z()));
    pb.start.push_back(angle);
    pb.kind.push_back(1);
    pb.index.push_back(static_cast<int>((i + 1) % n));
    angle += ccw_span(angle, std::arg(pc.side_start[(i + 1) % n].z()));
  }
  pb.start.push_back(angle);
  if (std::abs(angle - pb.start.front() - kTwoPi) > 1e-9)
    throw DomainError("truncated polygon is not star-shaped about the chart origin");

  const size_t pieces = 2 * n;
  std::vector<int> count(pieces);
  std::vector<double> ubreak{0.0};
  for (size_t p = 0; p < pieces; ++p) {
    const double w = pb.start[p + 1] - pb.start[p];
    count[p] = std::max(1, static_cast<int>(std::lround(options.sectors * w / kTwoPi)));
    ubreak.push_back(ubreak.back() + count[p]);
  }
  const int m = static_cast<int>(ubreak.back());

  auto warped = [&](double u) {
    const auto it = std::upper_bound(ubreak.begin(), ubreak.end() - 1, u);
    const size_t p = static_cast<size_t>(std::max<long>(0, (it - ubreak.begin()) - 1));
    return pb.start[p] + (u - ubreak[p]) / count[p] * (pb.start[p + 1] - pb.start[p]);
  };
  const double a0 = pb.start.front();
  auto theta_of = [&](double u, double rho) {
    const double uniform = a0 + kTwoPi * u / m;
    return uniform + std::pow(rho, options.core_blend) * (warped(u) - uniform);
  };

  RingLayout L;
  L.sectors = m;
  for (int k = 0; k <= options.rings; ++k) {
    L.radii.push_back(static_cast<double>(k) / options.rings);
    L.counts.push_back(k);
  }
  TriMesh mesh = ring_mesh(L, [&](double u, double rho) {
    const double th = theta_of(u, rho);
    return std::polar(rho * pb.radius(th), th);
  });

  for (size_t i = 0; i < n; ++i) mesh.tag_names.push_back("side" + std::to_string(i));
  for (size_t i = 0; i < n; ++i) mesh.tag_names.push_back("horo" + std::to_string(i));
  tag_boundary(mesh, [&](int a, int b) {
    double ua = mesh.node_param[static_cast<size_t>(a)];
    double ub = mesh.node_param[static_cast<size_t>(b)];
    if (ub < ua) ub += m;
    double mid = 0.5 * (ua + ub);
    if (mid >= m) mid -= m;
    const auto it = std::upper_bound(ubreak.begin(), ubreak.end() - 1, mid);
    const size_t p = static_cast<size_t>(std::max<long>(0, (it - ubreak.begin()) - 1));
    return pb.kind[p] == 0 ? pb.index[p] : static_cast<int>(n) + pb.index[p];
  });
  mesh.validate();
  if (corners) *corners = std::move(pc);
  return mesh;
}

TriMesh fermi_rectangle_mesh(const FermiChart& chart, double s0, double s1, double t0, double t1, int cells_s,
                             int cells_t) {
  if (!(s0 < s1) || !(t0 < t1) || cells_s < 1 || cells_t < 1) throw DomainError("invalid Fermi rectangle");
  const double R = chart.metric().scale();
  const double g0 = R * gd(s0 / R);
  const double g1 = R * gd(s1 / R);
  TriMesh mesh;
  for (int j = 0; j <= cells_t; ++j) {
    const double t = t0 + (t1 - t0) * j / cells_t;
    for (int i = 0; i <= cells_s; ++i) {
      const double sigma = g0 + (g1 - g0) * i / cells_s;
      const double s = (i == 0) ? s0 : (i == cells_s ? s1 : R * gd_inv(sigma / R));
      mesh.nodes.push_back(chart.point(s, t).z());
      mesh.node_param.push_back(s);
      mesh.ring.push_back(-1);
    }
  }
  auto id = [&](int i, int j) { return j * (cells_s + 1) + i; };
  for (int j = 0; j < cells_t; ++j) {
    for (int i = 0; i < cells_s; ++i) {
      add_triangle(mesh, id(i, j), id(i + 1, j), id(i + 1, j + 1));
      add_triangle(mesh, id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }
  }
  mesh.tag_names = {"D"};
  tag_boundary(mesh, [](int, int) { return 0; });
  mesh.validate();
  return mesh;
}

TriMesh annulus_mesh(Complex center, double r_in, double r_out, int per_ring) {
  if (!(0.0 < r_in && r_in < r_out)) throw DomainError("annulus needs 0 < r_in < r_out");
  if (per_ring < 8 || per_ring % 2 != 0) throw DomainError("annulus needs an even ring count >= 8");
  const double logratio = std::log(r_out / r_in);
  const int rings = std::max(1, static_cast<int>(std::ceil(logratio / (kTwoPi / per_ring))));
  RingLayout L;
  L.sectors = per_ring / 2;
  L.has_center = false;
  for (int k = 0; k <= rings; ++k) {
    L.radii.push_back(k == rings ? r_out : r_in * std::exp(logratio * k / rings));
    L.counts.push_back(2);
  }
  const double m = L.sectors;
  TriMesh mesh = ring_mesh(L, [&](double u, double r) { return center + std::polar(r, kTwoPi * u / m); });
  mesh.tag_names = {"inner", "outer"};
  tag_boundary(mesh, [&](int a, int) { return mesh.ring[static_cast<size_t>(a)] == 0 ? 0 : 1; });
  mesh.validate();
  return mesh;
}

PointLocator::PointLocator(const TriMesh& mesh, int buckets_per_side) : mesh_(&mesh) {
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  for (const auto& z : mesh.nodes) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  }
  const int side = buckets_per_side > 0
                       ? buckets_per_side
                       : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.triangle_count()) / 2.0)));
  const double span = std::max(xmax - xmin, ymax - ymin) * (1.0 + 1e-9) + 1e-300;
  cell_ = span / side;
  x0_ = xmin;
  y0_ = ymin;
  nx_ = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / cell_)) + 1);
  buckets_.assign(static_cast<size_t>(nx_ * ny_), {});
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double bx0 = 1e300, by0 = 1e300, bx1 = -1e300, by1 = -1e300;
    for (int v : mesh.triangles[static_cast<size_t>(t)]) {
      const Complex z = mesh.nodes[static_cast<size_t>(v)];
      bx0 = std::min(bx0, z.real());
      bx1 = std::max(bx1, z.real());
      by0 = std::min(by0, z.imag());
      by1 = std::max(by1, z.imag());
    }
    const int i0 = std::clamp(static_cast<int>((bx0 - x0_) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((bx1 - x0_) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((by0 - y0_) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((by1 - y0_) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<size_t>(j * nx_ + i)].push_back(t);
  }
}

int PointLocator::locate(Complex z, std::array<double, 3>* bary, double slack) const {
  const int i = static_cast<int>(std::floor((z.real() - x0_) / cell_));
  const int j = static_cast<int>(std::floor((z.imag() - y0_) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  std::array<double, 3> best_b{};
  for (int t : buckets_[static_cast<size_t>(j * nx_ + i)]) {
    const auto& tri = mesh_->triangles[static_cast<size_t>(t)];
    const Complex p0 = mesh_->nodes[static_cast<size_t>(tri[0])];
    const Complex p1 = mesh_->nodes[static_cast<size_t>(tri[1])];
    const Complex p2 = mesh_->nodes[static_cast<size_t>(tri[2])];
    const double a = cross(p1 - p0, p2 - p0);
    const std::array<double, 3> b{cross(p1 - z, p2 - z) / a, cross(p2 - z, p0 - z) / a, 0.0};
    const std::array<double, 3> bb{b[0], b[1], 1.0 - b[0] - b[1]};
    const double mn = std::min({bb[0], bb[1], bb[2]});
    if (mn > best_min) {
      best_min = mn;
      best = t;
      best_b = bb;
    }
  }
  if (best < 0 || best_min < -slack) return -1;
  if (bary) *bary = best_b;
  return best;
}

double PointLocator::interpolate(const std::vector<double>& values, Complex z) const {
  std::array<double, 3> b{};
  const int t = locate(z, &b);
  if (t < 0) {
    std::ostringstream os;
    os << "point (" << z.real() << ", " << z.imag() << ") lies outside the mesh";
    throw DomainError(os.str());
  }
  const auto& tri = mesh_->triangles[static_cast<size_t>(t)];
  return b[0] * values[static_cast<size_t>(tri[0])] + b[1] * values[static_cast<size_t>(tri[1])] +
         b[2] * values[static_cast<size_t>(tri[2])];
}

std::vector<Complex> recovered_gradient(const TriMesh& mesh, const std::vector<double>& values) {
  std::vector<Complex> g(mesh.nodes.size(), Complex(0.0, 0.0));
  std::vector<double> w(mesh.nodes.size(), 0.0);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double a = mesh.signed_area(t);
    const Complex gt = mesh.gradient(t, values);
    for (int v : mesh.triangles[static_cast<size_t>(t)]) {
      g[static_cast<size_t>(v)] += a * gt;
      w[static_cast<size_t>(v)] += a;
    }
  }
  for (size_t i = 0; i < g.size(); ++i) g[i] /= w[i];
  return g;
}

}  // namespace jsg
