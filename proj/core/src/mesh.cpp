#include "fmt_engine/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <Eigen/Eigenvalues>

#include "fmt_engine/error.hpp"

namespace fmt_engine {

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double corner_angle(const Vec3& apex, const Vec3& p, const Vec3& q) {
  const Vec3 u = p - apex;
  const Vec3 v = q - apex;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

double cotangent(const Vec3& apex, const Vec3& p, const Vec3& q) {
  const Vec3 u = p - apex;
  const Vec3 v = q - apex;
  return u.dot(v) / u.cross(v).norm();
}

double bounding_box_diagonal(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

}  // namespace

void validate_closed(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) throw ValidationError("mesh has no triangles");
  const int nv = static_cast<int>(mesh.vertices.size());
  std::vector<char> referenced(mesh.vertices.size(), 0);
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangles.size() * 3);

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= nv) {
        std::ostringstream os;
        os << "triangle " << t << " references vertex " << tri[k] << " out of range [0, " << nv << ")";
        throw ValidationError(os.str());
      }
      referenced[tri[k]] = 1;
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0]) {
      std::ostringstream os;
      os << "triangle " << t << " is degenerate (repeated vertex)";
      throw ValidationError(os.str());
    }
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      if (++directed[edge_key(a, b)] > 1) {
        std::ostringstream os;
        os << "edge (" << a << ", " << b << ") is traversed twice in the same direction "
           << "(inconsistent orientation or non-manifold edge)";
        throw ValidationError(os.str());
      }
    }
  }
  for (const auto& [key, count] : directed) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (!directed.contains(edge_key(b, a))) {
      std::ostringstream os;
      os << "edge (" << a << ", " << b << ") has no opposite half-edge: mesh is not closed";
      throw ValidationError(os.str());
    }
  }
  for (int i = 0; i < nv; ++i) {
    if (!referenced[i]) {
      std::ostringstream os;
      os << "vertex " << i << " is not referenced by any triangle";
      throw ValidationError(os.str());
    }
  }
}

void validate_convex(const TriangleMesh& mesh) {
  const double eps = 1e-8 * bounding_box_diagonal(mesh);
  const std::size_t nv = mesh.vertices.size();
  std::vector<double> xs(nv), ys(nv), zs(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    xs[i] = mesh.vertices[i].x();
    ys[i] = mesh.vertices[i].y();
    zs[i] = mesh.vertices[i].z();
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3& a = mesh.vertices[tri[0]];
    Vec3 n = (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a);
    const double len = n.norm();
    if (!(len > 0.0)) {
      std::ostringstream os;
      os << "triangle " << t << " has zero area";
      throw ValidationError(os.str());
    }
    n /= len;
    const double d = n.dot(a) + eps;
    for (std::size_t i = 0; i < nv; ++i) {
      if (n.x() * xs[i] + n.y() * ys[i] + n.z() * zs[i] > d) {
        std::ostringstream os;
        os << "mesh is not convex: vertex " << i << " lies outside the plane of triangle " << t
           << " by " << n.dot(mesh.vertices[i]) - (d - eps);
        throw ValidationError(os.str());
      }
    }
  }
}

double signed_volume(const TriangleMesh& mesh) {
  double six_v = 0.0;
  for (const auto& tri : mesh.triangles) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    six_v += a.dot(b.cross(c));
  }
  return six_v / 6.0;
}

double surface_area(const TriangleMesh& mesh) {
  double s = 0.0;
  for (const auto& tri : mesh.triangles) {
    const Vec3& a = mesh.vertices[tri[0]];
    s += 0.5 * (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a).norm();
  }
  return s;
}

double edge_mean_curvature_integral(const TriangleMesh& mesh) {
  validate_closed(mesh);
  std::vector<Vec3> normal(mesh.triangles.size());
  std::vector<Vec3> centroid(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3& a = mesh.vertices[tri[0]];
    normal[t] = (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a).normalized();
    centroid[t] = (a + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
  }
  std::unordered_map<std::uint64_t, std::size_t> owner;
  owner.reserve(mesh.triangles.size() * 3);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) owner[edge_key(mesh.triangles[t][k], mesh.triangles[t][(k + 1) % 3])] = t;
  }
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.triangles[t][k];
      const int b = mesh.triangles[t][(k + 1) % 3];
      if (a > b) continue;
      const std::size_t u = owner.at(edge_key(b, a));
      double angle = std::atan2(normal[t].cross(normal[u]).norm(), normal[t].dot(normal[u]));
      if ((centroid[u] - centroid[t]).dot(normal[t]) > 0.0) angle = -angle;
      total += 0.5 * (mesh.vertices[a] - mesh.vertices[b]).norm() * angle;
    }
  }
  return total;
}

double angle_defect_sum(const TriangleMesh& mesh) {
  std::vector<double> angle(mesh.vertices.size(), 0.0);
  std::vector<char> used(mesh.vertices.size(), 0);
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int i = tri[k];
      angle[i] += corner_angle(mesh.vertices[i], mesh.vertices[tri[(k + 1) % 3]],
                               mesh.vertices[tri[(k + 2) % 3]]);
      used[i] = 1;
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < angle.size(); ++i) {
    if (used[i]) total += 2.0 * kPi - angle[i];
  }
  return total;
}

int euler_characteristic(const TriangleMesh& mesh) {
  validate_closed(mesh);
  const double chi = angle_defect_sum(mesh) / (2.0 * kPi);
  const double rounded = std::round(chi);
  if (std::abs(chi - rounded) > 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << "angle-defect sum / 2pi = " << chi << " is not within 1e-9 of an integer";
    throw Error(os.str());
  }
  return static_cast<int>(rounded);
}

std::vector<VertexCurvature> vertex_curvatures(const TriangleMesh& mesh) {
  const std::size_t nv = mesh.vertices.size();
  const auto& x = mesh.vertices;
  std::vector<VertexCurvature> out(nv);
  std::vector<Vec3> laplace(nv, Vec3::Zero());
  std::vector<Vec3> normal(nv, Vec3::Zero());
  std::vector<double> angle_sum(nv, 0.0);
  std::vector<double> area(nv, 0.0);
  std::vector<std::vector<int>> neighbours(nv);

  for (const auto& tri : mesh.triangles) {
    const Vec3 face = (x[tri[1]] - x[tri[0]]).cross(x[tri[2]] - x[tri[0]]);
    const double face_area = 0.5 * face.norm();
    const Vec3 face_normal = face.normalized();

    double angles[3];
    for (int k = 0; k < 3; ++k) {
      angles[k] = corner_angle(x[tri[k]], x[tri[(k + 1) % 3]], x[tri[(k + 2) % 3]]);
    }
    for (int k = 0; k < 3; ++k) {
      const int i = tri[k];
      const int j = tri[(k + 1) % 3];
      const int l = tri[(k + 2) % 3];
      angle_sum[i] += angles[k];
      normal[i] += angles[k] * face_normal;
      neighbours[i].push_back(j);
      neighbours[i].push_back(l);

      // The corner at k weights the opposite edge (j, l).
      const double cot_k = cotangent(x[i], x[j], x[l]);
      laplace[j] += cot_k * (x[j] - x[l]);
      laplace[l] += cot_k * (x[l] - x[j]);

      // Mixed Voronoi area.
      const bool obtuse_here = angles[k] > 0.5 * kPi;
      const bool obtuse_other = angles[(k + 1) % 3] > 0.5 * kPi || angles[(k + 2) % 3] > 0.5 * kPi;
      if (obtuse_here) {
        area[i] += 0.5 * face_area;
      } else if (obtuse_other) {
        area[i] += 0.25 * face_area;
      } else {
        const double cot_j = cotangent(x[j], x[l], x[i]);
        const double cot_l = cotangent(x[l], x[i], x[j]);
        area[i] += 0.125 * ((x[i] - x[l]).squaredNorm() * cot_j + (x[i] - x[j]).squaredNorm() * cot_l);
      }
    }
  }

  for (std::size_t i = 0; i < nv; ++i) {
    auto& vc = out[i];
    vc.area = area[i];
    vc.normal = normal[i].normalized();
    vc.gaussian = (2.0 * kPi - angle_sum[i]) / area[i];
    const Vec3 mean_normal = laplace[i] / (2.0 * area[i]);
    const double h = 0.5 * mean_normal.norm();
    vc.mean = mean_normal.dot(vc.normal) >= 0.0 ? h : -h;

    // Tangent frame and least-squares fit of the second fundamental form to
    // the normal curvatures along incident edges; only its eigenvectors are used.
    const Vec3& n = vc.normal;
    Vec3 e1 = (std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(n).normalized();
    Vec3 e2 = n.cross(e1);
    auto& nb = neighbours[i];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    Eigen::Matrix3d normal_eq = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (int j : nb) {
      const Vec3 d = x[j] - x[i];
      const double kn = -2.0 * n.dot(d) / d.squaredNorm();
      Vec3 t = d - n.dot(d) * n;
      const double tl = t.norm();
      if (!(tl > 0.0)) continue;
      t /= tl;
      const double u = t.dot(e1);
      const double v = t.dot(e2);
      const Eigen::Vector3d row(u * u, 2.0 * u * v, v * v);
      normal_eq += row * row.transpose();
      rhs += row * kn;
    }
    Vec3 d1 = e1;
    const Eigen::Vector3d sol = normal_eq.ldlt().solve(rhs);
    if (sol.allFinite()) {
      Eigen::Matrix2d form;
      form << sol(0), sol(1), sol(1), sol(2);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(form);
      const Eigen::Vector2d top = es.eigenvectors().col(1);
      d1 = (top(0) * e1 + top(1) * e2).normalized();
    }
    vc.dir1 = d1;
    vc.dir2 = n.cross(d1);
    const double split = std::sqrt(std::max(vc.mean * vc.mean - vc.gaussian, 0.0));
    vc.kappa1 = vc.mean + split;
    vc.kappa2 = vc.mean - split;
  }
  return out;
}

TriangleMesh make_icosphere(double radius, int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v.normalize();
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int lvl = 0; lvl < level; ++lvl) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      const int idx = static_cast<int>(m.vertices.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.triangles.size() * 4);
    for (const auto& tri : m.triangles) {
      const int a = mid(tri[0], tri[1]);
      const int b = mid(tri[1], tri[2]);
      const int c = mid(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    m.triangles = std::move(next);
  }
  for (auto& tri : m.triangles) {
    const Vec3& a = m.vertices[tri[0]];
    const Vec3 n = (m.vertices[tri[1]] - a).cross(m.vertices[tri[2]] - a);
    if (n.dot(a + m.vertices[tri[1]] + m.vertices[tri[2]]) < 0.0) std::swap(tri[1], tri[2]);
  }
  for (auto& v : m.vertices) v *= radius;
  return m;
}

TriangleMesh make_spheroid_mesh(double equatorial, double polar, int level) {
  TriangleMesh m = make_icosphere(1.0, level);
  for (auto& v : m.vertices) v = Vec3(equatorial * v.x(), equatorial * v.y(), polar * v.z());
  return m;
}

TriangleMesh make_torus(double major, double minor, int nu, int nv) {
  TriangleMesh m;
  m.vertices.reserve(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    const double u = 2.0 * kPi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double v = 2.0 * kPi * j / nv;
      const double ring = major + minor * std::cos(v);
      m.vertices.emplace_back(ring * std::cos(u), ring * std::sin(u), minor * std::sin(v));
    }
  }
  auto idx = [&](int i, int j) { return ((i % nu) * nv) + (j % nv); };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const int p00 = idx(i, j), p10 = idx(i + 1, j), p11 = idx(i + 1, j + 1), p01 = idx(i, j + 1);
      m.triangles.push_back({p00, p10, p11});
      m.triangles.push_back({p00, p11, p01});
    }
  }
  return m;
}

TriangleMesh merge(const TriangleMesh& a, const TriangleMesh& b) {
  TriangleMesh m = a;
  const int shift = static_cast<int>(a.vertices.size());
  m.vertices.insert(m.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& tri : b.triangles) m.triangles.push_back({tri[0] + shift, tri[1] + shift, tri[2] + shift});
  return m;
}

}  // namespace fmt_engine
