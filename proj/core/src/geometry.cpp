#include "fmt_engine/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <gsl/gsl_integration.h>

#include "fmt_engine/error.hpp"

namespace fmt_engine {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << what << " must be strictly positive and finite, got " << value;
    throw ValidationError(os.str());
  }
}

void require_direction(const Vec3& u) {
  if (!u.allFinite() || u.squaredNorm() == 0.0) {
    throw DomainError("support direction must be a non-zero finite vector");
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Angular grid shared by the analytic bodies: Gauss-Legendre in u = cos(theta)
// and the periodic trapezoid rule in phi.
struct AngularGrid {
  GaussLegendre polar;
  int n_phi = 0;
};

AngularGrid angular_grid(int resolution) {
  if (resolution < 32) {
    std::ostringstream os;
    os << "quadrature resolution must be >= 32, got " << resolution;
    throw DomainError(os.str());
  }
  const int n_theta = std::max(4, static_cast<int>(std::lround(std::sqrt(resolution / 2.0))));
  return {gauss_legendre(n_theta), 2 * n_theta};
}

// Mean curvature integral of a spheroid by a 1D Gauss-Legendre rule in cos(theta).
double spheroid_mean_curvature_integral(double a, double c) {
  const GaussLegendre gl = gauss_legendre(512);
  double m = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double u = gl.nodes[i];
    const double q = a * a * u * u + c * c * (1.0 - u * u);
    const double k_merid = a * c / (q * std::sqrt(q));
    const double k_par = c / (a * std::sqrt(q));
    const double jac = a * std::sqrt(q);
    m += gl.weights[i] * 0.5 * (k_merid + k_par) * jac;
  }
  return 2.0 * kPi * m;
}

}  // namespace

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be >= 1");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
  if (table == nullptr) throw Error("gsl_integration_glfixed_table_alloc failed");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &gl.nodes[i], &gl.weights[i], table);
  }
  gsl_integration_glfixed_table_free(table);
  return gl;
}

ConvexBody ConvexBody::sphere(double radius) {
  require_positive(radius, "sphere radius");
  return ConvexBody(Sphere{radius});
}

ConvexBody ConvexBody::spheroid(double equatorial, double polar) {
  require_positive(equatorial, "spheroid equatorial semi-axis");
  require_positive(polar, "spheroid polar semi-axis");
  if (equatorial == polar) return ConvexBody(Sphere{equatorial});
  return ConvexBody(Spheroid{equatorial, polar});
}

ConvexBody ConvexBody::mesh(TriangleMesh mesh) {
  validate_closed(mesh);
  if (!(signed_volume(mesh) > 0.0)) {
    throw ValidationError("mesh encloses non-positive volume: triangles must be outward oriented");
  }
  validate_convex(mesh);
  return ConvexBody(std::move(mesh));
}

ConvexBody ConvexBody::scaled(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("dilation factor must be positive");
  return std::visit(overloaded(
                        [&](const Sphere& s) { return ConvexBody(Sphere{s.radius * lambda}); },
                        [&](const Spheroid& s) {
                          return ConvexBody(Spheroid{s.equatorial * lambda, s.polar * lambda});
                        },
                        [&](const TriangleMesh& m) {
                          TriangleMesh copy = m;
                          for (auto& v : copy.vertices) v *= lambda;
                          return ConvexBody(std::move(copy));
                        }),
                    shape_);
}

double ConvexBody::circumradius() const {
  return std::visit(overloaded([](const Sphere& s) { return s.radius; },
                               [](const Spheroid& s) { return std::max(s.equatorial, s.polar); },
                               [](const TriangleMesh& m) {
                                 double r2 = 0.0;
                                 for (const auto& v : m.vertices) r2 = std::max(r2, v.squaredNorm());
                                 return std::sqrt(r2);
                               }),
                    shape_);
}

std::string ConvexBody::label() const {
  std::ostringstream os;
  os.precision(12);
  std::visit(overloaded([&](const Sphere& s) { os << "sphere(R=" << s.radius << ")"; },
                        [&](const Spheroid& s) { os << "spheroid(a=" << s.equatorial << ",c=" << s.polar << ")"; },
                        [&](const TriangleMesh& m) {
                          os << "mesh(vertices=" << m.vertices.size() << ",triangles=" << m.triangles.size() << ")";
                        }),
             shape_);
  return os.str();
}

SurfacePatch SurfacePatch::rotated(const Mat3& rotation) const {
  SurfacePatch p = *this;
  p.point = rotation * point;
  p.normal = rotation * normal;
  p.dir1 = rotation * dir1;
  p.dir2 = rotation * dir2;
  return p;
}

std::vector<SurfacePatch> surface_quadrature(const ConvexBody& body, int resolution) {
  std::vector<SurfacePatch> patches;
  if (const auto* mesh = std::get_if<TriangleMesh>(&body.shape())) {
    const auto curv = vertex_curvatures(*mesh);
    patches.reserve(curv.size());
    for (std::size_t i = 0; i < curv.size(); ++i) {
      SurfacePatch p;
      p.point = mesh->vertices[i];
      p.normal = curv[i].normal;
      p.kappa1 = curv[i].kappa1;
      p.kappa2 = curv[i].kappa2;
      p.dir1 = curv[i].dir1;
      p.dir2 = curv[i].dir2;
      p.area = curv[i].area;
      patches.push_back(p);
    }
    return patches;
  }

  const AngularGrid grid = angular_grid(resolution);
  const double dphi = 2.0 * kPi / grid.n_phi;
  double a = 1.0, c = 1.0;
  if (const auto* s = std::get_if<Sphere>(&body.shape())) {
    a = c = s->radius;
  } else {
    const auto& sp = std::get<Spheroid>(body.shape());
    a = sp.equatorial;
    c = sp.polar;
  }
  const bool round = body.is_sphere();
  patches.reserve(grid.polar.nodes.size() * grid.n_phi);
  for (std::size_t i = 0; i < grid.polar.nodes.size(); ++i) {
    const double u = grid.polar.nodes[i];
    const double s = std::sqrt(1.0 - u * u);
    const double q = a * a * u * u + c * c * s * s;
    const double sq = std::sqrt(q);
    const double k_merid = round ? 1.0 / a : a * c / (q * sq);
    const double k_par = round ? 1.0 / a : c / (a * sq);
    const double area = (round ? a * a : a * sq) * grid.polar.weights[i] * dphi;
    for (int j = 0; j < grid.n_phi; ++j) {
      const double phi = (j + 0.5) * dphi;
      const double cp = std::cos(phi), sp = std::sin(phi);
      SurfacePatch p;
      p.point = Vec3(a * s * cp, a * s * sp, c * u);
      p.normal = Vec3(c * s * cp, c * s * sp, a * u).normalized();
      p.dir1 = Vec3(a * u * cp, a * u * sp, -c * s).normalized();
      p.dir2 = Vec3(-sp, cp, 0.0);
      p.kappa1 = k_merid;
      p.kappa2 = k_par;
      p.area = area;
      patches.push_back(p);
    }
  }
  return patches;
}

double spheroid_area(double a, double c) {
  require_positive(a, "spheroid equatorial semi-axis");
  require_positive(c, "spheroid polar semi-axis");
  if (a == c) return 4.0 * kPi * a * a;
  if (c > a) {
    const double e = std::sqrt(1.0 - (a * a) / (c * c));
    return 2.0 * kPi * a * a * (1.0 + c / (a * e) * std::asin(e));
  }
  const double e = std::sqrt(1.0 - (c * c) / (a * a));
  return 2.0 * kPi * a * a * (1.0 + (1.0 - e * e) / e * std::atanh(e));
}

MinkowskiMeasures minkowski_measures(const ConvexBody& body) {
  MinkowskiMeasures m;
  std::visit(overloaded(
                 [&](const Sphere& s) {
                   const double r = s.radius;
                   m.volume = 4.0 * kPi * r * r * r / 3.0;
                   m.surface = 4.0 * kPi * r * r;
                   m.mean_curvature_integral = 4.0 * kPi * r;
                   m.euler_surface = 2;
                 },
                 [&](const Spheroid& s) {
                   m.volume = 4.0 * kPi * s.equatorial * s.equatorial * s.polar / 3.0;
                   m.surface = spheroid_area(s.equatorial, s.polar);
                   m.mean_curvature_integral = spheroid_mean_curvature_integral(s.equatorial, s.polar);
                   m.euler_surface = 2;
                 },
                 [&](const TriangleMesh& mesh) {
                   m.volume = signed_volume(mesh);
                   m.surface = surface_area(mesh);
                   m.mean_curvature_integral = edge_mean_curvature_integral(mesh);
                   m.euler_surface = euler_characteristic(mesh);
                 }),
             body.shape());
  return m;
}

double support_function(const ConvexBody& body, const Vec3& u) {
  require_direction(u);
  return std::visit(overloaded([&](const Sphere& s) { return s.radius * u.norm(); },
                               [&](const Spheroid& s) {
                                 const double a2 = s.equatorial * s.equatorial;
                                 const double c2 = s.polar * s.polar;
                                 return std::sqrt(a2 * (u.x() * u.x() + u.y() * u.y()) + c2 * u.z() * u.z());
                               },
                               [&](const TriangleMesh& m) {
                                 double h = -std::numeric_limits<double>::infinity();
                                 for (const auto& v : m.vertices) h = std::max(h, v.dot(u));
                                 return h;
                               }),
                    body.shape());
}

Vec3 support_point(const ConvexBody& body, const Vec3& u) {
  require_direction(u);
  return std::visit(overloaded([&](const Sphere& s) -> Vec3 { return s.radius * u.normalized(); },
                               [&](const Spheroid& s) -> Vec3 {
                                 const double a2 = s.equatorial * s.equatorial;
                                 const double c2 = s.polar * s.polar;
                                 const Vec3 w(a2 * u.x(), a2 * u.y(), c2 * u.z());
                                 return w / std::sqrt(w.dot(u));
                               },
                               [&](const TriangleMesh& m) -> Vec3 {
                                 std::size_t best = 0;
                                 double h = -std::numeric_limits<double>::infinity();
                                 for (std::size_t i = 0; i < m.vertices.size(); ++i) {
                                   const double d = m.vertices[i].dot(u);
                                   if (d > h) {
                                     h = d;
                                     best = i;
                                   }
                                 }
                                 return m.vertices[best];
                               }),
                    body.shape());
}

}  // namespace fmt_engine
