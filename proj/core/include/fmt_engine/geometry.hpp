#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fmt_engine/mesh.hpp"
#include "fmt_engine/types.hpp"

namespace fmt_engine {

struct Sphere {
  double radius = 1.0;
};

/// Spheroid with symmetry axis z: semi-axes (a, a, c).
struct Spheroid {
  double equatorial = 1.0;
  double polar = 1.0;
};

/// A convex particle domain, immutable after construction.
///
/// Construction validates its invariants: positive radii; closed, outward
/// oriented and convex meshes. A spheroid with equal semi-axes is stored as a
/// sphere.
class ConvexBody {
 public:
  using Shape = std::variant<Sphere, Spheroid, TriangleMesh>;

  static ConvexBody sphere(double radius);
  static ConvexBody spheroid(double equatorial, double polar);
  static ConvexBody mesh(TriangleMesh mesh);

  const Shape& shape() const noexcept { return shape_; }
  bool is_sphere() const noexcept { return std::holds_alternative<Sphere>(shape_); }
  bool is_spheroid() const noexcept { return std::holds_alternative<Spheroid>(shape_); }
  bool is_mesh() const noexcept { return std::holds_alternative<TriangleMesh>(shape_); }

  /// Body dilated by lambda about its reference origin.
  ConvexBody scaled(double lambda) const;

  /// Radius of the smallest origin-centred ball containing the body.
  double circumradius() const;

  /// Short human-readable label, e.g. "sphere(R=1)".
  std::string label() const;

 private:
  explicit ConvexBody(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

/// Quadrature node on the boundary with its principal frame.
/// dir1 x dir2 = normal; kappa > 0 for convex surfaces.
struct SurfacePatch {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  Vec3 dir1 = Vec3::UnitX();
  Vec3 dir2 = Vec3::UnitY();
  double area = 0.0;

  double mean_curvature() const { return 0.5 * (kappa1 + kappa2); }
  double gaussian_curvature() const { return kappa1 * kappa2; }

  /// Patch carried along by a rigid rotation (area and curvatures unchanged).
  SurfacePatch rotated(const Mat3& rotation) const;
};

struct MinkowskiMeasures {
  double volume = 0.0;
  double surface = 0.0;
  double mean_curvature_integral = 0.0;  // M = integral of (k1 + k2)/2 dS
  int euler_surface = 0;                 // chi of the boundary, 2 for convex bodies
};

/// Boundary quadrature with roughly `resolution` nodes (>= 32).
///
/// Spheres and spheroids use a Gauss-Legendre rule in cos(theta) times an
/// equispaced rule in phi, with exact curvatures. Meshes return one patch per
/// vertex using the discrete estimators of vertex_curvatures() and ignore the
/// resolution hint.
std::vector<SurfacePatch> surface_quadrature(const ConvexBody& body, int resolution);

/// V and S from closed forms (analytic bodies) or exact polyhedral sums
/// (meshes); M by quadrature for spheroids and the edge formula for meshes.
MinkowskiMeasures minkowski_measures(const ConvexBody& body);

/// Support function H(u) = max_{p in D} p.u. Positively homogeneous in u;
/// throws DomainError for a zero or non-finite direction.
double support_function(const ConvexBody& body, const Vec3& direction);

/// A boundary point attaining support_function(body, direction).
Vec3 support_point(const ConvexBody& body, const Vec3& direction);

/// Closed-form surface area of a spheroid (prolate, oblate or sphere).
double spheroid_area(double equatorial, double polar);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

}  // namespace fmt_engine
