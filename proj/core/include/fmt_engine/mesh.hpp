#pragma once

#include <array>
#include <vector>

#include "fmt_engine/types.hpp"

namespace fmt_engine {

/// Indexed triangle surface. Triangles are counter-clockwise seen from outside.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

/// Throws ValidationError unless every directed edge is matched by exactly one
/// opposite edge (closed, consistently oriented, manifold along edges).
void validate_closed(const TriangleMesh& mesh);

/// Throws ValidationError unless every vertex lies on the inner side of every
/// face plane within 1e-8 times the bounding-box diagonal. Expects a closed mesh.
void validate_convex(const TriangleMesh& mesh);

/// Signed volume from the divergence theorem; positive for outward orientation.
double signed_volume(const TriangleMesh& mesh);

double surface_area(const TriangleMesh& mesh);

/// Integral mean curvature of a closed polyhedron, 1/2 sum over edges of
/// length times exterior dihedral angle (negative on concave edges).
double edge_mean_curvature_integral(const TriangleMesh& mesh);

/// Sum over vertices of the angle defect 2*pi - (sum of incident corner angles).
double angle_defect_sum(const TriangleMesh& mesh);

/// Euler characteristic of a closed orientable surface by discrete Gauss-Bonnet.
/// Throws ValidationError for open meshes and Error when the defect sum is not
/// within 1e-9 of a multiple of 2*pi.
int euler_characteristic(const TriangleMesh& mesh);

/// Per-vertex discrete differential geometry (first-order accurate on smooth
/// convex surfaces).
struct VertexCurvature {
  Vec3 normal;            // unit, outward
  double area = 0.0;      // mixed Voronoi area
  double gaussian = 0.0;  // angle defect / area
  double mean = 0.0;      // |cotangent Laplacian of position| / 2, signed by the normal
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  Vec3 dir1;
  Vec3 dir2;
};

std::vector<VertexCurvature> vertex_curvatures(const TriangleMesh& mesh);

// Fixtures and sample meshes.

/// Subdivided icosahedron projected to a sphere: 10 * 4^level + 2 vertices.
TriangleMesh make_icosphere(double radius, int level);

/// Icosphere with vertices scaled to the spheroid x^2/a^2 + y^2/a^2 + z^2/c^2 = 1.
TriangleMesh make_spheroid_mesh(double equatorial, double polar, int level);

/// Torus of revolution about z, major radius R, tube radius r, nu x nv quads split in two.
TriangleMesh make_torus(double major, double minor, int nu, int nv);

/// Disjoint union (indices of `b` are shifted).
TriangleMesh merge(const TriangleMesh& a, const TriangleMesh& b);

}  // namespace fmt_engine
