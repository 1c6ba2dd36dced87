#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "fmt_engine/error.hpp"
#include "fmt_engine/geometry.hpp"
#include "fmt_engine/mesh.hpp"
#include "fmt_engine/mesh_io.hpp"
#include "fmt_engine/random.hpp"
#include "fmt_engine/identities.hpp"

using namespace fmt_engine;

namespace {

// Independent oracles: midpoint rule in theta on the surface of revolution.
double spheroid_area_oracle(double a, double c, int n = 200000) {
  double s = 0.0;
  const double dt = kPi / n;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) * dt;
    s += a * std::sin(t) * std::sqrt(a * a * std::cos(t) * std::cos(t) + c * c * std::sin(t) * std::sin(t));
  }
  return 2.0 * kPi * s * dt;
}

// M equals the integral of the support function over the unit sphere.
double spheroid_m_oracle(double a, double c, int n = 200000) {
  double s = 0.0;
  const double dt = kPi / n;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) * dt;
    s += std::sqrt(a * a * std::sin(t) * std::sin(t) + c * c * std::cos(t) * std::cos(t)) * std::sin(t);
  }
  return 2.0 * kPi * s * dt;
}

}  // namespace

TEST(Measures, UnitSphereClosedForms) {
  const MinkowskiMeasures m = minkowski_measures(ConvexBody::sphere(1.0));
  EXPECT_NEAR(m.volume, 4.18879020478639, 1e-10);
  EXPECT_NEAR(m.surface, 12.5663706143592, 1e-10);
  EXPECT_NEAR(m.mean_curvature_integral, 12.5663706143592, 1e-10);
  EXPECT_EQ(m.euler_surface, 2);
}

TEST(Measures, ProlateSpheroidArea) {
  EXPECT_NEAR(spheroid_area_oracle(1.0, 2.0), 21.4784353278837, 1e-8);
  EXPECT_NEAR(spheroid_area(1.0, 2.0), 21.4784353278837, 1e-10);
  EXPECT_NEAR(spheroid_area(2.0, 1.0), 34.6875308133802, 1e-10);
  EXPECT_NEAR(spheroid_area(1.0, 1.0), 4.0 * kPi, 1e-12);
}

TEST(Measures, SpheroidMeanCurvatureIntegral) {
  EXPECT_NEAR(spheroid_m_oracle(1.0, 2.0), 17.3437654066901, 1e-8);
  EXPECT_NEAR(minkowski_measures(ConvexBody::spheroid(1.0, 2.0)).mean_curvature_integral, 17.3437654066901, 1e-10);
  EXPECT_NEAR(minkowski_measures(ConvexBody::spheroid(2.0, 1.0)).mean_curvature_integral, 21.4784353278837, 1e-10);
  EXPECT_NEAR(minkowski_measures(ConvexBody::spheroid(1.0, 0.5)).mean_curvature_integral, 10.7392176639419, 1e-10);
}

TEST(Measures, EqualAxesSpheroidIsSphere) {
  EXPECT_TRUE(ConvexBody::spheroid(1.5, 1.5).is_sphere());
}

TEST(Measures, InvalidRadiiRejected) {
  EXPECT_THROW(ConvexBody::sphere(0.0), ValidationError);
  EXPECT_THROW(ConvexBody::sphere(-1.0), ValidationError);
  EXPECT_THROW(ConvexBody::spheroid(1.0, std::nan("")), ValidationError);
}

TEST(Measures, ScalingHomogeneity) {
  const double lambda = 1.7;
  for (const ConvexBody& b : {ConvexBody::sphere(0.8), ConvexBody::spheroid(1.0, 2.0),
                              ConvexBody::mesh(make_spheroid_mesh(1.0, 0.6, 3))}) {
    const MinkowskiMeasures m = minkowski_measures(b);
    const MinkowskiMeasures s = minkowski_measures(b.scaled(lambda));
    EXPECT_NEAR(s.volume, std::pow(lambda, 3) * m.volume, 1e-10 * s.volume) << b.label();
    EXPECT_NEAR(s.surface, lambda * lambda * m.surface, 1e-10 * s.surface) << b.label();
    EXPECT_NEAR(s.mean_curvature_integral, lambda * m.mean_curvature_integral, 1e-10 * s.mean_curvature_integral)
        << b.label();
    EXPECT_EQ(s.euler_surface, m.euler_surface);
  }
}

TEST(Measures, IcosphereConvergesToSphere) {
  const ConvexBody ico = ConvexBody::mesh(make_icosphere(1.0, 5));
  const MinkowskiMeasures m = minkowski_measures(ico);
  EXPECT_NEAR(m.volume / (4.0 * kPi / 3.0), 1.0, 5e-3);
  EXPECT_NEAR(m.surface / (4.0 * kPi), 1.0, 5e-3);
  EXPECT_NEAR(m.mean_curvature_integral / (4.0 * kPi), 1.0, 5e-3);
  EXPECT_EQ(m.euler_surface, 2);
}

TEST(GaussBonnet, IcosphereAndTorus) {
  for (int level = 0; level <= 4; ++level) {
    EXPECT_NEAR(angle_defect_sum(make_icosphere(1.0, level)), 4.0 * kPi, 1e-9);
  }
  const TriangleMesh torus = make_torus(2.0, 0.5, 48, 24);
  EXPECT_NEAR(angle_defect_sum(torus), 0.0, 1e-9);
  EXPECT_EQ(euler_characteristic(torus), 0);
  EXPECT_EQ(euler_characteristic(merge(make_icosphere(1.0, 1), make_icosphere(0.5, 2))), 4);
}

TEST(GaussBonnet, TorusIsNotConvex) {
  EXPECT_THROW(ConvexBody::mesh(make_torus(2.0, 0.5, 24, 12)), ValidationError);
}

TEST(MeshValidation, OpenMeshRejected) {
  TriangleMesh m = make_icosphere(1.0, 1);
  m.triangles.pop_back();
  EXPECT_THROW(validate_closed(m), ValidationError);
  EXPECT_THROW(ConvexBody::mesh(m), ValidationError);
}

TEST(MeshValidation, InvertedOrientationRejected) {
  TriangleMesh m = make_icosphere(1.0, 1);
  for (auto& t : m.triangles) std::swap(t[1], t[2]);
  EXPECT_THROW(ConvexBody::mesh(m), ValidationError);
}

TEST(MeshIo, OffAndStlRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "fmt_engine_mesh_io";
  std::filesystem::create_directories(dir);
  const TriangleMesh m = make_spheroid_mesh(1.0, 2.0, 2);
  write_off(m, dir / "s.off");
  write_stl(m, dir / "s.stl");
  const TriangleMesh a = read_mesh(dir / "s.off");
  const TriangleMesh b = read_mesh(dir / "s.stl");
  EXPECT_EQ(a.triangles.size(), m.triangles.size());
  EXPECT_NEAR(signed_volume(a), signed_volume(m), 1e-12);
  EXPECT_EQ(b.triangles.size(), m.triangles.size());
  EXPECT_NEAR(signed_volume(b), signed_volume(m), 1e-5);
  EXPECT_THROW(read_mesh(dir / "missing.off"), IoError);
}

TEST(Support, SphereAndSpheroid) {
  EXPECT_NEAR(support_function(ConvexBody::sphere(2.0), Vec3(0.0, 3.0, 4.0)), 10.0, 1e-12);
  const ConvexBody s = ConvexBody::spheroid(1.0, 2.0);
  EXPECT_NEAR(support_function(s, Vec3::UnitZ()), 2.0, 1e-12);
  EXPECT_NEAR(support_function(s, Vec3::UnitX()), 1.0, 1e-12);
  EXPECT_THROW(support_function(s, Vec3::Zero()), DomainError);
}

TEST(Support, PositivelyHomogeneousAndAttained) {
  const ConvexBody bodies[] = {ConvexBody::spheroid(1.0, 0.4), ConvexBody::mesh(make_spheroid_mesh(1.2, 0.7, 2))};
  for (const ConvexBody& b : bodies) {
    for (std::uint64_t i = 0; i < 200; ++i) {
      RandomStream rng(3, i);
      const Vec3 u = random_unit_vector(rng);
      const double t = 0.1 + 5.0 * rng.uniform();
      const double h = support_function(b, u);
      EXPECT_NEAR(support_function(b, t * u), t * h, 1e-12 * t * std::abs(h) + 1e-14);
      EXPECT_NEAR(support_point(b, u).dot(u), h, 1e-12);
    }
  }
}

TEST(Quadrature, SumRulesOnSmoothBodies) {
  for (const ConvexBody& b : {ConvexBody::sphere(1.0), ConvexBody::spheroid(1.0, 2.0), ConvexBody::spheroid(2.0, 1.0)}) {
    const auto patches = surface_quadrature(b, 8192);
    double area = 0.0, gauss = 0.0;
    for (const auto& p : patches) {
      area += p.area;
      gauss += p.area * p.gaussian_curvature();
      EXPECT_NEAR(p.dir1.cross(p.dir2).dot(p.normal), 1.0, 1e-12);
    }
    EXPECT_NEAR(area, minkowski_measures(b).surface, 1e-9);
    EXPECT_NEAR(gauss, 4.0 * kPi, 1e-9);
  }
}

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly) {
  const GaussLegendre gl = gauss_legendre(10);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 18);
  EXPECT_NEAR(s, 2.0 / 19.0, 1e-14);
}
