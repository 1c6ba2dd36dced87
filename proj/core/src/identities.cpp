#include "fmt_engine/identities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>

#include "fmt_engine/weights.hpp"

namespace fmt_engine {

namespace {

constexpr double kIdentityTolerance = 1e-12;

// Random stream id per check.
enum Stream : std::uint64_t { two_body = 11, expansion = 12, three_body = 13, cyclic = 14, spt = 15 };

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

Vec3 random_unit_vector(RandomStream& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * kPi * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec3(s * std::cos(phi), s * std::sin(phi), z);
}

SurfacePatch random_patch(RandomStream& rng, double kappa_min, double kappa_max) {
  SurfacePatch p;
  p.normal = random_unit_vector(rng);
  const Vec3 helper = std::abs(p.normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = p.normal.cross(helper).normalized();
  const Vec3 e2 = p.normal.cross(e1);
  const double a = 2.0 * kPi * rng.uniform();
  p.dir1 = std::cos(a) * e1 + std::sin(a) * e2;
  p.dir2 = p.normal.cross(p.dir1);
  p.kappa1 = kappa_min + (kappa_max - kappa_min) * rng.uniform();
  p.kappa2 = kappa_min + (kappa_max - kappa_min) * rng.uniform();
  p.area = 1.0;
  return p;
}

WeightedDensities random_densities(RandomStream& rng, double max_packing) {
  WeightedDensities n;
  n.n_v = max_packing * rng.uniform();
  n.n_chi = 2.0 * rng.uniform();
  n.n_k0 = 2.0 * rng.uniform();
  n.n_s0 = 10.0 * rng.uniform();
  n.n_k1 = n.n_k0 * rng.uniform() * random_unit_vector(rng);
  n.n_s1 = n.n_s0 * rng.uniform() * random_unit_vector(rng);
  std::array<double, 3> w = {rng.uniform(), rng.uniform(), rng.uniform()};
  const double sum = w[0] + w[1] + w[2];
  for (int k = 0; k < 3; ++k) {
    const Vec3 u = random_unit_vector(rng);
    n.n_s2 += (n.n_s0 * w[k] / sum) * (u * u.transpose());
  }
  return n;
}

WeightedDensities random_bulk_densities(RandomStream& rng, double max_packing) {
  WeightedDensities n;
  n.n_v = max_packing * rng.uniform();
  n.n_chi = 2.0 * rng.uniform();
  n.n_k0 = 2.0 * rng.uniform();
  n.n_s0 = 10.0 * rng.uniform();
  n.n_s2 = Mat3::Identity() * (n.n_s0 / 3.0);
  return n;
}

IdentityCheck check_two_body_forms(std::uint64_t n, std::uint64_t seed) {
  IdentityCheck c{"two_body_angle_vs_tensor", n, 0.0, kIdentityTolerance, true};
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomStream rng(seed, Stream::two_body, i);
    const SurfacePatch p1 = random_patch(rng);
    const SurfacePatch p2 = random_patch(rng);
    const double s = p1.normal.cross(p2.normal).norm();
    const double cosine = p1.normal.dot(p2.normal);
    if (s <= kParallelEpsilon || 1.0 + cosine <= kParallelEpsilon) continue;
    const double tensor = two_body_euler_tensor_form(p1, p2);
    const double angle = two_body_euler_angle_form(p1, p2) * s;
    const double q = std::abs(p1.normal.dot(delta_tensor(p2) * p1.normal)) +
                     std::abs(p2.normal.dot(delta_tensor(p1) * p2.normal));
    const double scale = (1.0 - cosine) * (p1.mean_curvature() + p2.mean_curvature()) + q / (1.0 + cosine);
    c.max_error = std::max(c.max_error, std::abs(angle - tensor) / scale);
  }
  c.pass = c.max_error <= c.tolerance;
  return c;
}

IdentityCheck check_two_body_expansion(std::uint64_t n, std::uint64_t seed, int max_rank) {
  IdentityCheck c{"two_body_expansion_remainder", n, 0.0, 1.0, true};
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomStream rng(seed, Stream::expansion, i);
    const SurfacePatch p1 = random_patch(rng);
    const SurfacePatch p2 = random_patch(rng);
    if (1.0 + p1.normal.dot(p2.normal) <= kParallelEpsilon) continue;
    const double tensor = two_body_euler_tensor_form(p1, p2);
    double previous = std::numeric_limits<double>::infinity();
    for (int rank = 0; rank <= max_rank; ++rank) {
      const double err = std::abs(two_body_weight_expansion(p1, p2, rank) - tensor);
      const double slack = 1e-12 * (1.0 + std::abs(tensor));
      const double bound = two_body_expansion_remainder_bound(p1, p2, rank) + slack;
      c.max_error = std::max(c.max_error, err / bound);
      if (err > bound || err > previous + slack) c.pass = false;
      previous = err;
    }
  }
  c.pass = c.pass && c.max_error <= c.tolerance;
  return c;
}

IdentityCheck check_three_body_expansion(std::uint64_t n, std::uint64_t seed) {
  IdentityCheck c{"three_body_product_vs_expansion", n, 0.0, kIdentityTolerance, true};
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomStream rng(seed, Stream::three_body, i);
    const Vec3 a = random_unit_vector(rng);
    const Vec3 b = random_unit_vector(rng);
    const Vec3 d = random_unit_vector(rng);
    const double err = std::abs(three_body_euler_form(a, b, d) - three_body_weight_expansion(a, b, d));
    c.max_error = std::max(c.max_error, err);
  }
  c.pass = c.max_error <= c.tolerance;
  return c;
}

IdentityCheck check_three_body_cyclic(std::uint64_t n, std::uint64_t seed) {
  IdentityCheck c{"three_body_cyclic_invariance", n, 0.0, 0.0, true};
  std::uint64_t mismatches = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomStream rng(seed, Stream::cyclic, i);
    const Vec3 a = random_unit_vector(rng);
    const Vec3 b = random_unit_vector(rng);
    const Vec3 d = random_unit_vector(rng);
    const double f = three_body_euler_form(a, b, d);
    const double g = three_body_euler_form(b, d, a);
    const double h = three_body_euler_form(d, a, b);
    if (!same_bits(f, g) || !same_bits(f, h)) {
      ++mismatches;
      c.max_error = std::max({c.max_error, std::abs(f - g), std::abs(f - h)});
    }
  }
  c.pass = mismatches == 0;
  return c;
}

IdentityCheck check_spt(const FreeEnergyModel& model, bool isotropic_bulk, std::uint64_t n, std::uint64_t seed) {
  IdentityCheck c{"spt_residual_" + model.name() + (isotropic_bulk ? "_bulk" : ""), n, 0.0, kIdentityTolerance, true};
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomStream rng(seed, Stream::spt, i);
    const WeightedDensities d = isotropic_bulk ? random_bulk_densities(rng) : random_densities(rng);
    const double r = spt_residual(d, model);
    c.max_error = std::max(c.max_error, std::abs(r) / std::max(1.0, std::abs(phi_excess(d, model))));
  }
  c.pass = c.max_error <= c.tolerance;
  return c;
}

std::vector<IdentityCheck> run_identity_suite(std::uint64_t n, std::uint64_t seed) {
  return {check_two_body_forms(n, seed),
          check_two_body_expansion(n, seed),
          check_three_body_expansion(n, seed),
          check_three_body_cyclic(n, seed),
          check_spt(FreeEnergyModel::rosenfeld_original(), false, n, seed),
          check_spt(FreeEnergyModel::tarazona_tensor(), true, n, seed)};
}

}  // namespace fmt_engine
