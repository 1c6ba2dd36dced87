#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmt_engine/fmt_model.hpp"
#include "fmt_engine/geometry.hpp"
#include "fmt_engine/random.hpp"

namespace fmt_engine {

/// Uniform direction on the unit sphere.
Vec3 random_unit_vector(RandomStream& rng);

/// Patch at the origin with a uniform normal, a uniform principal frame and
/// curvatures uniform in [kappa_min, kappa_max].
SurfacePatch random_patch(RandomStream& rng, double kappa_min = 0.05, double kappa_max = 4.0);

/// Random admissible weighted densities: n_v in [0, max_packing), positive
/// scalars, |n_s1| <= n_s0, |n_k1| <= n_k0 and n_s2 positive semidefinite with
/// trace n_s0.
WeightedDensities random_densities(RandomStream& rng, double max_packing = 0.9);

/// Isotropic-bulk restriction of random_densities: vectors zero, n_s2 = n_s0 I / 3.
WeightedDensities random_bulk_densities(RandomStream& rng, double max_packing = 0.9);

struct IdentityCheck {
  std::string name;
  std::uint64_t n_samples = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// max |angle form * |n1 x n2| - tensor form| / scale over random patch pairs.
IdentityCheck check_two_body_forms(std::uint64_t n, std::uint64_t seed);

/// Truncated weight expansion against the tensor form for L = 0..max_rank:
/// every error within its remainder bound and non-increasing in L.
/// max_error is the largest error / bound ratio.
IdentityCheck check_two_body_expansion(std::uint64_t n, std::uint64_t seed, int max_rank = 8);

/// Product form against the eight-term sigma expansion.
IdentityCheck check_three_body_expansion(std::uint64_t n, std::uint64_t seed);

/// Bitwise equality of the product form under cyclic relabelling.
IdentityCheck check_three_body_cyclic(std::uint64_t n, std::uint64_t seed);

/// |spt_residual| / max(1, |Phi|) over random densities.
IdentityCheck check_spt(const FreeEnergyModel& model, bool isotropic_bulk, std::uint64_t n, std::uint64_t seed);

/// The whole suite with the default tolerances.
std::vector<IdentityCheck> run_identity_suite(std::uint64_t n, std::uint64_t seed);

}  // namespace fmt_engine
