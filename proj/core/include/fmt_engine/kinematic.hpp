#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Geometry>

#include "fmt_engine/geometry.hpp"
#include "fmt_engine/random.hpp"
#include "fmt_engine/types.hpp"

namespace fmt_engine {

/// Volume of SO(3) under the Haar measure normalised by O_2 O_1.
inline constexpr double kVolumeSO3 = 8.0 * kPi * kPi;

/// O_k = vol(S^k) = 2 pi^((k+1)/2) / Gamma((k+1)/2); throws DomainError for k < 1.
double sphere_volume_Ok(int k);

struct Pose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Vec3 translation = Vec3::Zero();

  Mat3 matrix() const { return rotation.toRotationMatrix(); }
};

/// Axis-aligned translation domain. lower == upper is a valid single point.
struct TranslationBox {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Zero();

  static TranslationBox cube(double half_width) {
    return {Vec3::Constant(-half_width), Vec3::Constant(half_width)};
  }
  double volume() const { return (upper - lower).prod(); }
};

/// Haar-uniform rotation (Shoemake's unit quaternion) and a translation
/// uniform in `box`. Throws DomainError if the box is empty or not finite.
Pose sample_pose(RandomStream& rng, const TranslationBox& box);

/// Overlap test for posed convex bodies. Spheres are handled in closed form,
/// everything else goes through GJK on the support maps. Touching counts as
/// overlap. Throws ConvergenceError (message includes both poses) if GJK
/// does not terminate.
bool intersects(const ConvexBody& a, const Pose& pose_a, const ConvexBody& b, const Pose& pose_b);

/// Rotation-averaged excluded volume V_A + V_B + (M_A S_B + M_B S_A) / 4pi.
double excluded_volume_analytic(const ConvexBody& a, const ConvexBody& b);

struct MCEstimate {
  double mean = 0.0;
  double stderr = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct MCOptions {
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  int threads = 1;
};

/// Fraction of poses of B (box `half_width`, Haar rotation) overlapping A,
/// whose pose is also Haar-rotated and centred at the origin.
MCEstimate overlap_fraction(const ConvexBody& a, const ConvexBody& b, double half_width, const MCOptions& options);

/// Box volume times hit fraction. The default box half-width is the sum of
/// the circumradii plus 1e-6; an explicit half-width below that sum throws
/// DomainError. Requires n_samples >= 1e4.
MCEstimate excluded_volume_mc(const ConvexBody& a, const ConvexBody& b, const MCOptions& options,
                              std::optional<double> half_width = std::nullopt);

enum class VirialMethod { analytic, monte_carlo };

/// B2 = V_excl / 2. The analytic method reports stderr 0 and ignores options.
MCEstimate second_virial(const ConvexBody& a, const ConvexBody& b, VirialMethod method, const MCOptions& options = {});

/// B3 = (1/3) integral of f12 f13 f23 with particle 1 fixed at the origin and
/// particles 2, 3 sampled in the cube of half-width 2 r_c + 1e-6.
/// Positive for hard bodies. Requires n_samples >= 1e5.
MCEstimate third_virial_mc(const ConvexBody& body, const MCOptions& options);

/// Stack (0-loop) estimate of B3 and its parts. Per sample:
///   chi:    S omega_chi(p1) V^2
///   pair:   V S^2 [two-surface density of (p1, R2 p2)] / 4pi
///   triple: S^3 [(1-c12)(1-c13)(1-c23) - M3] / 8pi
/// with p_i area-weighted boundary patches and R_i Haar rotations.
/// triple_product and triple_determinant split the triple term.
struct StackVirialEstimate {
  MCEstimate total;
  MCEstimate chi;
  MCEstimate pair;
  MCEstimate triple;
  MCEstimate triple_product;
  MCEstimate triple_determinant;
};

StackVirialEstimate third_virial_stack_mc(const ConvexBody& body, const MCOptions& options, int resolution = 4096,
                                          int max_rank = 2);

}  // namespace fmt_engine
