#pragma once

#include <span>
#include <variant>

#include "fmt_engine/geometry.hpp"
#include "fmt_engine/types.hpp"

namespace fmt_engine {

enum class WeightTag { chi, v, kappa, delta, sigma };

/// Element of the weight basis {chi, v, kappa L, Delta L, sigma L}.
/// chi and v carry no rank; stored values are capped at rank 2.
struct WeightIndex {
  WeightTag tag = WeightTag::chi;
  int rank = 0;

  static constexpr WeightIndex chi() { return {WeightTag::chi, 0}; }
  static constexpr WeightIndex v() { return {WeightTag::v, 0}; }
  static constexpr WeightIndex kappa(int rank) { return {WeightTag::kappa, rank}; }
  static constexpr WeightIndex delta(int rank) { return {WeightTag::delta, rank}; }
  static constexpr WeightIndex sigma(int rank) { return {WeightTag::sigma, rank}; }

  friend bool operator==(const WeightIndex&, const WeightIndex&) = default;
};

/// Scaling dimension of a weight class: chi 3, kappa/Delta 2, sigma 1, v 0.
int scaling_dimension(WeightTag tag);

/// Scalar, vector or symmetric 3x3 tensor.
class WeightValue {
 public:
  WeightValue(double s) : data_(s) {}
  WeightValue(const Vec3& v) : data_(v) {}
  WeightValue(const Mat3& t) : data_(t) {}

  int rank() const noexcept { return static_cast<int>(data_.index()); }
  double scalar() const { return std::get<double>(data_); }
  const Vec3& vector() const { return std::get<Vec3>(data_); }
  const Mat3& tensor() const { return std::get<Mat3>(data_); }

  WeightValue& operator+=(const WeightValue& other);
  WeightValue operator*(double f) const;

 private:
  std::variant<double, Vec3, Mat3> data_;
};

/// Curvature tensor K = k1 d1 (x) d1 + k2 d2 (x) d2.
Mat3 curvature_tensor(const SurfacePatch& patch);

/// Traceless tangential curvature Delta = (k1 - k2)/2 (d1 (x) d1 - d2 (x) d2).
Mat3 delta_tensor(const SurfacePatch& patch);

/// Surface density of a weight at one patch (to be integrated with patch.area):
///   chi: k1 k2 / 4pi,  kappa L: kbar n^L / 4pi,  Delta 2: Delta / 4pi,  sigma L: n^L.
/// Throws DomainError for v (a volume weight) and for ranks outside the
/// stored set (kappa/sigma 0..2, Delta exactly 2).
WeightValue weight_at(const SurfacePatch& patch, WeightIndex index);

/// Integral of a weight over the whole body; for v the volume.
WeightValue fundamental_measure(const ConvexBody& body, WeightIndex index, int resolution = 8192);

/// Determinant of the Gram matrix of 2 or 3 unit normals (0 when degenerate).
double intersection_determinant(std::span<const Vec3> normals);

/// Near-parallel / near-antipodal guard on |n1 x n2| and 1 + n1.n2.
inline constexpr double kParallelEpsilon = 1e-9;

/// Two-surface Euler density in the angle representation:
///   tan(phi/2) * (t.K1.t + t.K2.t),  t = n2 x n1 / |n2 x n1|.
/// Throws DomainError when |n1 x n2| <= kParallelEpsilon.
double two_body_euler_angle_form(const SurfacePatch& p1, const SurfacePatch& p2);

/// Two-surface Euler density in the tensor representation (before the
/// 1/|n1 x n2| line Jacobian):
///   (1 - n1.n2)(kbar1 + kbar2) - (n1.Delta2.n1 + n2.Delta1.n2) / (1 + n1.n2).
/// Equals |n1 x n2| times the angle form. Throws DomainError for
/// antipodal normals (1 + n1.n2 <= kParallelEpsilon).
double two_body_euler_tensor_form(const SurfacePatch& p1, const SurfacePatch& p2);

/// Tensor form rebuilt from contracted weight values, with the 1/(1 + n1.n2)
/// quotient replaced by its geometric series truncated after L = max_rank:
///   4pi [w_k0 w_s0 - w_k1.w_s1 + (1<->2)] - 4pi sum_L (-n1.n2)^L [w_D2(1):n2 n2 + w_D2(2):n1 n1].
double two_body_weight_expansion(const SurfacePatch& p1, const SurfacePatch& p2, int max_rank);

/// Upper bound on |two_body_weight_expansion - two_body_euler_tensor_form|:
///   |n1.n2|^(L+1) (1 - n1.n2) (|k1 - k2|_(1) + |k1 - k2|_(2)) / 2.
double two_body_expansion_remainder_bound(const SurfacePatch& p1, const SurfacePatch& p2, int max_rank);

/// Three-surface Euler form (1 - n1.n2)(1 - n1.n3)(1 - n2.n3).
double three_body_euler_form(const Vec3& n1, const Vec3& n2, const Vec3& n3);

/// The same polynomial written as the eight sigma-weight products
///   s0 s0 s0 - s0 (s1.s1) [3 terms] + s1.s2.s1 [3 terms] - tr(s2 s2 s2).
double three_body_weight_expansion(const Vec3& n1, const Vec3& n2, const Vec3& n3);

}  // namespace fmt_engine
