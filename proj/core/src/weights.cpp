#include "fmt_engine/weights.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "fmt_engine/error.hpp"

namespace fmt_engine {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

Mat3 outer(const Vec3& a) { return a * a.transpose(); }

[[noreturn]] void unsupported(WeightIndex index) {
  std::ostringstream os;
  os << "unsupported weight rank " << index.rank << " for tag " << static_cast<int>(index.tag);
  throw DomainError(os.str());
}

WeightValue normal_power(const Vec3& n, int rank, double factor) {
  switch (rank) {
    case 0: return WeightValue(factor);
    case 1: return WeightValue(Vec3(factor * n));
    case 2: return WeightValue(Mat3(factor * outer(n)));
    default: unsupported(WeightIndex::sigma(rank));
  }
}

}  // namespace

int scaling_dimension(WeightTag tag) {
  switch (tag) {
    case WeightTag::chi: return 3;
    case WeightTag::kappa:
    case WeightTag::delta: return 2;
    case WeightTag::sigma: return 1;
    case WeightTag::v: return 0;
  }
  return 0;
}

WeightValue& WeightValue::operator+=(const WeightValue& other) {
  if (rank() != other.rank()) throw DomainError("cannot add weight values of different rank");
  switch (rank()) {
    case 0: std::get<double>(data_) += other.scalar(); break;
    case 1: std::get<Vec3>(data_) += other.vector(); break;
    default: std::get<Mat3>(data_) += other.tensor(); break;
  }
  return *this;
}

WeightValue WeightValue::operator*(double f) const {
  switch (rank()) {
    case 0: return WeightValue(scalar() * f);
    case 1: return WeightValue(Vec3(vector() * f));
    default: return WeightValue(Mat3(tensor() * f));
  }
}

Mat3 curvature_tensor(const SurfacePatch& p) { return p.kappa1 * outer(p.dir1) + p.kappa2 * outer(p.dir2); }

Mat3 delta_tensor(const SurfacePatch& p) {
  return 0.5 * (p.kappa1 - p.kappa2) * (outer(p.dir1) - outer(p.dir2));
}

WeightValue weight_at(const SurfacePatch& p, WeightIndex index) {
  switch (index.tag) {
    case WeightTag::chi: return WeightValue(p.gaussian_curvature() * kInv4Pi);
    case WeightTag::kappa: return normal_power(p.normal, index.rank, p.mean_curvature() * kInv4Pi);
    case WeightTag::sigma: return normal_power(p.normal, index.rank, 1.0);
    case WeightTag::delta:
      if (index.rank != 2) unsupported(index);
      return WeightValue(Mat3(delta_tensor(p) * kInv4Pi));
    case WeightTag::v: throw DomainError("omega_v is a volume weight and has no surface density");
  }
  unsupported(index);
}

WeightValue fundamental_measure(const ConvexBody& body, WeightIndex index, int resolution) {
  if (index.tag == WeightTag::v) return WeightValue(minkowski_measures(body).volume);
  const auto patches = surface_quadrature(body, resolution);
  WeightValue total = weight_at(patches.front(), index) * 0.0;
  for (const auto& p : patches) total += weight_at(p, index) * p.area;
  return total;
}

double intersection_determinant(std::span<const Vec3> n) {
  if (n.size() == 2) {
    const double c12 = n[0].dot(n[1]);
    return std::max(0.0, 1.0 - c12 * c12);
  }
  if (n.size() == 3) {
    const double c12 = n[0].dot(n[1]);
    const double c13 = n[0].dot(n[2]);
    const double c23 = n[1].dot(n[2]);
    return std::max(0.0, 1.0 - c12 * c12 - c13 * c13 - c23 * c23 + 2.0 * c12 * c13 * c23);
  }
  throw DomainError("intersection_determinant expects 2 or 3 normals");
}

double two_body_euler_angle_form(const SurfacePatch& p1, const SurfacePatch& p2) {
  const Vec3 cross = p2.normal.cross(p1.normal);
  const double s = cross.norm();
  if (s <= kParallelEpsilon) {
    throw DomainError("normals are (anti)parallel: angle form is singular, use the tensor form");
  }
  const double c = p1.normal.dot(p2.normal);
  const double half_tan = s / (1.0 + c);
  const Vec3 t = cross / s;
  auto normal_curvature = [&](const SurfacePatch& p) {
    const double a = t.dot(p.dir1);
    const double b = t.dot(p.dir2);
    return p.kappa1 * a * a + p.kappa2 * b * b;
  };
  return half_tan * (normal_curvature(p1) + normal_curvature(p2));
}

double two_body_euler_tensor_form(const SurfacePatch& p1, const SurfacePatch& p2) {
  const Vec3& n1 = p1.normal;
  const Vec3& n2 = p2.normal;
  const double c = n1.dot(n2);
  if (1.0 + c <= kParallelEpsilon) {
    throw DomainError("antipodal normals: tensor form is singular (blocking configuration)");
  }
  // Contractions in the principal frames and 1 - c = s^2 / (1 + c) keep the
  // relative accuracy for nearly parallel normals.
  auto delta_contract = [](const SurfacePatch& p, const Vec3& n) {
    const double a = n.dot(p.dir1);
    const double b = n.dot(p.dir2);
    return 0.5 * (p.kappa1 - p.kappa2) * (a - b) * (a + b);
  };
  const double s2 = n1.cross(n2).squaredNorm();
  const double quotient = delta_contract(p2, n1) + delta_contract(p1, n2);
  return (s2 * (p1.mean_curvature() + p2.mean_curvature()) - quotient) / (1.0 + c);
}

double two_body_weight_expansion(const SurfacePatch& p1, const SurfacePatch& p2, int max_rank) {
  if (max_rank < 0) throw DomainError("expansion order must be >= 0");
  const auto k0 = [](const SurfacePatch& p) { return weight_at(p, WeightIndex::kappa(0)).scalar(); };
  const auto k1 = [](const SurfacePatch& p) { return weight_at(p, WeightIndex::kappa(1)).vector(); };
  const auto s0 = [](const SurfacePatch& p) { return weight_at(p, WeightIndex::sigma(0)).scalar(); };
  const auto s1 = [](const SurfacePatch& p) { return weight_at(p, WeightIndex::sigma(1)).vector(); };
  const auto d2 = [](const SurfacePatch& p) { return weight_at(p, WeightIndex::delta(2)).tensor(); };

  double sum = k0(p1) * s0(p2) - k1(p1).dot(s1(p2)) + k0(p2) * s0(p1) - k1(p2).dot(s1(p1));

  // Rank-L chains n1^L . n2^L collapse to powers of n1.n2.
  const Vec3 a = s1(p1);
  const Vec3 b = s1(p2);
  const double delta_pair = b.dot(d2(p1) * b) + a.dot(d2(p2) * a);
  const double ratio = -a.dot(b);
  double power = 1.0;
  for (int rank = 0; rank <= max_rank; ++rank) {
    sum -= power * delta_pair;
    power *= ratio;
  }
  return 4.0 * kPi * sum;
}

double two_body_expansion_remainder_bound(const SurfacePatch& p1, const SurfacePatch& p2, int max_rank) {
  const double c = p1.normal.dot(p2.normal);
  const double spread = 0.5 * (std::abs(p1.kappa1 - p1.kappa2) + std::abs(p2.kappa1 - p2.kappa2));
  return std::pow(std::abs(c), max_rank + 1) * (1.0 - c) * spread;
}

double three_body_euler_form(const Vec3& n1, const Vec3& n2, const Vec3& n3) {
  // Factors are multiplied in ascending order.
  std::array<double, 3> f = {1.0 - n1.dot(n2), 1.0 - n1.dot(n3), 1.0 - n2.dot(n3)};
  std::sort(f.begin(), f.end());
  return f[0] * f[1] * f[2];
}

double three_body_weight_expansion(const Vec3& n1, const Vec3& n2, const Vec3& n3) {
  const Vec3 v[3] = {n1, n2, n3};
  double s0[3];
  Vec3 s1[3];
  Mat3 s2[3];
  for (int i = 0; i < 3; ++i) {
    SurfacePatch p;
    p.normal = v[i];
    s0[i] = weight_at(p, WeightIndex::sigma(0)).scalar();
    s1[i] = weight_at(p, WeightIndex::sigma(1)).vector();
    s2[i] = weight_at(p, WeightIndex::sigma(2)).tensor();
  }
  double sum = s0[0] * s0[1] * s0[2];
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    sum -= s0[i] * s1[j].dot(s1[k]);
    sum += s1[j].dot(s2[i] * s1[k]);
  }
  sum -= (s2[0] * s2[1] * s2[2]).trace();
  return sum;
}

}  // namespace fmt_engine
