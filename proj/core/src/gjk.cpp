#include "fmt_engine/gjk.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "fmt_engine/error.hpp"

namespace fmt_engine {

namespace {

// Projection of the origin onto the affine hull of the selected points.
// Returns false if the subset is affinely degenerate.
bool affine_projection(const std::vector<Vec3>& pts, unsigned mask, Vec3& proj, double* lambda) {
  int idx[4] = {0, 0, 0, 0};
  int k = 0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    if (mask & (1u << i)) idx[k++] = i;
  }
  const Vec3& p0 = pts[idx[0]];
  if (k == 1) {
    proj = p0;
    lambda[0] = 1.0;
    return true;
  }
  const int m = k - 1;
  Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 3> e(3, m);
  for (int j = 0; j < m; ++j) e.col(j) = pts[idx[j + 1]] - p0;
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3> gram = e.transpose() * e;
  const Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1> rhs = -(e.transpose() * p0);
  double scale = 0.0;
  for (int j = 0; j < m; ++j) scale = std::max(scale, gram(j, j));
  Eigen::FullPivLU<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>> lu(gram);
  lu.setThreshold(1e-13);
  if (lu.rank() < m || !(scale > 0.0)) return false;
  const auto mu = lu.solve(rhs);
  double sum = 0.0;
  for (int j = 0; j < m; ++j) {
    lambda[j + 1] = mu(j);
    sum += mu(j);
  }
  lambda[0] = 1.0 - sum;
  proj = p0 + e * mu;
  return true;
}

}  // namespace

Vec3 closest_point_to_origin(std::vector<Vec3>& points, bool& inside) {
  inside = false;
  const int n = static_cast<int>(points.size());
  const unsigned full = (1u << n) - 1u;

  if (n == 4) {
    double lambda[4];
    Vec3 proj;
    if (affine_projection(points, full, proj, lambda) && lambda[0] > 0.0 && lambda[1] > 0.0 &&
        lambda[2] > 0.0 && lambda[3] > 0.0) {
      inside = true;
      return Vec3::Zero();
    }
  }

  double best = std::numeric_limits<double>::infinity();
  unsigned best_mask = 1u;
  Vec3 best_point = points.front();
  for (unsigned mask = 1; mask <= full; ++mask) {
    if (mask == full && n == 4) continue;
    double lambda[4];
    Vec3 proj;
    if (!affine_projection(points, mask, proj, lambda)) continue;
    const int k = std::popcount(mask);
    bool interior = true;
    for (int j = 0; j < k; ++j) interior = interior && lambda[j] > 0.0;
    if (!interior) continue;
    const double d2 = proj.squaredNorm();
    if (d2 < best) {
      best = d2;
      best_mask = mask;
      best_point = proj;
    }
  }
  std::vector<Vec3> reduced;
  for (int i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) reduced.push_back(points[i]);
  }
  points = std::move(reduced);
  return best_point;
}

bool gjk_overlap(const SupportMap& support_a, const SupportMap& support_b, const Vec3& initial_direction,
                 double scale, const GjkOptions& options) {
  auto support = [&](const Vec3& d) -> Vec3 { return support_a(d) - support_b(-d); };
  const double tol = options.abs_tolerance * std::max(scale, 1e-300);

  Vec3 dir = initial_direction.squaredNorm() > 0.0 ? initial_direction : Vec3::UnitX();
  Vec3 v = support(dir);
  std::vector<Vec3> simplex;
  std::vector<double> history;
  history.reserve(options.max_iterations);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const double vn = v.norm();
    history.push_back(vn);
    if (vn <= tol) return true;
    const Vec3 w = support(-v);
    if (v.dot(w) > 0.0) return false;
    // No progress possible: v is already the closest point of A - B, which then
    // lies within rounding distance of the origin.
    if (v.squaredNorm() - v.dot(w) <= 1e-15 * v.squaredNorm()) return vn <= std::sqrt(tol * scale);
    for (const auto& p : simplex) {
      if ((p - w).squaredNorm() <= 1e-28 * scale * scale) return vn <= std::sqrt(tol * scale);
    }
    simplex.push_back(w);
    bool inside = false;
    v = closest_point_to_origin(simplex, inside);
    if (inside) return true;
  }
  std::ostringstream os;
  os << "GJK did not converge in " << options.max_iterations << " iterations";
  throw ConvergenceError(os.str(), std::move(history));
}

}  // namespace fmt_engine
