#pragma once

#include <functional>
#include <vector>

#include "fmt_engine/types.hpp"

namespace fmt_engine {

using SupportMap = std::function<Vec3(const Vec3&)>;

struct GjkOptions {
  int max_iterations = 128;
  /// Distances below abs_tolerance * scale count as contact (overlap).
  double abs_tolerance = 1e-12;
};

/// Boolean Gilbert-Johnson-Keerthi test on the Minkowski difference A - B.
/// Returns true when the origin lies in A - B, false as soon as a separating
/// direction is found. Deterministic; throws ConvergenceError (with the last
/// distance estimates as history) when max_iterations is exhausted.
bool gjk_overlap(const SupportMap& support_a, const SupportMap& support_b, const Vec3& initial_direction,
                 double scale, const GjkOptions& options = {});

/// Closest point of conv(points) to the origin (1 to 4 points). On return
/// `points` is reduced to the supporting face; `inside` is set when four
/// affinely independent points enclose the origin.
Vec3 closest_point_to_origin(std::vector<Vec3>& points, bool& inside);

}  // namespace fmt_engine
