#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fmt_engine {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace fmt_engine
