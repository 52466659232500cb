#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hmr {

/// 6-DOF end-effector pose. The rotation matrix is authoritative; Euler
/// angles (intrinsic Z-Y-X) are derived for serialization only.
struct Pose6 {
    Eigen::Vector3d position{Eigen::Vector3d::Zero()};
    Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};

    /// Intrinsic Z-Y-X angles (theta_z, theta_y, theta_x) such that
    /// rotation == Rz(theta_z) * Ry(theta_y) * Rx(theta_x).
    Eigen::Vector3d euler_zyx() const;
};

Eigen::Matrix3d rotation_from_euler_zyx(double theta_z, double theta_y, double theta_x);

/// Axis-angle vector of R (SO(3) logarithm). Norm is the rotation angle in [0, pi].
Eigen::Vector3d so3_log(const Eigen::Matrix3d& rot);

/// Geodesic distance between two rotations, radians.
double rotation_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

/// Max deviation of R*R^T from identity plus |det - 1|; near zero for a proper rotation.
double orthonormality_error(const Eigen::Matrix3d& rot);

} // namespace hmr
