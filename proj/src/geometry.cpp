#include "hmr/geometry.hpp"

#include <cmath>

namespace hmr {

Eigen::Vector3d Pose6::euler_zyx() const {
    const Eigen::Matrix3d& r = rotation;
    double sy = -r(2, 0);
    sy = std::clamp(sy, -1.0, 1.0);
    double theta_y = std::asin(sy);
    double theta_z, theta_x;
    if (std::abs(sy) < 1.0 - 1e-12) {
        theta_z = std::atan2(r(1, 0), r(0, 0));
        theta_x = std::atan2(r(2, 1), r(2, 2));
    } else {
        // Gimbal lock: only theta_z + sign(sy)*theta_x is determined; put it all in theta_z.
        theta_z = std::atan2(-r(0, 1), r(1, 1));
        theta_x = 0.0;
    }
    return {theta_z, theta_y, theta_x};
}

Eigen::Matrix3d rotation_from_euler_zyx(double theta_z, double theta_y, double theta_x) {
    return (Eigen::AngleAxisd(theta_z, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(theta_y, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(theta_x, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& rot) {
    Eigen::AngleAxisd aa(rot);
    return aa.angle() * aa.axis();
}

double rotation_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    return so3_log(a * b.transpose()).norm();
}

double orthonormality_error(const Eigen::Matrix3d& rot) {
    double ortho = (rot * rot.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return ortho + std::abs(rot.determinant() - 1.0);
}

} // namespace hmr
