#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmr/geometry.hpp"

namespace hmr {

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct NotConverged : std::runtime_error {
    NotConverged(const std::string& what, double pos_residual, double rot_residual)
        : std::runtime_error(what), pos_residual(pos_residual), rot_residual(rot_residual) {}
    double pos_residual;
    double rot_residual;
};
struct Unreachable : NotConverged {
    using NotConverged::NotConverged;
};

struct JointSpec {
    double dh_a = 0.0;       // m
    double dh_alpha = 0.0;   // rad
    double dh_d = 0.0;       // m
    double theta_offset = 0.0;
    double limit_lo = -3.14;
    double limit_hi = 3.14;
    double vel_limit = 2.0;  // rad/s
};

/// Serial revolute chain in standard DH convention
/// (T_i = RotZ(q_i + offset) TransZ(d) TransX(a) RotX(alpha)), plus a fixed
/// tool transform.
struct KinematicChain {
    std::vector<JointSpec> joints;
    Eigen::Matrix3d tool_rotation{Eigen::Matrix3d::Identity()};
    Eigen::Vector3d tool_translation{Eigen::Vector3d::Zero()};

    size_t dof() const { return joints.size(); }
    Eigen::VectorXd midrange() const;

    /// JSON chain file, {"convention": "dh_standard", "joints": [...], "tool": {...}}.
    static KinematicChain load(const std::string& path);
    void validate() const;
};

Pose6 forward_kinematics(const KinematicChain& chain, const Eigen::VectorXd& q);

/// Geometric Jacobian at the tool point, base frame; rows 0-2 linear, 3-5 angular.
Eigen::MatrixXd jacobian(const KinematicChain& chain, const Eigen::VectorXd& q);

struct IkParams {
    double damping = 0.05;       // DLS lambda
    int max_iters = 200;
    double pos_tol = 1e-4;       // m
    double rot_tol = 1e-3;       // rad
    double nullspace_bias = 0.1; // gain toward joint midrange
    double max_step_rad = 0.5;   // per-iteration trust region, infinity norm
    int max_restarts = 12;       // deterministic low-discrepancy reseeds
};

struct IkResult {
    Eigen::VectorXd q;
    int iterations = 0;
    double pos_residual = 0.0;
    double rot_residual = 0.0;
};

/// Damped-least-squares IK with joint-limit clamping and a nullspace pull
/// toward midrange. Deterministic. Throws NotConverged / Unreachable.
IkResult solve_ik(const KinematicChain& chain, const Pose6& target, const Eigen::VectorXd& seed_q,
                  const IkParams& params = {});

struct LimitVerdict {
    std::vector<bool> within; // per joint, closed interval
    bool all_within = true;
};

LimitVerdict check_limits(const KinematicChain& chain, const Eigen::VectorXd& q);

} // namespace hmr
