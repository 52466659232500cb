#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "hmr/kinematics.hpp"
#include "hmr/trajectory.hpp"

namespace hmr {

/// Per-joint PD gains for the tracking controller.
struct ControllerGains {
    Eigen::VectorXd kp;
    Eigen::VectorXd kd;

    /// Uniform gains for an n-joint chain; kd = 2*sqrt(kp) is critically
    /// damped for the unit-inertia plant.
    static ControllerGains uniform(size_t dof, double kp = 100.0, double kd = 20.0);
};

struct SimState {
    double t = 0.0;
    Eigen::VectorXd q, qd;
    Eigen::VectorXd max_err;    // per joint, |q_ref - q|
    Eigen::VectorXd sum_sq_err; // accumulates for RMS
    size_t steps = 0;

    static SimState at_start(const JointTrajectory& traj);
};

/// One semi-implicit Euler step of the unit-inertia double integrator
/// qdd = u + disturbance, u = qdd_ref + kp (q_ref - q) + kd (qd_ref - qd).
/// Integrated in error coordinates, so exact feedforward is exact: with zero
/// initial error and no disturbance the plant reproduces the reference.
SimState step(const SimState& state, const JointTrajectory& traj, const ControllerGains& gains,
              double dt, const std::optional<Eigen::VectorXd>& disturbance = std::nullopt);

struct ExecutionReport {
    Eigen::VectorXd max_err_rad;
    Eigen::VectorXd rms_err_rad;
    Pose6 final_pose;         // FK of the simulated final configuration
    double final_pos_err_m = 0.0;
    bool goal_reached = false;
    size_t steps = 0;
};

struct RunOptions {
    double dt = 1e-3;
    double goal_tolerance_m = 2e-3;
    std::optional<Eigen::VectorXd> disturbance; // constant per-joint accel
    std::string step_log_csv;                   // per-step log when non-empty
};

/// Integrates the full trajectory and reports tracking statistics. The goal
/// check recomputes the final pose with forward_kinematics against the pose
/// passed in `goal`, never trusting the planner.
ExecutionReport run_tracking(const JointTrajectory& traj, const KinematicChain& chain,
                             const ControllerGains& gains, const Pose6& goal,
                             const RunOptions& options = {});

std::string report_to_json(const ExecutionReport& report);

} // namespace hmr
