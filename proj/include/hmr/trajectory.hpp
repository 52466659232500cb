#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmr/errors.hpp"
#include "hmr/kinematics.hpp"

namespace hmr {

struct IkFailed : std::runtime_error {
    IkFailed(size_t waypoint, const std::string& what)
        : std::runtime_error("IK failed at waypoint " + std::to_string(waypoint) + ": " + what),
          waypoint(waypoint) {}
    size_t waypoint;
};
struct LimitViolation : std::runtime_error {
    explicit LimitViolation(const std::string& what) : std::runtime_error(what) {}
};
struct NonmonotonicTiming : std::runtime_error {
    explicit NonmonotonicTiming(const std::string& what) : std::runtime_error(what) {}
};

/// Quintic polynomial segment, evaluated on local time s in [0, h].
struct QuinticSegment {
    double c[6] = {0, 0, 0, 0, 0, 0};

    double pos(double s) const {
        return c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * (c[4] + s * c[5]))));
    }
    double vel(double s) const {
        return c[1] + s * (2 * c[2] + s * (3 * c[3] + s * (4 * c[4] + s * 5 * c[5])));
    }
    double acc(double s) const {
        return 2 * c[2] + s * (6 * c[3] + s * (12 * c[4] + s * 20 * c[5]));
    }
};

/// C2-continuous joint-space trajectory: quintic segments between knots,
/// zero velocity and acceleration at both ends.
struct JointTrajectory {
    std::vector<double> knot_times;                        // strictly increasing, t0 = 0
    std::vector<std::vector<QuinticSegment>> segments;     // [segment][joint]
    size_t dof = 0;

    double duration() const { return knot_times.empty() ? 0.0 : knot_times.back(); }
};

struct SampledState {
    Eigen::VectorXd q, qd, qdd;
};

/// Either explicit per-segment durations or a joint velocity cap from which
/// segment durations are derived as max_j |dq_j| / v_cap (floor 0.1 s).
struct SplineTiming {
    std::vector<double> segment_durations; // used when non-empty
    double max_joint_velocity = 0.5;       // rad/s
    double min_segment_duration = 0.1;     // s
};

struct PathParams {
    double max_step = 0.2; // rad, max joint-space infinity-norm between waypoints
    IkParams ik;
};

/// IK through via poses to the target, each solution seeding the next, then
/// joint-space subdivision so consecutive waypoints are at most max_step apart.
/// Throws IkFailed(index) / LimitViolation.
std::vector<Eigen::VectorXd> plan_path(const KinematicChain& chain,
                                       const Eigen::VectorXd& start_q, const Pose6& target_pose,
                                       const std::vector<Pose6>& via = {},
                                       const PathParams& params = {});

/// Interpolating quintic spline with zero boundary velocity/acceleration.
/// Interior knot velocities and accelerations come from the C3/C4-continuity
/// solve, so the result is smooth through every knot.
JointTrajectory fit_spline(const std::vector<Eigen::VectorXd>& waypoints,
                           const SplineTiming& timing);

/// Closed-form evaluation; exact at knots. Throws OutOfRange outside [0, duration].
SampledState sample(const JointTrajectory& traj, double t);

struct ValidationIssue {
    size_t joint;
    double time;
    std::string kind; // "position" | "velocity"
    double value;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;
    double worst_position_margin = 0.0; // min over joints/time of distance to limits, rad
    double worst_velocity_margin = 0.0; // min of vel_limit - |qd|, rad/s
};

/// Densely samples the trajectory (default 1 kHz) against the chain's joint
/// position and velocity limits.
ValidationReport validate(const JointTrajectory& traj, const KinematicChain& chain,
                          double sample_hz = 1000.0);

} // namespace hmr
