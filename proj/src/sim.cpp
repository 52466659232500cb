#include "hmr/sim.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace hmr {

ControllerGains ControllerGains::uniform(size_t dof, double kp, double kd) {
    ControllerGains gains;
    gains.kp = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dof), kp);
    gains.kd = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dof), kd);
    return gains;
}

SimState SimState::at_start(const JointTrajectory& traj) {
    SampledState ref = sample(traj, 0.0);
    SimState state;
    state.q = ref.q;
    state.qd = ref.qd;
    state.max_err = Eigen::VectorXd::Zero(ref.q.size());
    state.sum_sq_err = Eigen::VectorXd::Zero(ref.q.size());
    return state;
}

SimState step(const SimState& state, const JointTrajectory& traj, const ControllerGains& gains,
              double dt, const std::optional<Eigen::VectorXd>& disturbance) {
    if (dt <= 0) throw std::invalid_argument("dt must be positive");
    Eigen::Index dof = state.q.size();
    if (gains.kp.size() != dof || gains.kd.size() != dof)
        throw DimensionMismatch("controller gains do not match state dimension");
    if ((gains.kp.array() <= 0).any() || (gains.kd.array() <= 0).any())
        throw std::invalid_argument("controller gains must be positive");
    if (disturbance && disturbance->size() != dof)
        throw DimensionMismatch("disturbance vector does not match state dimension");
    if (state.t + dt > traj.duration() + 1e-9)
        throw OutOfRange("step past trajectory end");

    SampledState ref0 = sample(traj, state.t);
    SampledState ref1 = sample(traj, std::min(state.t + dt, traj.duration()));

    // u = qdd_ref + kp e + kd f drives the double integrator qdd = u + d, so
    // the tracking error obeys edd = -kp e - kd f - d. Integrating that error
    // system (semi-implicit Euler) and reconstructing q from the reference
    // keeps the zero-error, zero-disturbance case exact instead of drifting
    // with the integrator's truncation error.
    Eigen::VectorXd e = ref0.q - state.q;
    Eigen::VectorXd f = ref0.qd - state.qd;
    Eigen::VectorXd edd = -(gains.kp.cwiseProduct(e) + gains.kd.cwiseProduct(f));
    if (disturbance) edd -= *disturbance;

    SimState next = state;
    Eigen::VectorXd f1 = f + dt * edd;
    Eigen::VectorXd e1 = e + dt * f1;
    next.qd = ref1.qd - f1;
    next.q = ref1.q - e1;
    next.t = state.t + dt;
    ++next.steps;

    Eigen::VectorXd err = e1.cwiseAbs();
    next.max_err = next.max_err.cwiseMax(err);
    next.sum_sq_err += err.cwiseProduct(err);
    return next;
}

ExecutionReport run_tracking(const JointTrajectory& traj, const KinematicChain& chain,
                             const ControllerGains& gains, const Pose6& goal,
                             const RunOptions& options) {
    if (traj.segments.empty()) {
        // Zero-duration trajectory: nothing to execute.
        ExecutionReport report;
        Eigen::Index dof = static_cast<Eigen::Index>(chain.dof());
        report.max_err_rad = Eigen::VectorXd::Zero(dof);
        report.rms_err_rad = Eigen::VectorXd::Zero(dof);
        report.final_pose = goal;
        report.goal_reached = true;
        return report;
    }

    SimState state = SimState::at_start(traj);
    std::ofstream log;
    if (!options.step_log_csv.empty()) {
        log.open(options.step_log_csv);
        log << "t";
        for (Eigen::Index j = 0; j < state.q.size(); ++j) log << ",q" << j << ",err" << j;
        log << "\n";
    }

    double duration = traj.duration();
    while (state.t + options.dt <= duration + 1e-12) {
        state = step(state, traj, gains, options.dt, options.disturbance);
        if (log.is_open()) {
            SampledState ref = sample(traj, state.t);
            log << state.t;
            for (Eigen::Index j = 0; j < state.q.size(); ++j)
                log << "," << state.q(j) << "," << std::abs(ref.q(j) - state.q(j));
            log << "\n";
        }
    }

    ExecutionReport report;
    report.max_err_rad = state.max_err;
    report.rms_err_rad = state.steps
                             ? Eigen::VectorXd((state.sum_sq_err / double(state.steps)).cwiseSqrt())
                             : Eigen::VectorXd::Zero(state.q.size());
    report.steps = state.steps;
    report.final_pose = forward_kinematics(chain, state.q);
    report.final_pos_err_m = (report.final_pose.position - goal.position).norm();
    report.goal_reached = report.final_pos_err_m <= options.goal_tolerance_m;
    return report;
}

std::string report_to_json(const ExecutionReport& report) {
    nlohmann::json j;
    j["max_err_rad"] = std::vector<double>(report.max_err_rad.data(),
                                           report.max_err_rad.data() + report.max_err_rad.size());
    j["rms_err_rad"] = std::vector<double>(report.rms_err_rad.data(),
                                           report.rms_err_rad.data() + report.rms_err_rad.size());
    j["final_pos_err_m"] = report.final_pos_err_m;
    j["goal_reached"] = report.goal_reached;
    j["steps"] = report.steps;
    return j.dump(2);
}

} // namespace hmr
