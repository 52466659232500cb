#include "hmr/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace hmr {
namespace {

/// Linear form over the interior-knot unknowns: value = coeffs . x + constant.
struct LinForm {
    Eigen::VectorXd coeffs;
    double constant = 0.0;

    LinForm(Eigen::Index n = 0) : coeffs(Eigen::VectorXd::Zero(n)) {}
    LinForm operator*(double s) const {
        LinForm out(coeffs.size());
        out.coeffs = coeffs * s;
        out.constant = constant * s;
        return out;
    }
    LinForm operator+(const LinForm& o) const {
        LinForm out(coeffs.size());
        out.coeffs = coeffs + o.coeffs;
        out.constant = constant + o.constant;
        return out;
    }
    LinForm operator-(const LinForm& o) const {
        LinForm out(coeffs.size());
        out.coeffs = coeffs - o.coeffs;
        out.constant = constant - o.constant;
        return out;
    }
};

/// Quintic Hermite coefficients c3..c5 on [0,h] as linear forms over the
/// endpoint velocities/accelerations (v0,a0,v1,a1 given as LinForms).
struct SegmentForms {
    LinForm c3, c4, c5;
};

SegmentForms hermite_tail(double delta, double h, const LinForm& v0, const LinForm& a0,
                          const LinForm& v1, const LinForm& a1, Eigen::Index n) {
    double h2 = h * h, h3 = h2 * h, h4 = h3 * h, h5 = h4 * h;
    SegmentForms f;
    f.c3 = LinForm(n);
    f.c3.constant = 20 * delta / (2 * h3);
    f.c3 = f.c3 + v0 * (-12 * h / (2 * h3)) + v1 * (-8 * h / (2 * h3)) +
           a0 * (-3 * h2 / (2 * h3)) + a1 * (h2 / (2 * h3));
    f.c4 = LinForm(n);
    f.c4.constant = -30 * delta / (2 * h4);
    f.c4 = f.c4 + v0 * (16 * h / (2 * h4)) + v1 * (14 * h / (2 * h4)) + a0 * (3 * h2 / (2 * h4)) +
           a1 * (-2 * h2 / (2 * h4));
    f.c5 = LinForm(n);
    f.c5.constant = 12 * delta / (2 * h5);
    f.c5 = f.c5 + v0 * (-6 * h / (2 * h5)) + v1 * (-6 * h / (2 * h5)) + a0 * (-h2 / (2 * h5)) +
           a1 * (h2 / (2 * h5));
    return f;
}

QuinticSegment build_segment(double q0, double v0, double a0, double q1, double v1, double a1,
                             double h) {
    double delta = q1 - q0;
    double h2 = h * h, h3 = h2 * h, h4 = h3 * h, h5 = h4 * h;
    QuinticSegment seg;
    seg.c[0] = q0;
    seg.c[1] = v0;
    seg.c[2] = 0.5 * a0;
    seg.c[3] = (20 * delta - (8 * v1 + 12 * v0) * h - (3 * a0 - a1) * h2) / (2 * h3);
    seg.c[4] = (-30 * delta + (14 * v1 + 16 * v0) * h + (3 * a0 - 2 * a1) * h2) / (2 * h4);
    seg.c[5] = (12 * delta - 6 * (v1 + v0) * h + (a1 - a0) * h2) / (2 * h5);
    return seg;
}

} // namespace

std::vector<Eigen::VectorXd> plan_path(const KinematicChain& chain,
                                       const Eigen::VectorXd& start_q, const Pose6& target_pose,
                                       const std::vector<Pose6>& via, const PathParams& params) {
    if (!check_limits(chain, start_q).all_within)
        throw LimitViolation("start configuration violates joint limits");

    std::vector<Eigen::VectorXd> anchors{start_q};
    std::vector<Pose6> poses = via;
    poses.push_back(target_pose);
    for (size_t i = 0; i < poses.size(); ++i) {
        try {
            IkResult ik = solve_ik(chain, poses[i], anchors.back(), params.ik);
            if (!check_limits(chain, ik.q).all_within)
                throw LimitViolation("IK waypoint " + std::to_string(i + 1) +
                                     " violates joint limits");
            anchors.push_back(ik.q);
        } catch (const NotConverged& e) {
            throw IkFailed(i + 1, e.what());
        }
    }

    // Bound consecutive joint-space steps by linear subdivision. Anchors that
    // coincide with their predecessor (target already at the seed) are skipped,
    // so an already-satisfied target yields the single-element path.
    std::vector<Eigen::VectorXd> waypoints{anchors.front()};
    for (size_t i = 1; i < anchors.size(); ++i) {
        const Eigen::VectorXd& a = waypoints.back();
        Eigen::VectorXd b = anchors[i];
        double dist = (b - a).lpNorm<Eigen::Infinity>();
        if (dist < 1e-12) continue;
        int steps = std::max(1, static_cast<int>(std::ceil(dist / params.max_step)));
        Eigen::VectorXd from = a;
        for (int s = 1; s <= steps; ++s)
            waypoints.push_back(from + (double(s) / steps) * (b - from));
    }
    return waypoints;
}

JointTrajectory fit_spline(const std::vector<Eigen::VectorXd>& waypoints,
                           const SplineTiming& timing) {
    if (waypoints.size() < 2) throw std::invalid_argument("fit_spline needs >= 2 waypoints");
    size_t n_knots = waypoints.size();
    size_t n_segs = n_knots - 1;
    size_t dof = static_cast<size_t>(waypoints.front().size());
    for (const auto& w : waypoints)
        if (static_cast<size_t>(w.size()) != dof)
            throw std::invalid_argument("waypoint dimension mismatch");

    std::vector<double> durations;
    if (!timing.segment_durations.empty()) {
        if (timing.segment_durations.size() != n_segs)
            throw NonmonotonicTiming("expected " + std::to_string(n_segs) +
                                     " segment durations, got " +
                                     std::to_string(timing.segment_durations.size()));
        for (double h : timing.segment_durations)
            if (h <= 0) throw NonmonotonicTiming("segment durations must be positive");
        durations = timing.segment_durations;
    } else {
        if (timing.max_joint_velocity <= 0)
            throw std::invalid_argument("velocity cap must be positive");
        for (size_t s = 0; s < n_segs; ++s) {
            double dq = (waypoints[s + 1] - waypoints[s]).lpNorm<Eigen::Infinity>();
            durations.push_back(std::max(timing.min_segment_duration,
                                         dq / timing.max_joint_velocity));
        }
    }

    JointTrajectory traj;
    traj.dof = dof;
    traj.knot_times.resize(n_knots);
    traj.knot_times[0] = 0.0;
    for (size_t s = 0; s < n_segs; ++s) traj.knot_times[s + 1] = traj.knot_times[s] + durations[s];
    traj.segments.assign(n_segs, std::vector<QuinticSegment>(dof));

    size_t n_interior = n_knots - 2;
    Eigen::Index n_unknowns = static_cast<Eigen::Index>(2 * n_interior); // (v_k, a_k) per interior knot

    for (size_t j = 0; j < dof; ++j) {
        Eigen::VectorXd knot_v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_knots));
        Eigen::VectorXd knot_a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_knots));

        if (n_interior > 0) {
            // Unknown layout: x = [v_1, a_1, ..., v_{n-2}, a_{n-2}]; boundary v,a pinned to 0.
            auto v_form = [&](size_t k) {
                LinForm f(n_unknowns);
                if (k >= 1 && k <= n_interior) f.coeffs(static_cast<Eigen::Index>(2 * (k - 1))) = 1.0;
                return f;
            };
            auto a_form = [&](size_t k) {
                LinForm f(n_unknowns);
                if (k >= 1 && k <= n_interior)
                    f.coeffs(static_cast<Eigen::Index>(2 * (k - 1) + 1)) = 1.0;
                return f;
            };

            std::vector<SegmentForms> forms(n_segs);
            for (size_t s = 0; s < n_segs; ++s) {
                double delta = waypoints[s + 1](static_cast<Eigen::Index>(j)) -
                               waypoints[s](static_cast<Eigen::Index>(j));
                forms[s] = hermite_tail(delta, durations[s], v_form(s), a_form(s), v_form(s + 1),
                                        a_form(s + 1), n_unknowns);
            }

            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_unknowns, n_unknowns);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(n_unknowns);
            Eigen::Index row = 0;
            for (size_t k = 1; k <= n_interior; ++k) {
                double hL = durations[k - 1];
                const SegmentForms& L = forms[k - 1];
                const SegmentForms& R = forms[k];
                // C3: jerk continuity.
                LinForm c3_eq = L.c3 * 6.0 + L.c4 * (24.0 * hL) + L.c5 * (60.0 * hL * hL) -
                                R.c3 * 6.0;
                A.row(row) = c3_eq.coeffs.transpose();
                b(row) = -c3_eq.constant;
                ++row;
                // C4: snap continuity.
                LinForm c4_eq = L.c4 * 24.0 + L.c5 * (120.0 * hL) - R.c4 * 24.0;
                A.row(row) = c4_eq.coeffs.transpose();
                b(row) = -c4_eq.constant;
                ++row;
            }
            Eigen::VectorXd x = A.fullPivLu().solve(b);
            for (size_t k = 1; k <= n_interior; ++k) {
                knot_v(static_cast<Eigen::Index>(k)) = x(static_cast<Eigen::Index>(2 * (k - 1)));
                knot_a(static_cast<Eigen::Index>(k)) = x(static_cast<Eigen::Index>(2 * (k - 1) + 1));
            }
        }

        for (size_t s = 0; s < n_segs; ++s) {
            Eigen::Index jj = static_cast<Eigen::Index>(j);
            traj.segments[s][j] = build_segment(
                waypoints[s](jj), knot_v(static_cast<Eigen::Index>(s)),
                knot_a(static_cast<Eigen::Index>(s)), waypoints[s + 1](jj),
                knot_v(static_cast<Eigen::Index>(s + 1)), knot_a(static_cast<Eigen::Index>(s + 1)),
                durations[s]);
        }
    }
    return traj;
}

SampledState sample(const JointTrajectory& traj, double t) {
    if (traj.segments.empty()) throw OutOfRange("empty trajectory");
    if (t < 0.0 || t > traj.duration() + 1e-12)
        throw OutOfRange("sample time " + std::to_string(t) + " outside [0, " +
                         std::to_string(traj.duration()) + "]");
    t = std::min(t, traj.duration());

    // Last knot with knot_times[s] <= t.
    auto it = std::upper_bound(traj.knot_times.begin(), traj.knot_times.end(), t);
    size_t seg = static_cast<size_t>(std::distance(traj.knot_times.begin(), it)) - 1;
    seg = std::min(seg, traj.segments.size() - 1);
    double s = t - traj.knot_times[seg];

    SampledState state;
    Eigen::Index dof = static_cast<Eigen::Index>(traj.dof);
    state.q.resize(dof);
    state.qd.resize(dof);
    state.qdd.resize(dof);
    for (Eigen::Index j = 0; j < dof; ++j) {
        const QuinticSegment& poly = traj.segments[seg][static_cast<size_t>(j)];
        state.q(j) = poly.pos(s);
        state.qd(j) = poly.vel(s);
        state.qdd(j) = poly.acc(s);
    }
    return state;
}

ValidationReport validate(const JointTrajectory& traj, const KinematicChain& chain,
                          double sample_hz) {
    ValidationReport report;
    report.worst_position_margin = std::numeric_limits<double>::infinity();
    report.worst_velocity_margin = std::numeric_limits<double>::infinity();
    if (traj.dof != chain.dof())
        throw DimensionMismatch("trajectory dof does not match chain");

    double duration = traj.duration();
    size_t steps = std::max<size_t>(2, static_cast<size_t>(std::ceil(duration * sample_hz)) + 1);
    for (size_t i = 0; i < steps; ++i) {
        double t = duration * double(i) / double(steps - 1);
        SampledState state = sample(traj, t);
        for (size_t j = 0; j < chain.dof(); ++j) {
            Eigen::Index jj = static_cast<Eigen::Index>(j);
            const JointSpec& joint = chain.joints[j];
            double pos_margin =
                std::min(state.q(jj) - joint.limit_lo, joint.limit_hi - state.q(jj));
            double vel_margin = joint.vel_limit - std::abs(state.qd(jj));
            report.worst_position_margin = std::min(report.worst_position_margin, pos_margin);
            report.worst_velocity_margin = std::min(report.worst_velocity_margin, vel_margin);
            if (pos_margin < 0) {
                report.ok = false;
                report.issues.push_back({j, t, "position", state.q(jj)});
            }
            if (vel_margin < 0) {
                report.ok = false;
                report.issues.push_back({j, t, "velocity", state.qd(jj)});
            }
        }
    }
    return report;
}

} // namespace hmr
