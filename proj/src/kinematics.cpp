#include "hmr/kinematics.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/QR>

#include <json.hpp>

namespace hmr {
namespace {

struct Frame {
    Eigen::Matrix3d rot{Eigen::Matrix3d::Identity()};
    Eigen::Vector3d pos{Eigen::Vector3d::Zero()};

    Frame operator*(const Frame& o) const { return {rot * o.rot, rot * o.pos + pos}; }
};

/// Standard DH link transform: RotZ(theta) TransZ(d) TransX(a) RotX(alpha).
Frame dh_transform(const JointSpec& joint, double q) {
    double theta = q + joint.theta_offset;
    double ct = std::cos(theta), st = std::sin(theta);
    double ca = std::cos(joint.dh_alpha), sa = std::sin(joint.dh_alpha);
    Frame f;
    f.rot << ct, -st * ca, st * sa,
             st,  ct * ca, -ct * sa,
              0,       sa,       ca;
    f.pos << joint.dh_a * ct, joint.dh_a * st, joint.dh_d;
    return f;
}

/// Radical-inverse van der Corput sequence; drives the deterministic
/// low-discrepancy restart seeds for IK.
double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

void require_dof(const KinematicChain& chain, const Eigen::VectorXd& q) {
    if (chain.joints.empty()) throw DimensionMismatch("chain has no joints");
    if (static_cast<size_t>(q.size()) != chain.dof())
        throw DimensionMismatch("joint vector length " + std::to_string(q.size()) +
                                " != chain dof " + std::to_string(chain.dof()));
}

} // namespace

Eigen::VectorXd KinematicChain::midrange() const {
    Eigen::VectorXd mid(dof());
    for (size_t i = 0; i < joints.size(); ++i)
        mid(static_cast<Eigen::Index>(i)) = 0.5 * (joints[i].limit_lo + joints[i].limit_hi);
    return mid;
}

void KinematicChain::validate() const {
    if (joints.empty()) throw std::invalid_argument("chain must have at least one joint");
    for (size_t i = 0; i < joints.size(); ++i) {
        if (joints[i].limit_lo >= joints[i].limit_hi)
            throw std::invalid_argument("joint " + std::to_string(i) + " has empty limit range");
        if (joints[i].vel_limit <= 0)
            throw std::invalid_argument("joint " + std::to_string(i) + " velocity limit <= 0");
    }
    if (orthonormality_error(tool_rotation) > 1e-9)
        throw std::invalid_argument("tool rotation is not in SO(3)");
}

KinematicChain KinematicChain::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open chain file: " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("convention", "dh_standard") != "dh_standard")
        throw std::runtime_error("unsupported DH convention in " + path);

    KinematicChain chain;
    for (const auto& joint : j.at("joints")) {
        JointSpec spec;
        spec.dh_a = joint.value("a", 0.0);
        spec.dh_alpha = joint.value("alpha", 0.0);
        spec.dh_d = joint.value("d", 0.0);
        spec.theta_offset = joint.value("theta_offset", 0.0);
        spec.limit_lo = joint.at("lo").get<double>();
        spec.limit_hi = joint.at("hi").get<double>();
        spec.vel_limit = joint.value("vel", 2.0);
        chain.joints.push_back(spec);
    }
    if (j.contains("tool")) {
        const auto& tool = j["tool"];
        if (tool.contains("rotation")) {
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    chain.tool_rotation(r, c) = tool["rotation"][r][c].get<double>();
        }
        if (tool.contains("translation")) {
            for (int r = 0; r < 3; ++r)
                chain.tool_translation(r) = tool["translation"][r].get<double>();
        }
    }
    chain.validate();
    return chain;
}

Pose6 forward_kinematics(const KinematicChain& chain, const Eigen::VectorXd& q) {
    require_dof(chain, q);
    Frame frame;
    for (size_t i = 0; i < chain.joints.size(); ++i)
        frame = frame * dh_transform(chain.joints[i], q(static_cast<Eigen::Index>(i)));
    frame = frame * Frame{chain.tool_rotation, chain.tool_translation};
    return Pose6{frame.pos, frame.rot};
}

Eigen::MatrixXd jacobian(const KinematicChain& chain, const Eigen::VectorXd& q) {
    require_dof(chain, q);
    size_t n = chain.dof();

    // Joint axes and origins: joint i rotates about the z axis of frame i-1.
    std::vector<Eigen::Vector3d> axes(n), origins(n);
    Frame frame;
    for (size_t i = 0; i < n; ++i) {
        axes[i] = frame.rot.col(2);
        origins[i] = frame.pos;
        frame = frame * dh_transform(chain.joints[i], q(static_cast<Eigen::Index>(i)));
    }
    frame = frame * Frame{chain.tool_rotation, chain.tool_translation};
    Eigen::Vector3d tool = frame.pos;

    Eigen::MatrixXd jac(6, static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) {
        Eigen::Index col = static_cast<Eigen::Index>(i);
        jac.block<3, 1>(0, col) = axes[i].cross(tool - origins[i]);
        jac.block<3, 1>(3, col) = axes[i];
    }
    return jac;
}

IkResult solve_ik(const KinematicChain& chain, const Pose6& target, const Eigen::VectorXd& seed_q,
                  const IkParams& params) {
    require_dof(chain, seed_q);
    if (orthonormality_error(target.rotation) > 1e-9)
        throw std::invalid_argument("IK target rotation is not in SO(3)");

    auto clamp_limits = [&](Eigen::VectorXd& q) {
        for (size_t i = 0; i < chain.joints.size(); ++i) {
            Eigen::Index idx = static_cast<Eigen::Index>(i);
            q(idx) = std::clamp(q(idx), chain.joints[i].limit_lo, chain.joints[i].limit_hi);
        }
    };
    auto twist_error = [&](const Eigen::VectorXd& q) {
        Pose6 current = forward_kinematics(chain, q);
        Eigen::Matrix<double, 6, 1> e;
        e.head<3>() = target.position - current.position;
        e.tail<3>() = so3_log(target.rotation * current.rotation.transpose());
        return e;
    };

    Eigen::VectorXd mid = chain.midrange();
    double lambda_sq = params.damping * params.damping;

    auto attempt = [&](Eigen::VectorXd q) -> IkResult {
        Eigen::Matrix<double, 6, 1> e = twist_error(q);
        double best_residual = e.norm();
        int since_improvement = 0;

        for (int iter = 0; iter <= params.max_iters; ++iter) {
            double pos_err = e.head<3>().norm();
            double rot_err = e.tail<3>().norm();
            if (pos_err <= params.pos_tol && rot_err <= params.rot_tol)
                return IkResult{q, iter, pos_err, rot_err};
            if (iter == params.max_iters)
                throw NotConverged("IK did not converge in " + std::to_string(params.max_iters) +
                                       " iterations",
                                   pos_err, rot_err);

            Eigen::MatrixXd jac = jacobian(chain, q);
            // Error-proportional damping: full DLS far from the target for
            // robustness, near-Newton steps close in so the tail converges
            // inside the iteration budget even near singular directions.
            double damped = lambda_sq * std::min(1.0, e.squaredNorm()) + 1e-12;
            Eigen::Matrix<double, 6, 6> gram =
                jac * jac.transpose() + damped * Eigen::Matrix<double, 6, 6>::Identity();
            Eigen::VectorXd dq = jac.transpose() * (gram.inverse() * e);
            if (params.nullspace_bias > 0) {
                // The projector must come from an exact (rank-revealing)
                // pseudoinverse: with the damped one the bias leaks into task
                // space and the iteration equilibrates above the tolerance.
                Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
                Eigen::MatrixXd nullspace =
                    Eigen::MatrixXd::Identity(jac.cols(), jac.cols()) - cod.pseudoInverse() * jac;
                dq += nullspace * (params.nullspace_bias * (mid - q));
            }

            // Trust-region cap: an uncapped first step from a distant seed can
            // slam joints into their limits, leaving the iterate in a clamped
            // local minimum it cannot wrap back out of.
            double biggest = dq.cwiseAbs().maxCoeff();
            if (biggest > params.max_step_rad) dq *= params.max_step_rad / biggest;

            // Backtracking line search on the residual keeps every accepted
            // step a strict improvement, so overshoot cannot cycle.
            Eigen::VectorXd q_next;
            Eigen::Matrix<double, 6, 1> e_next;
            double alpha = 1.0;
            for (int k = 0; k < 12; ++k, alpha *= 0.5) {
                q_next = q + alpha * dq;
                clamp_limits(q_next);
                e_next = twist_error(q_next);
                if (e_next.norm() < e.norm()) break;
            }
            q = q_next;
            e = e_next;

            double residual = e.norm();
            if (residual < best_residual * (1.0 - 1e-10)) {
                best_residual = residual;
                since_improvement = 0;
            } else if (++since_improvement >= 10) {
                throw Unreachable("IK residual stagnated at " + std::to_string(residual),
                                  e.head<3>().norm(), e.tail<3>().norm());
            }
        }
        throw NotConverged("IK internal error", 0, 0); // not reached
    };

    // Deterministic restarts pull the search out of clamped local minima when
    // the caller's seed is poor: first the seed itself, then midrange blends,
    // then a low-discrepancy ladder spanning the joint-limit box.
    std::vector<Eigen::VectorXd> restarts = {seed_q, mid, 0.5 * (seed_q + mid)};
    static constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
    for (int k = 1; k <= params.max_restarts; ++k) {
        Eigen::VectorXd s(static_cast<Eigen::Index>(chain.dof()));
        for (size_t i = 0; i < chain.dof(); ++i) {
            double u = halton(k, kHaltonBases[i % std::size(kHaltonBases)]);
            s(static_cast<Eigen::Index>(i)) =
                chain.joints[i].limit_lo + u * (chain.joints[i].limit_hi - chain.joints[i].limit_lo);
        }
        restarts.push_back(std::move(s));
    }
    for (size_t i = 0; i + 1 < restarts.size(); ++i) {
        try {
            return attempt(restarts[i]);
        } catch (const NotConverged&) {
        }
    }
    return attempt(restarts.back());
}

LimitVerdict check_limits(const KinematicChain& chain, const Eigen::VectorXd& q) {
    require_dof(chain, q);
    LimitVerdict verdict;
    verdict.within.reserve(chain.dof());
    for (size_t i = 0; i < chain.joints.size(); ++i) {
        double v = q(static_cast<Eigen::Index>(i));
        bool ok = v >= chain.joints[i].limit_lo && v <= chain.joints[i].limit_hi;
        verdict.within.push_back(ok);
        verdict.all_within = verdict.all_within && ok;
    }
    return verdict;
}

} // namespace hmr
