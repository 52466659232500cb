#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "hmr/kinematics.hpp"

using namespace hmr;

namespace {

KinematicChain default_chain() {
    return KinematicChain::load(std::string(HMR_DATA_DIR) + "/chain_default.json");
}

Eigen::VectorXd random_config(const KinematicChain& chain, std::mt19937_64& rng,
                              double margin = 0.3) {
    Eigen::VectorXd q(chain.dof());
    for (size_t i = 0; i < chain.dof(); ++i) {
        std::uniform_real_distribution<double> d(chain.joints[i].limit_lo + margin,
                                                 chain.joints[i].limit_hi - margin);
        q(Eigen::Index(i)) = d(rng);
    }
    return q;
}

} // namespace

TEST_CASE("chain file loads with the expected structure") {
    auto chain = default_chain();
    CHECK(chain.dof() == 7);
    CHECK(chain.tool_translation.z() == doctest::Approx(0.12));
    CHECK(chain.joints[0].dh_d == doctest::Approx(0.34));
    CHECK(chain.joints[6].limit_hi == doctest::Approx(3.054));
    CHECK(chain.midrange().norm() == doctest::Approx(0.0)); // symmetric limits
    chain.validate();
}

TEST_CASE("forward kinematics matches the independently computed zero pose") {
    auto chain = default_chain();
    Pose6 pose = forward_kinematics(chain, Eigen::VectorXd::Zero(7));
    // all a=0 and zero angles: links stack along base z,
    // 0.34 + 0.4 + 0.4 + 0.126 + tool 0.12 = 1.386
    CHECK((pose.position - Eigen::Vector3d(0, 0, 1.386)).norm() < 1e-12);
    CHECK((pose.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("forward kinematics hand-derived single-joint cases") {
    auto chain = default_chain();

    // Rotating the base joint spins the stacked arm in place about base z.
    Eigen::VectorXd q = Eigen::VectorXd::Zero(7);
    q(0) = M_PI / 2;
    Pose6 p1 = forward_kinematics(chain, q);
    CHECK((p1.position - Eigen::Vector3d(0, 0, 1.386)).norm() < 1e-12);
    Eigen::Matrix3d rz = Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    CHECK((p1.rotation - rz).cwiseAbs().maxCoeff() < 1e-12);

    // Joint 2's axis is the z column of frame 1, i.e. base +y through
    // (0,0,0.34); the distal 1.046 m swings about it:
    // position = (0,0,0.34) + 1.046 * (sin t, 0, cos t).
    for (double t : {0.3, 1.0, M_PI / 2}) {
        q.setZero();
        q(1) = t;
        Pose6 p2 = forward_kinematics(chain, q);
        Eigen::Vector3d expected =
            Eigen::Vector3d(0, 0, 0.34) + 1.046 * Eigen::Vector3d(std::sin(t), 0, std::cos(t));
        CHECK((p2.position - expected).norm() < 1e-12);
        Eigen::Matrix3d ry =
            Eigen::AngleAxisd(t, Eigen::Vector3d::UnitY()).toRotationMatrix();
        CHECK((p2.rotation - ry).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("forward kinematics always returns a proper rotation") {
    auto chain = default_chain();
    std::mt19937_64 rng(71);
    for (int i = 0; i < 500; ++i) {
        Pose6 pose = forward_kinematics(chain, random_config(chain, rng, 0.0));
        CHECK(orthonormality_error(pose.rotation) < 1e-12);
        CHECK(pose.position.norm() < 1.386 + 1e-9); // reach bound
    }
}

TEST_CASE("jacobian matches central finite differences") {
    auto chain = default_chain();
    std::mt19937_64 rng(73);
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd q = random_config(chain, rng);
        Eigen::MatrixXd jac = jacobian(chain, q);
        REQUIRE(jac.rows() == 6);
        REQUIRE(jac.cols() == 7);
        for (int i = 0; i < 7; ++i) {
            Eigen::VectorXd qp = q, qm = q;
            qp(i) += h;
            qm(i) -= h;
            Pose6 fp = forward_kinematics(chain, qp);
            Pose6 fm = forward_kinematics(chain, qm);
            Eigen::Vector3d lin_fd = (fp.position - fm.position) / (2 * h);
            Eigen::Vector3d ang_fd = so3_log(fp.rotation * fm.rotation.transpose()) / (2 * h);
            CHECK((jac.block<3, 1>(0, i) - lin_fd).norm() < 1e-5);
            CHECK((jac.block<3, 1>(3, i) - ang_fd).norm() < 1e-5);
        }
    }
}

TEST_CASE("ik returns the seed unchanged when already at the target") {
    auto chain = default_chain();
    std::mt19937_64 rng(79);
    Eigen::VectorXd q = random_config(chain, rng);
    Pose6 target = forward_kinematics(chain, q);
    IkResult result = solve_ik(chain, target, q);
    CHECK(result.iterations == 0);
    CHECK(result.q == q); // bitwise: convergence is checked before the first step
    CHECK(result.pos_residual == doctest::Approx(0.0));
}

TEST_CASE("ik round-trips reachable targets from perturbed seeds") {
    auto chain = default_chain();
    std::mt19937_64 rng(83);
    std::normal_distribution<double> jitter(0.0, 0.3);
    IkParams params;
    int converged = 0;
    const int trials = 50;
    for (int trial = 0; trial < trials; ++trial) {
        Eigen::VectorXd q_true = random_config(chain, rng);
        Pose6 target = forward_kinematics(chain, q_true);
        Eigen::VectorXd seed = q_true;
        for (int i = 0; i < 7; ++i) seed(i) += jitter(rng);
        try {
            IkResult result = solve_ik(chain, target, seed, params);
            Pose6 reached = forward_kinematics(chain, result.q);
            CHECK((reached.position - target.position).norm() <= params.pos_tol);
            CHECK(rotation_distance(reached.rotation, target.rotation) <= params.rot_tol);
            CHECK(check_limits(chain, result.q).all_within);
            ++converged;
        } catch (const NotConverged&) {
        }
    }
    CHECK(converged >= trials - 1);
}

TEST_CASE("ik respects joint limits along the way") {
    auto chain = default_chain();
    // Shrink joint 1's range and ask for a pose that tempts it past the limit.
    chain.joints[0].limit_lo = -0.1;
    chain.joints[0].limit_hi = 0.1;
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd q_true = random_config(chain, rng, 0.01);
        Pose6 target = forward_kinematics(chain, q_true);
        try {
            IkResult result = solve_ik(chain, target, chain.midrange());
            CHECK(check_limits(chain, result.q).all_within);
        } catch (const NotConverged&) {
            // acceptable: the clamped problem may be infeasible from this seed
        }
    }
}

TEST_CASE("ik reports unreachable targets") {
    auto chain = default_chain();
    Pose6 target;
    target.position = Eigen::Vector3d(5, 0, 0); // far beyond the 1.386 m reach
    CHECK_THROWS_AS(solve_ik(chain, target, chain.midrange()), NotConverged);
}

TEST_CASE("ik input validation") {
    auto chain = default_chain();
    Pose6 target = forward_kinematics(chain, Eigen::VectorXd::Zero(7));
    CHECK_THROWS_AS(solve_ik(chain, target, Eigen::VectorXd::Zero(5)), DimensionMismatch);
    CHECK_THROWS_AS(forward_kinematics(chain, Eigen::VectorXd::Zero(6)), DimensionMismatch);
    CHECK_THROWS_AS(jacobian(chain, Eigen::VectorXd::Zero(8)), DimensionMismatch);
    Pose6 bad = target;
    bad.rotation(0, 0) = 2.0;
    CHECK_THROWS_AS(solve_ik(chain, bad, Eigen::VectorXd::Zero(7)), std::invalid_argument);
}

TEST_CASE("check_limits uses closed intervals") {
    auto chain = default_chain();
    Eigen::VectorXd q = Eigen::VectorXd::Zero(7);
    q(0) = chain.joints[0].limit_hi; // exactly at the boundary
    q(1) = chain.joints[1].limit_lo;
    auto verdict = check_limits(chain, q);
    CHECK(verdict.all_within);
    q(0) = chain.joints[0].limit_hi + 1e-9;
    verdict = check_limits(chain, q);
    CHECK_FALSE(verdict.all_within);
    CHECK_FALSE(verdict.within[0]);
    CHECK(verdict.within[1]);
}

TEST_CASE("chain validation errors") {
    KinematicChain empty;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    auto chain = default_chain();
    chain.joints[2].limit_lo = chain.joints[2].limit_hi;
    CHECK_THROWS_AS(chain.validate(), std::invalid_argument);

    chain = default_chain();
    chain.joints[0].vel_limit = 0.0;
    CHECK_THROWS_AS(chain.validate(), std::invalid_argument);

    chain = default_chain();
    chain.tool_rotation(0, 0) = 0.5;
    CHECK_THROWS_AS(chain.validate(), std::invalid_argument);
}
