#include <doctest.h>

#include <cmath>
#include <random>

#include "hmr/trajectory.hpp"

using namespace hmr;

namespace {

KinematicChain default_chain() {
    return KinematicChain::load(std::string(HMR_DATA_DIR) + "/chain_default.json");
}

std::vector<Eigen::VectorXd> scalar_waypoints(std::initializer_list<double> values) {
    std::vector<Eigen::VectorXd> w;
    for (double v : values) {
        Eigen::VectorXd q(1);
        q << v;
        w.push_back(q);
    }
    return w;
}

SplineTiming durations(std::initializer_list<double> h) {
    SplineTiming t;
    t.segment_durations = h;
    return t;
}

} // namespace

TEST_CASE("single rest-to-rest segment is the classic minimum quintic") {
    // q(u) = delta * (10u^3 - 15u^4 + 6u^5), u = t/T
    const double T = 2.0, delta = 1.0;
    auto traj = fit_spline(scalar_waypoints({0.0, delta}), durations({T}));
    REQUIRE(traj.segments.size() == 1);
    CHECK(traj.duration() == doctest::Approx(T));

    for (double u : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        double expected = delta * (10 * std::pow(u, 3) - 15 * std::pow(u, 4) + 6 * std::pow(u, 5));
        CHECK(sample(traj, u * T).q(0) == doctest::Approx(expected).epsilon(1e-12));
    }
    // midpoint crosses delta/2; peak velocity is 15*delta/(8T) at the midpoint
    CHECK(sample(traj, T / 2).q(0) == doctest::Approx(delta / 2));
    CHECK(sample(traj, T / 2).qd(0) == doctest::Approx(15.0 * delta / (8.0 * T)));
    // zero boundary velocity and acceleration
    CHECK(sample(traj, 0.0).qd(0) == doctest::Approx(0.0));
    CHECK(sample(traj, 0.0).qdd(0) == doctest::Approx(0.0));
    CHECK(sample(traj, T).qd(0) == doctest::Approx(0.0));
    CHECK(sample(traj, T).qdd(0) == doctest::Approx(0.0));
}

TEST_CASE("spline interpolates every waypoint exactly at its knot") {
    std::mt19937_64 rng(97);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Eigen::VectorXd> waypoints;
    for (int i = 0; i < 7; ++i) {
        Eigen::VectorXd q(3);
        q << g(rng), g(rng), g(rng);
        waypoints.push_back(q);
    }
    auto traj = fit_spline(waypoints, durations({0.5, 1.0, 0.7, 1.3, 0.4, 0.9}));
    REQUIRE(traj.knot_times.size() == 7);
    for (size_t k = 0; k < waypoints.size(); ++k) {
        auto state = sample(traj, traj.knot_times[k]);
        CHECK((state.q - waypoints[k]).lpNorm<Eigen::Infinity>() < 1e-9);
    }
    // boundary conditions
    CHECK(sample(traj, 0.0).qd.norm() < 1e-9);
    CHECK(sample(traj, 0.0).qdd.norm() < 1e-9);
    CHECK(sample(traj, traj.duration()).qd.norm() < 1e-9);
    CHECK(sample(traj, traj.duration()).qdd.norm() < 1e-9);
}

TEST_CASE("position, velocity, and acceleration are continuous at interior knots") {
    std::mt19937_64 rng(101);
    std::normal_distribution<double> g(0.0, 0.8);
    std::vector<Eigen::VectorXd> waypoints;
    for (int i = 0; i < 6; ++i) {
        Eigen::VectorXd q(2);
        q << g(rng), g(rng);
        waypoints.push_back(q);
    }
    auto traj = fit_spline(waypoints, durations({0.8, 0.5, 1.1, 0.6, 0.9}));

    // exact segment-boundary comparison, no finite differences needed
    for (size_t s = 0; s + 1 < traj.segments.size(); ++s) {
        double h = traj.knot_times[s + 1] - traj.knot_times[s];
        for (size_t j = 0; j < traj.dof; ++j) {
            const auto& left = traj.segments[s][j];
            const auto& right = traj.segments[s + 1][j];
            CHECK(left.pos(h) == doctest::Approx(right.pos(0.0)).epsilon(1e-9));
            CHECK(left.vel(h) == doctest::Approx(right.vel(0.0)).epsilon(1e-7));
            CHECK(std::abs(left.acc(h) - right.acc(0.0)) < 1e-6);
        }
    }
}

TEST_CASE("sampled derivatives match finite differences of the position") {
    auto traj = fit_spline(scalar_waypoints({0.0, 1.0, -0.5, 0.2}), durations({1.0, 0.8, 1.2}));
    const double eps = 1e-6;
    for (double t = eps; t < traj.duration() - eps; t += 0.0503) {
        auto mid = sample(traj, t);
        auto lo = sample(traj, t - eps);
        auto hi = sample(traj, t + eps);
        CHECK(mid.qd(0) == doctest::Approx((hi.q(0) - lo.q(0)) / (2 * eps)).epsilon(1e-4));
        CHECK(mid.qdd(0) == doctest::Approx((hi.qd(0) - lo.qd(0)) / (2 * eps)).epsilon(1e-4));
    }
}

TEST_CASE("uniform time scaling scales velocity and acceleration accordingly") {
    auto waypoints = scalar_waypoints({0.0, 1.0, 0.3, 0.9});
    auto base = fit_spline(waypoints, durations({1.0, 0.6, 0.8}));
    const double k = 2.0;
    auto slow = fit_spline(waypoints, durations({1.0 * k, 0.6 * k, 0.8 * k}));
    for (double t = 0.0; t <= base.duration(); t += 0.1) {
        auto a = sample(base, t);
        auto b = sample(slow, k * t);
        CHECK(b.q(0) == doctest::Approx(a.q(0)).epsilon(1e-9));
        CHECK(b.qd(0) == doctest::Approx(a.qd(0) / k).epsilon(1e-9));
        CHECK(b.qdd(0) == doctest::Approx(a.qdd(0) / (k * k)).epsilon(1e-9));
    }
}

TEST_CASE("velocity-cap timing derives segment durations") {
    SplineTiming timing;
    timing.max_joint_velocity = 0.5;
    timing.min_segment_duration = 0.1;
    auto traj = fit_spline(scalar_waypoints({0.0, 1.0, 1.02}), timing);
    // |dq| = 1.0 -> 2.0 s; |dq| = 0.02 -> 0.04 s floored to 0.1 s
    REQUIRE(traj.knot_times.size() == 3);
    CHECK(traj.knot_times[1] == doctest::Approx(2.0));
    CHECK(traj.knot_times[2] == doctest::Approx(2.1));
}

TEST_CASE("sampling is exact at knots and rejects out-of-range times") {
    auto traj = fit_spline(scalar_waypoints({0.0, 2.0}), durations({1.5}));
    CHECK(sample(traj, 0.0).q(0) == doctest::Approx(0.0));
    CHECK(sample(traj, 1.5).q(0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(sample(traj, -0.01), OutOfRange);
    CHECK_THROWS_AS(sample(traj, 1.6), OutOfRange);
    CHECK_THROWS_AS(sample(JointTrajectory{}, 0.0), OutOfRange);
}

TEST_CASE("fit_spline input validation") {
    CHECK_THROWS_AS(fit_spline(scalar_waypoints({0.0}), durations({1.0})), std::invalid_argument);
    CHECK_THROWS_AS(fit_spline(scalar_waypoints({0.0, 1.0}), durations({1.0, 2.0})),
                    NonmonotonicTiming);
    CHECK_THROWS_AS(fit_spline(scalar_waypoints({0.0, 1.0}), durations({-1.0})),
                    NonmonotonicTiming);
    CHECK_THROWS_AS(fit_spline(scalar_waypoints({0.0, 1.0}), durations({0.0})),
                    NonmonotonicTiming);

    std::vector<Eigen::VectorXd> ragged{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)};
    CHECK_THROWS_AS(fit_spline(ragged, durations({1.0})), std::invalid_argument);

    SplineTiming bad_cap;
    bad_cap.max_joint_velocity = 0.0;
    CHECK_THROWS_AS(fit_spline(scalar_waypoints({0.0, 1.0}), bad_cap), std::invalid_argument);
}

TEST_CASE("validate flags limit violations and reports margins") {
    auto chain = default_chain();
    // 7-dof rest-to-rest move on joint 0 only
    Eigen::VectorXd a = Eigen::VectorXd::Zero(7), b = Eigen::VectorXd::Zero(7);
    b(0) = 1.0;
    auto traj = fit_spline({a, b}, durations({2.0}));
    auto report = validate(traj, chain);
    CHECK(report.ok);
    // peak velocity 15/(8*2) = 0.9375 < limit 1.71
    CHECK(report.worst_velocity_margin == doctest::Approx(1.71 - 0.9375).epsilon(1e-3));
    CHECK(report.worst_position_margin == doctest::Approx(2.967 - 1.0).epsilon(1e-6));

    // too fast: peak velocity 15/(8*0.4) = 4.6875 > 1.71
    auto fast = fit_spline({a, b}, durations({0.4}));
    auto bad = validate(fast, chain);
    CHECK_FALSE(bad.ok);
    REQUIRE_FALSE(bad.issues.empty());
    CHECK(bad.issues.front().kind == "velocity");
    CHECK(bad.issues.front().joint == 0);
    CHECK(bad.worst_velocity_margin < 0);

    CHECK_THROWS_AS(validate(fit_spline(scalar_waypoints({0, 1}), durations({1.0})), chain),
                    DimensionMismatch);
}

TEST_CASE("plan_path subdivides to the joint-space step bound") {
    auto chain = default_chain();
    Eigen::VectorXd start(7);
    start << 0, 0.5, 0, -1.2, 0, 0.8, 0;
    Eigen::VectorXd goal = start;
    goal(1) += 0.4;
    goal(3) -= 0.3;
    Pose6 target = forward_kinematics(chain, goal);

    PathParams params;
    auto path = plan_path(chain, start, target, {}, params);
    REQUIRE(path.size() >= 2);
    CHECK(path.front() == start);
    for (size_t i = 1; i < path.size(); ++i)
        CHECK((path[i] - path[i - 1]).lpNorm<Eigen::Infinity>() <= params.max_step + 1e-9);

    Pose6 reached = forward_kinematics(chain, path.back());
    CHECK((reached.position - target.position).norm() <= params.ik.pos_tol + 1e-9);
    CHECK(rotation_distance(reached.rotation, target.rotation) <= params.ik.rot_tol + 1e-9);
    for (const auto& q : path) CHECK(check_limits(chain, q).all_within);
}

TEST_CASE("plan_path with a satisfied target returns the single-element path") {
    auto chain = default_chain();
    Eigen::VectorXd start(7);
    start << 0, 0.5, 0, -1.2, 0, 0.8, 0;
    Pose6 target = forward_kinematics(chain, start);
    auto path = plan_path(chain, start, target);
    REQUIRE(path.size() == 1);
    CHECK(path[0] == start);
}

TEST_CASE("plan_path error taxonomy") {
    auto chain = default_chain();
    Eigen::VectorXd start = Eigen::VectorXd::Zero(7);

    Eigen::VectorXd outside = start;
    outside(0) = 10.0;
    Pose6 any = forward_kinematics(chain, start);
    CHECK_THROWS_AS(plan_path(chain, outside, any), LimitViolation);

    Pose6 unreachable;
    unreachable.position = Eigen::Vector3d(5, 0, 0);
    Eigen::VectorXd seed(7);
    seed << 0, 0.5, 0, -1.2, 0, 0.8, 0;
    try {
        plan_path(chain, seed, unreachable);
        FAIL("expected IkFailed");
    } catch (const IkFailed& e) {
        CHECK(e.waypoint == 1);
    }

    // failure at a via pose carries the via's index
    try {
        plan_path(chain, seed, forward_kinematics(chain, seed), {unreachable});
        FAIL("expected IkFailed");
    } catch (const IkFailed& e) {
        CHECK(e.waypoint == 1);
    }
}

TEST_CASE("plan_path then fit_spline yields a valid tracking reference") {
    auto chain = default_chain();
    Eigen::VectorXd start(7);
    start << 0, 0.5, 0, -1.2, 0, 0.8, 0;
    Eigen::VectorXd goal = start;
    goal(0) += 0.6;
    goal(2) -= 0.5;
    auto path = plan_path(chain, start, forward_kinematics(chain, goal));
    SplineTiming timing; // velocity-cap mode
    auto traj = fit_spline(path, timing);
    auto report = validate(traj, chain);
    CHECK(report.ok);
    CHECK((sample(traj, 0.0).q - start).norm() < 1e-12);
    CHECK((sample(traj, traj.duration()).q - path.back()).norm() < 1e-9);
}
