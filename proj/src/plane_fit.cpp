#include "hmr/plane_fit.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace hmr {
namespace {

struct Candidate {
    Eigen::Vector3d normal;
    double d = 0.0;
    int inliers = 0;
    double rms = 0.0;
};

void score(const std::vector<Eigen::Vector3d>& points, Candidate& c, double threshold) {
    c.inliers = 0;
    double sq = 0.0;
    for (const auto& p : points) {
        double r = c.normal.dot(p) + c.d;
        if (std::abs(r) <= threshold) {
            ++c.inliers;
            sq += r * r;
        }
    }
    c.rms = c.inliers ? std::sqrt(sq / c.inliers) : 0.0;
}

/// Least-squares plane through the given points (centroid + smallest covariance
/// eigenvector), normal oriented toward the origin.
PlaneModel refit(const std::vector<Eigen::Vector3d>& points,
                 const std::vector<const Eigen::Vector3d*>& inliers, double threshold) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto* p : inliers) centroid += *p;
    centroid /= double(inliers.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto* p : inliers) {
        Eigen::Vector3d q = *p - centroid;
        cov += q * q.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Vector3d n = eig.eigenvectors().col(0).normalized();
    if (n.dot(centroid) > 0) n = -n; // toward the sensor at the origin

    PlaneModel model;
    model.normal = n;
    model.d = -n.dot(centroid);

    // Final inlier set and RMS against the refit plane.
    int count = 0;
    double sq = 0.0;
    for (const auto& p : points) {
        double r = model.normal.dot(p) + model.d;
        if (std::abs(r) <= threshold) {
            ++count;
            sq += r * r;
        }
    }
    model.inlier_count = count;
    model.inlier_rms = count ? std::sqrt(sq / count) : 0.0;
    return model;
}

} // namespace

PlaneModel ransac_plane(const std::vector<Eigen::Vector3d>& points, const RansacParams& params) {
    if (points.size() < 3) throw DegenerateSample("need at least 3 points for a plane");

    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<size_t> pick(0, points.size() - 1);

    Candidate best;
    bool have_best = false;
    int degenerate_draws = 0;
    for (int iter = 0; iter < params.iterations; ++iter) {
        size_t i = pick(rng), j = pick(rng), k = pick(rng);
        if (i == j || j == k || i == k) {
            ++degenerate_draws;
            continue;
        }
        const Eigen::Vector3d &a = points[i], &b = points[j], &c = points[k];
        Eigen::Vector3d n = (b - a).cross(c - a);
        double scale = std::max({(b - a).norm(), (c - a).norm(), 1e-12});
        if (n.norm() < 1e-9 * scale * scale) { // collinear sample
            ++degenerate_draws;
            continue;
        }
        Candidate cand;
        cand.normal = n.normalized();
        cand.d = -cand.normal.dot(a);
        score(points, cand, params.inlier_threshold);
        if (!have_best || cand.inliers > best.inliers ||
            (cand.inliers == best.inliers && cand.rms < best.rms)) {
            best = cand;
            have_best = true;
        }
    }
    if (!have_best) throw DegenerateSample("every RANSAC sample was degenerate");

    int min_inliers = std::max(3, params.min_inliers);
    if (best.inliers < min_inliers)
        throw NoConsensus("best consensus " + std::to_string(best.inliers) + " < required " +
                          std::to_string(min_inliers));

    std::vector<const Eigen::Vector3d*> inliers;
    inliers.reserve(best.inliers);
    for (const auto& p : points)
        if (std::abs(best.normal.dot(p) + best.d) <= params.inlier_threshold)
            inliers.push_back(&p);
    return refit(points, inliers, params.inlier_threshold);
}

double normal_angle(const Eigen::Vector3d& n1, const Eigen::Vector3d& n2) {
    double l1 = n1.norm(), l2 = n2.norm();
    if (l1 < 1e-9 || l2 < 1e-9) throw ZeroVector("cannot take the angle of a zero vector");
    double c = n1.dot(n2) / (l1 * l2);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

Pose6 pose_from_contact(const Eigen::Vector3d& contact, const PlaneModel& plane, double standoff) {
    if (standoff < 0) throw std::invalid_argument("standoff must be >= 0");
    if (std::abs(plane.normal.norm() - 1.0) > 1e-6)
        throw DegeneratePlane("plane normal is not unit length");
    Eigen::Vector3d n = plane.normal.normalized();

    Eigen::Vector3d z_tool = -n;
    Eigen::Vector3d x_ref = Eigen::Vector3d::UnitX();
    if (std::abs(x_ref.dot(z_tool)) > 0.99) x_ref = Eigen::Vector3d::UnitY();
    Eigen::Vector3d x_tool = (x_ref - x_ref.dot(z_tool) * z_tool).normalized();
    Eigen::Vector3d y_tool = z_tool.cross(x_tool);

    Pose6 pose;
    pose.position = contact + standoff * n;
    pose.rotation.col(0) = x_tool;
    pose.rotation.col(1) = y_tool;
    pose.rotation.col(2) = z_tool;
    return pose;
}

} // namespace hmr
