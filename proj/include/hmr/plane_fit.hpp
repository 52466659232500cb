#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "hmr/geometry.hpp"

namespace hmr {

struct NoConsensus : std::runtime_error {
    explicit NoConsensus(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateSample : std::runtime_error {
    explicit DegenerateSample(const std::string& what) : std::runtime_error(what) {}
};
struct ZeroVector : std::runtime_error {
    explicit ZeroVector(const std::string& what) : std::runtime_error(what) {}
};
struct DegeneratePlane : std::runtime_error {
    explicit DegeneratePlane(const std::string& what) : std::runtime_error(what) {}
};

/// Plane n . p + d = 0 with unit normal oriented toward the sensor origin.
struct PlaneModel {
    Eigen::Vector3d normal{0, 0, -1};
    double d = 0.0;
    int inlier_count = 0;
    double inlier_rms = 0.0;

    double distance(const Eigen::Vector3d& p) const { return std::abs(normal.dot(p) + d); }
};

struct RansacParams {
    int iterations = 500;
    double inlier_threshold = 6e-3; // m
    int min_inliers = 20;
    uint64_t seed = 0;
};

/// RANSAC plane fit: best model by inlier count (ties -> lower RMS), refit to
/// all inliers by least squares, normal flipped toward the origin. Deterministic
/// given the seed. Throws NoConsensus / DegenerateSample.
PlaneModel ransac_plane(const std::vector<Eigen::Vector3d>& points, const RansacParams& params);

/// Angle between two directions via the dot product, radians in [0, pi].
/// Inputs are renormalized; throws ZeroVector on (near-)zero input.
double normal_angle(const Eigen::Vector3d& n1, const Eigen::Vector3d& n2);

/// Vertical-tapping contact pose: tool +z anti-parallel to the outward surface
/// normal, position = contact + standoff * normal. Tool x resolved by
/// projecting world x onto the tool plane, falling back to world y when nearly
/// parallel to the approach axis.
Pose6 pose_from_contact(const Eigen::Vector3d& contact, const PlaneModel& plane, double standoff);

} // namespace hmr
