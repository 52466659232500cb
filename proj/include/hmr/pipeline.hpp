#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmr/benchmark.hpp"
#include "hmr/camera.hpp"
#include "hmr/kinematics.hpp"
#include "hmr/plane_fit.hpp"
#include "hmr/registry.hpp"
#include "hmr/sim.hpp"
#include "hmr/trajectory.hpp"

namespace hmr {

/// Everything the end-to-end run needs; loadable from a JSON config file with
/// dotted --set key=value overrides.
struct PipelineConfig {
    std::string manifest_path;
    std::string registry_path;  // empty -> default 60-point registry
    std::string chain_path;
    std::string replay_dir;     // empty -> live endpoint from env
    std::string scene_dir;      // base for relative image/depth refs

    CameraModel camera;
    RansacParams ransac;
    int patch_radius_px = 25;
    // Pressing from a small standoff keeps the wrist center clear of the
    // elbow's inner-reach sphere when the tool points straight down.
    double standoff_m = 0.05;
    IkParams ik;
    PathParams path;
    SplineTiming timing;
    double controller_kp = 100.0;
    double controller_kd = 20.0;
    double dt = 1e-3;
    double goal_tolerance_m = 2e-3;
    double iou_threshold = 0.5;
    std::vector<double> start_q; // empty -> chain midrange

    static PipelineConfig load(const std::string& path,
                               const std::vector<std::string>& overrides = {});
};

struct SampleResult {
    std::string image_ref;
    bool ok = false;
    std::string error; // non-empty when a stage failed

    // Intermediate artifacts (valid up to the failing stage).
    double grounding_iou = -1.0;
    NormalizedBox predicted_box;
    double contact_u = 0.0, contact_v = 0.0;
    Eigen::Vector3d contact_cam{0, 0, 0};
    Eigen::Vector3d contact_base{0, 0, 0};
    Eigen::Vector3d plane_normal_base{0, 0, 0};
    double plane_inlier_rms = 0.0;
    int plane_inlier_count = 0;
    Pose6 contact_pose;
    size_t path_waypoints = 0;
    double trajectory_duration = 0.0;
    bool trajectory_valid = false;
    bool goal_reached = false;
    double final_pos_err_m = 0.0;

    std::string to_json() const;
};

/// Runs grounding -> perception -> planning -> simulation for each selected
/// sample. Per-sample failures are recorded in the result, never aborting the
/// batch; results keep manifest order.
std::vector<SampleResult> run_e2e(const PipelineConfig& config,
                                  const std::vector<std::string>& selected_images = {});

} // namespace hmr
