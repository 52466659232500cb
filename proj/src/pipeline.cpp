#include "hmr/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "hmr/grounding_client.hpp"
#include "hmr/grounding_protocol.hpp"
#include "hmr/manifest.hpp"

namespace hmr {

using nlohmann::json;

namespace {

json* navigate(json& root, const std::string& dotted_key) {
    json* node = &root;
    size_t start = 0;
    while (true) {
        size_t dot = dotted_key.find('.', start);
        std::string key = dotted_key.substr(start, dot - start);
        node = &(*node)[key];
        if (dot == std::string::npos) return node;
        start = dot + 1;
    }
}

void apply_override(json& root, const std::string& kv) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("--set expects key=value, got: " + kv);
    std::string key = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value; // treat as a plain string
    }
    *navigate(root, key) = parsed;
}

CameraModel camera_from_json(const json& j) {
    CameraModel cam;
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    if (j.contains("extrinsic_rotation"))
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                cam.extrinsic_rotation(r, c) = j["extrinsic_rotation"][r][c].get<double>();
    if (j.contains("extrinsic_translation"))
        for (int r = 0; r < 3; ++r)
            cam.extrinsic_translation(r) = j["extrinsic_translation"][r].get<double>();
    cam.validate();
    return cam;
}

} // namespace

PipelineConfig PipelineConfig::load(const std::string& path,
                                    const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    in >> j;
    for (const auto& kv : overrides) apply_override(j, kv);

    PipelineConfig cfg;
    cfg.manifest_path = j.at("manifest").get<std::string>();
    cfg.registry_path = j.value("registry", "");
    cfg.chain_path = j.at("chain").get<std::string>();
    cfg.replay_dir = j.value("replay_dir", "");
    cfg.scene_dir = j.value("scene_dir", "");
    cfg.camera = camera_from_json(j.at("camera"));

    if (j.contains("ransac")) {
        const auto& r = j["ransac"];
        cfg.ransac.iterations = r.value("iterations", cfg.ransac.iterations);
        cfg.ransac.inlier_threshold = r.value("threshold_m", cfg.ransac.inlier_threshold);
        cfg.ransac.min_inliers = r.value("min_inliers", cfg.ransac.min_inliers);
        cfg.ransac.seed = r.value("seed", cfg.ransac.seed);
    }
    cfg.patch_radius_px = j.value("patch_radius_px", cfg.patch_radius_px);
    cfg.standoff_m = j.value("standoff_m", cfg.standoff_m);
    if (j.contains("ik")) {
        const auto& ik = j["ik"];
        cfg.ik.damping = ik.value("damping", cfg.ik.damping);
        cfg.ik.max_iters = ik.value("max_iters", cfg.ik.max_iters);
        cfg.ik.pos_tol = ik.value("pos_tol", cfg.ik.pos_tol);
        cfg.ik.rot_tol = ik.value("rot_tol", cfg.ik.rot_tol);
        cfg.ik.nullspace_bias = ik.value("nullspace_bias", cfg.ik.nullspace_bias);
    }
    cfg.path.ik = cfg.ik;
    if (j.contains("trajectory")) {
        const auto& t = j["trajectory"];
        cfg.path.max_step = t.value("max_step", cfg.path.max_step);
        cfg.timing.max_joint_velocity = t.value("max_joint_velocity", cfg.timing.max_joint_velocity);
        cfg.timing.min_segment_duration =
            t.value("min_segment_duration", cfg.timing.min_segment_duration);
    }
    if (j.contains("controller")) {
        const auto& c = j["controller"];
        cfg.controller_kp = c.value("kp", cfg.controller_kp);
        cfg.controller_kd = c.value("kd", cfg.controller_kd);
        cfg.dt = c.value("dt", cfg.dt);
        cfg.goal_tolerance_m = c.value("goal_tolerance_m", cfg.goal_tolerance_m);
    }
    cfg.iou_threshold = j.value("iou_threshold", cfg.iou_threshold);
    if (j.contains("start_q")) cfg.start_q = j["start_q"].get<std::vector<double>>();
    return cfg;
}

std::string SampleResult::to_json() const {
    json j;
    j["image"] = image_ref;
    j["ok"] = ok;
    if (!error.empty()) j["error"] = error;
    j["grounding_iou"] = grounding_iou;
    j["predicted_box"] = {predicted_box.x1, predicted_box.y1, predicted_box.x2, predicted_box.y2};
    j["contact_px"] = {contact_u, contact_v};
    j["contact_cam_m"] = {contact_cam.x(), contact_cam.y(), contact_cam.z()};
    j["contact_base_m"] = {contact_base.x(), contact_base.y(), contact_base.z()};
    j["plane_normal_base"] = {plane_normal_base.x(), plane_normal_base.y(),
                              plane_normal_base.z()};
    j["plane_inlier_rms_m"] = plane_inlier_rms;
    j["plane_inlier_count"] = plane_inlier_count;
    Eigen::Vector3d euler = contact_pose.euler_zyx();
    j["pose"] = {{"position_m",
                  {contact_pose.position.x(), contact_pose.position.y(), contact_pose.position.z()}},
                 {"euler_zyx_rad", {euler(0), euler(1), euler(2)}}};
    json rot = json::array();
    for (int r = 0; r < 3; ++r)
        rot.push_back({contact_pose.rotation(r, 0), contact_pose.rotation(r, 1),
                       contact_pose.rotation(r, 2)});
    j["pose"]["rotation"] = rot;
    j["path_waypoints"] = path_waypoints;
    j["trajectory_duration_s"] = trajectory_duration;
    j["trajectory_valid"] = trajectory_valid;
    j["goal_reached"] = goal_reached;
    j["final_pos_err_m"] = final_pos_err_m;
    return j.dump();
}

std::vector<SampleResult> run_e2e(const PipelineConfig& config,
                                  const std::vector<std::string>& selected_images) {
    AcupointRegistry registry = config.registry_path.empty()
                                    ? AcupointRegistry::make_default()
                                    : AcupointRegistry::load(config.registry_path);
    KinematicChain chain = KinematicChain::load(config.chain_path);
    std::vector<ManifestSample> manifest = load_manifest(config.manifest_path);

    Eigen::VectorXd start_q;
    if (config.start_q.empty()) {
        start_q = chain.midrange();
    } else {
        start_q = Eigen::Map<const Eigen::VectorXd>(config.start_q.data(),
                                                    static_cast<Eigen::Index>(config.start_q.size()));
    }

    EndpointConfig endpoint = EndpointConfig::from_env();
    auto resolver = [&registry](const std::string& name) { return registry.resolve(name); };
    std::filesystem::path scene_dir(config.scene_dir);

    std::vector<SampleResult> results;
    for (const auto& sample : manifest) {
        if (!selected_images.empty() &&
            std::find(selected_images.begin(), selected_images.end(), sample.image_ref) ==
                selected_images.end())
            continue;

        SampleResult result;
        result.image_ref = sample.image_ref;
        try {
            if (sample.annotations.empty())
                throw std::runtime_error("sample has no annotations to query");
            const Annotation& query = sample.annotations.front();

            // High-level grounding.
            GroundingRequest request;
            request.image_ref = sample.image_ref;
            request.instruction =
                "Locate the " + query.name + " acupoint and apply moderate pressure";
            GroundingResponse response;
            if (!config.replay_dir.empty()) {
                response = ground_replay(request, config.replay_dir);
            } else {
                std::ifstream img((scene_dir / sample.image_ref), std::ios::binary);
                request.image_bytes.assign(std::istreambuf_iterator<char>(img), {});
                response = ground_live(request, endpoint);
            }
            auto records = parse_grounding_output(response.raw_text, resolver);
            if (records.empty()) throw std::runtime_error("grounding output has no boxes");
            const GroundingRecord* rec = &records.front();
            for (const auto& r : records)
                if (r.acupoint_id == query.acupoint_id) { rec = &r; break; }
            result.predicted_box = rec->box;
            result.grounding_iou =
                iou(rec->box, normalize_box(query.box_px, sample.width, sample.height));

            // Contact pixel and deprojection.
            auto [cu, cv] = box_center(rec->box, sample.width, sample.height);
            result.contact_u = cu;
            result.contact_v = cv;
            if (!sample.depth_ref) throw std::runtime_error("sample has no depth map");
            DepthMap depth = read_depth_pgm((scene_dir / *sample.depth_ref).string());
            int ui = static_cast<int>(std::lround(cu)), vi = static_cast<int>(std::lround(cv));
            if (ui < 0 || ui >= depth.width || vi < 0 || vi >= depth.height)
                throw std::runtime_error("contact pixel outside depth map");
            double z = depth.meters(ui, vi);
            result.contact_cam = deproject(cu, cv, z, config.camera);

            // Local plane and contact pose in the base frame.
            PatchResult patch =
                extract_patch(depth, cu, cv, config.patch_radius_px, config.camera);
            PlaneModel plane_cam = ransac_plane(patch.points, config.ransac);
            result.plane_inlier_rms = plane_cam.inlier_rms;
            result.plane_inlier_count = plane_cam.inlier_count;

            // Snap the contact point onto the fitted plane before transforming:
            // the raw center depth carries sensor noise.
            Eigen::Vector3d contact_cam = result.contact_cam;
            double off = plane_cam.normal.dot(contact_cam) + plane_cam.d;
            contact_cam -= off * plane_cam.normal;

            result.contact_base = camera_to_base(contact_cam, config.camera);
            PlaneModel plane_base;
            plane_base.normal = config.camera.extrinsic_rotation * plane_cam.normal;
            plane_base.d = -plane_base.normal.dot(result.contact_base);
            plane_base.inlier_count = plane_cam.inlier_count;
            plane_base.inlier_rms = plane_cam.inlier_rms;
            result.plane_normal_base = plane_base.normal;

            result.contact_pose =
                pose_from_contact(result.contact_base, plane_base, config.standoff_m);

            // Plan, time-parameterize, validate, execute.
            auto waypoints = plan_path(chain, start_q, result.contact_pose, {}, config.path);
            result.path_waypoints = waypoints.size();
            if (waypoints.size() < 2) waypoints.push_back(waypoints.front());
            JointTrajectory traj = fit_spline(waypoints, config.timing);
            result.trajectory_duration = traj.duration();
            ValidationReport validation = validate(traj, chain);
            result.trajectory_valid = validation.ok;

            ControllerGains gains =
                ControllerGains::uniform(chain.dof(), config.controller_kp, config.controller_kd);
            RunOptions options;
            options.dt = config.dt;
            options.goal_tolerance_m = config.goal_tolerance_m;
            ExecutionReport exec = run_tracking(traj, chain, gains, result.contact_pose, options);
            result.goal_reached = exec.goal_reached;
            result.final_pos_err_m = exec.final_pos_err_m;

            result.ok = result.grounding_iou >= config.iou_threshold && validation.ok &&
                        exec.goal_reached;
        } catch (const std::exception& e) {
            result.error = e.what();
            result.ok = false;
        }
        results.push_back(std::move(result));
    }
    return results;
}

} // namespace hmr
