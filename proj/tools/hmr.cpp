// hmr: command-line front end for the embodied-massage pipeline.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 per-sample failures
// in batch mode (the report is still written).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hmr/augment.hpp"
#include "hmr/benchmark.hpp"
#include "hmr/grounding_client.hpp"
#include "hmr/grounding_protocol.hpp"
#include "hmr/image.hpp"
#include "hmr/kinematics.hpp"
#include "hmr/manifest.hpp"
#include "hmr/pipeline.hpp"
#include "hmr/plane_fit.hpp"
#include "hmr/registry.hpp"
#include "hmr/sim.hpp"
#include "hmr/synth_scene.hpp"
#include "hmr/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json pose_to_json(const hmr::Pose6& pose) {
    Eigen::Vector3d euler = pose.euler_zyx();
    json rot = json::array();
    for (int r = 0; r < 3; ++r)
        rot.push_back({pose.rotation(r, 0), pose.rotation(r, 1), pose.rotation(r, 2)});
    return {{"position_m", {pose.position.x(), pose.position.y(), pose.position.z()}},
            {"euler_zyx_rad", {euler(0), euler(1), euler(2)}},
            {"rotation", rot}};
}

hmr::Pose6 pose_from_json(const json& j) {
    hmr::Pose6 pose;
    for (int i = 0; i < 3; ++i) pose.position(i) = j.at("position_m")[i].get<double>();
    if (j.contains("rotation")) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) pose.rotation(r, c) = j["rotation"][r][c].get<double>();
    } else if (j.contains("euler_zyx_rad")) {
        const auto& e = j["euler_zyx_rad"];
        pose.rotation = hmr::rotation_from_euler_zyx(e[0].get<double>(), e[1].get<double>(),
                                                     e[2].get<double>());
    }
    return pose;
}

json camera_to_json(const hmr::CameraModel& cam) {
    json rot = json::array();
    for (int r = 0; r < 3; ++r)
        rot.push_back({cam.extrinsic_rotation(r, 0), cam.extrinsic_rotation(r, 1),
                       cam.extrinsic_rotation(r, 2)});
    return {{"fx", cam.fx},         {"fy", cam.fy},
            {"cx", cam.cx},         {"cy", cam.cy},
            {"width", cam.width},   {"height", cam.height},
            {"extrinsic_rotation", rot},
            {"extrinsic_translation",
             {cam.extrinsic_translation.x(), cam.extrinsic_translation.y(),
              cam.extrinsic_translation.z()}}};
}

hmr::CameraModel camera_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open camera file: " + path);
    json j;
    in >> j;
    hmr::CameraModel cam;
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

/// Workbench camera used by `hmr synth`: mounted 1.4 m above the desk in
/// front of the robot base, looking straight down. The work surface then sits
/// just above the shoulder plane; together with the press standoff this keeps
/// the wrist center outside the elbow's inner-reach sphere (two 0.4 m links
/// with a +/-2.094 rad elbow cannot fold the wrist closer than 0.4 m) while
/// the downward approach axis stays aligned with the reaching arm.
hmr::CameraModel default_synth_camera() {
    hmr::CameraModel cam;
    cam.fx = cam.fy = 500.0;
    cam.cx = 320.0;
    cam.cy = 240.0;
    cam.width = 640;
    cam.height = 480;
    cam.extrinsic_rotation << 0, 1, 0,
                              1, 0, 0,
                              0, 0, -1;
    cam.extrinsic_translation << 0.35, 0.0, 1.4;
    return cam;
}

json score_report_json(const hmr::ScoreReport& report) {
    json rates;
    for (const auto& [t, rate] : report.success_rate) {
        char key[16];
        std::snprintf(key, sizeof(key), "%.2f", t);
        rates[key] = rate;
    }
    json by_light;
    for (const auto& [light, m] : report.by_lighting) {
        json lr;
        for (const auto& [t, rate] : m) {
            char key[16];
            std::snprintf(key, sizeof(key), "%.2f", t);
            lr[key] = rate;
        }
        by_light[light] = lr;
    }
    return {{"label", report.label},
            {"success_rate", rates},
            {"matched", report.matched},
            {"total", report.total},
            {"spurious", report.spurious},
            {"by_lighting", by_light}};
}

std::vector<double> parse_thresholds(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hmr: hierarchical embodied-massage pipeline tools"};
    app.require_subcommand(1);

    // ---- score ----
    auto* score = app.add_subcommand("score", "Score grounding predictions against a manifest");
    std::string score_manifest, score_pred, score_registry, score_out,
        score_thresholds = "0.3,0.5,0.75";
    score->add_option("--manifest", score_manifest)->required();
    score->add_option("--pred", score_pred)->required();
    score->add_option("--registry", score_registry);
    score->add_option("--thresholds", score_thresholds);
    score->add_option("--out", score_out);

    // ---- parse ----
    auto* parse = app.add_subcommand("parse", "Parse a grounding token stream from stdin or --text");
    std::string parse_text, parse_registry;
    parse->add_option("--text", parse_text);
    parse->add_option("--registry", parse_registry);

    // ---- augment ----
    auto* augment = app.add_subcommand("augment", "Apply a geometric augmentation to a manifest");
    std::string aug_manifest, aug_image_dir, aug_out, aug_crop;
    double aug_rotate = std::numeric_limits<double>::quiet_NaN();
    augment->add_option("--manifest", aug_manifest)->required();
    augment->add_option("--image-dir", aug_image_dir);
    augment->add_option("--rotate", aug_rotate, "rotation angle, degrees");
    augment->add_option("--crop", aug_crop, "x1,y1,x2,y2");
    augment->add_option("--out", aug_out)->required();

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate synthetic RGB-D scenes with ground truth");
    std::string synth_tilt = "0,0", synth_out, synth_chain = "data/chain_default.json";
    double synth_distance = 1.0, synth_noise = 0.0, synth_outliers = 0.0;
    uint64_t synth_seed = 0;
    int synth_count = 1;
    synth->add_option("--tilt-deg", synth_tilt, "tilt_x,tilt_y degrees (range start when --count > 1)");
    synth->add_option("--distance", synth_distance);
    synth->add_option("--noise-mm", synth_noise);
    synth->add_option("--outliers", synth_outliers);
    synth->add_option("--seed", synth_seed);
    synth->add_option("--count", synth_count);
    synth->add_option("--chain", synth_chain);
    synth->add_option("--out", synth_out)->required();

    // ---- pose ----
    auto* pose_cmd = app.add_subcommand("pose", "Contact pose from a depth map and pixel");
    std::string pose_depth, pose_camera;
    double pose_u = 0, pose_v = 0, pose_standoff = 0.0;
    int pose_radius = 15;
    uint64_t pose_seed = 0;
    pose_cmd->add_option("--depth", pose_depth)->required();
    pose_cmd->add_option("--camera", pose_camera)->required();
    pose_cmd->add_option("--u", pose_u)->required();
    pose_cmd->add_option("--v", pose_v)->required();
    pose_cmd->add_option("--radius", pose_radius);
    pose_cmd->add_option("--standoff", pose_standoff);
    pose_cmd->add_option("--seed", pose_seed);

    // ---- plan ----
    auto* plan = app.add_subcommand("plan", "IK path + quintic trajectory to a target pose");
    std::string plan_chain, plan_pose, plan_out;
    double plan_vel_cap = 0.5;
    plan->add_option("--chain", plan_chain)->required();
    plan->add_option("--pose", plan_pose, "JSON pose file")->required();
    plan->add_option("--vel-cap", plan_vel_cap);
    plan->add_option("--out", plan_out, "trajectory CSV output");

    // ---- simulate ----
    auto* simulate = app.add_subcommand("simulate", "Plan and track a target pose in simulation");
    std::string sim_chain, sim_pose, sim_out, sim_log;
    double sim_kp = 100.0, sim_kd = 20.0, sim_dt = 1e-3;
    simulate->add_option("--chain", sim_chain)->required();
    simulate->add_option("--pose", sim_pose)->required();
    simulate->add_option("--kp", sim_kp);
    simulate->add_option("--kd", sim_kd);
    simulate->add_option("--dt", sim_dt);
    simulate->add_option("--out", sim_out);
    simulate->add_option("--log", sim_log, "per-step CSV log");

    // ---- e2e ----
    auto* e2e = app.add_subcommand("e2e", "Full pipeline over a manifest");
    std::string e2e_config, e2e_replay, e2e_out;
    std::vector<std::string> e2e_sets;
    e2e->add_option("--config", e2e_config)->required();
    e2e->add_option("--replay", e2e_replay, "override replay directory");
    e2e->add_option("--out", e2e_out, "JSONL report path");
    e2e->add_option("--set", e2e_sets, "config override key=value");

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "Render score JSON files as a table");
    std::vector<std::string> report_files;
    report_cmd->add_option("files", report_files)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*score) {
            auto registry = score_registry.empty() ? hmr::AcupointRegistry::make_default()
                                                   : hmr::AcupointRegistry::load(score_registry);
            auto manifest = hmr::load_manifest(score_manifest);
            auto predictions = hmr::load_predictions(
                score_pred, [&](const std::string& n) { return registry.resolve(n); });
            auto report =
                hmr::evaluate(predictions, manifest, parse_thresholds(score_thresholds));
            report.label = fs::path(score_pred).stem().string();
            std::cout << hmr::render_report(report);
            if (!score_out.empty()) {
                std::ofstream out(score_out);
                out << score_report_json(report).dump(2) << "\n";
            }
        } else if (*parse) {
            auto registry = parse_registry.empty() ? hmr::AcupointRegistry::make_default()
                                                   : hmr::AcupointRegistry::load(parse_registry);
            std::string text = parse_text;
            if (text.empty()) {
                std::ostringstream ss;
                ss << std::cin.rdbuf();
                text = ss.str();
            }
            auto records = hmr::parse_grounding_output(
                text, [&](const std::string& n) { return registry.resolve(n); });
            json out = json::array();
            for (const auto& r : records)
                out.push_back({{"acupoint_id", r.acupoint_id},
                               {"name", r.name},
                               {"box_norm", {r.box.x1, r.box.y1, r.box.x2, r.box.y2}}});
            std::cout << out.dump(2) << "\n";
        } else if (*augment) {
            hmr::AugmentOp op;
            if (!std::isnan(aug_rotate)) {
                op = hmr::RotateOp{aug_rotate};
            } else if (!aug_crop.empty()) {
                auto v = parse_thresholds(aug_crop);
                if (v.size() != 4) throw CLI::ValidationError("--crop expects x1,y1,x2,y2");
                op = hmr::CropOp{v[0], v[1], v[2], v[3]};
            } else {
                throw CLI::ValidationError("augment needs --rotate or --crop");
            }
            auto manifest = hmr::load_manifest(aug_manifest);
            fs::create_directories(aug_out);
            std::vector<hmr::ManifestSample> out_samples;
            for (const auto& sample : manifest) {
                hmr::ImageRgb image(sample.width, sample.height);
                fs::path src = fs::path(aug_image_dir.empty() ? fs::path(aug_manifest).parent_path()
                                                              : fs::path(aug_image_dir)) /
                               sample.image_ref;
                if (fs::exists(src) && src.extension() == ".ppm") image = hmr::read_rgb_ppm(src.string());
                auto result = hmr::augment_sample(sample, image, op);
                std::string name = fs::path(sample.image_ref).stem().string() + "_aug.ppm";
                hmr::write_rgb_ppm(result.image, (fs::path(aug_out) / name).string());
                result.sample.image_ref = name;
                out_samples.push_back(std::move(result.sample));
            }
            hmr::save_manifest(out_samples, (fs::path(aug_out) / "manifest.jsonl").string());
        } else if (*synth) {
            auto tilt = parse_thresholds(synth_tilt);
            if (tilt.size() != 2) throw CLI::ValidationError("--tilt-deg expects A,B");
            fs::create_directories(fs::path(synth_out) / "replay");
            hmr::CameraModel camera = default_synth_camera();

            std::vector<hmr::ManifestSample> manifest;
            json truths = json::array();
            for (int i = 0; i < synth_count; ++i) {
                hmr::SceneSpec spec;
                if (synth_count > 1) {
                    // Spread tilt_x across [A, B]; vary tilt_y deterministically.
                    spec.tilt_x_deg = tilt[0] + (tilt[1] - tilt[0]) * i / double(synth_count - 1);
                    spec.tilt_y_deg = double((i * 7) % 11) - 5.0;
                } else {
                    spec.tilt_x_deg = tilt[0];
                    spec.tilt_y_deg = tilt[1];
                }
                spec.distance_m = synth_distance;
                spec.noise_sigma_mm = synth_noise;
                spec.outlier_fraction = synth_outliers;
                spec.contact_u = camera.cx + double((i * 13) % 41) - 20.0;
                spec.contact_v = camera.cy + double((i * 17) % 31) - 15.0;
                spec.seed = synth_seed + uint64_t(i);
                hmr::SyntheticScene scene = hmr::synth_scene(spec, camera);

                char stem[32];
                std::snprintf(stem, sizeof(stem), "scene_%03d", i);
                hmr::write_depth_pgm(scene.depth, (fs::path(synth_out) / (std::string(stem) + ".pgm")).string());
                hmr::write_rgb_ppm(scene.rgb, (fs::path(synth_out) / (std::string(stem) + ".ppm")).string());

                // Ground-truth box: a 24 px square centered on the contact pixel,
                // and the exact replay recording for it.
                double half = 12.0;
                hmr::PixelBox gt{spec.contact_u - half, spec.contact_v - half,
                                 spec.contact_u + half, spec.contact_v + half};
                hmr::ManifestSample sample;
                sample.image_ref = std::string(stem) + ".ppm";
                sample.width = camera.width;
                sample.height = camera.height;
                sample.depth_ref = std::string(stem) + ".pgm";
                sample.lighting = hmr::Lighting::Natural;
                sample.background = "synthetic";
                sample.annotations.push_back({36, "Zusanli", gt});
                manifest.push_back(sample);

                hmr::GroundingRecord rec;
                rec.acupoint_id = 36;
                rec.name = "Zusanli";
                rec.box = hmr::normalize_box(gt, camera.width, camera.height);
                std::ofstream replay(fs::path(synth_out) / "replay" / (std::string(stem) + ".txt"));
                replay << hmr::serialize_grounding_output({rec});

                Eigen::Vector3d contact_base = hmr::camera_to_base(scene.contact_point_cam, camera);
                Eigen::Vector3d normal_base = camera.extrinsic_rotation * scene.plane_normal_cam;
                truths.push_back(
                    {{"image", sample.image_ref},
                     {"contact_px", {spec.contact_u, spec.contact_v}},
                     {"contact_cam_m",
                      {scene.contact_point_cam.x(), scene.contact_point_cam.y(),
                       scene.contact_point_cam.z()}},
                     {"contact_base_m", {contact_base.x(), contact_base.y(), contact_base.z()}},
                     {"plane_normal_cam",
                      {scene.plane_normal_cam.x(), scene.plane_normal_cam.y(),
                       scene.plane_normal_cam.z()}},
                     {"plane_normal_base", {normal_base.x(), normal_base.y(), normal_base.z()}},
                     {"tilt_deg", {spec.tilt_x_deg, spec.tilt_y_deg}}});
            }
            hmr::save_manifest(manifest, (fs::path(synth_out) / "manifest.jsonl").string());
            std::ofstream(fs::path(synth_out) / "truths.json") << truths.dump(2) << "\n";
            std::ofstream(fs::path(synth_out) / "camera.json") << camera_to_json(camera).dump(2) << "\n";

            json config{{"manifest", (fs::path(synth_out) / "manifest.jsonl").string()},
                        {"chain", synth_chain},
                        {"replay_dir", (fs::path(synth_out) / "replay").string()},
                        {"scene_dir", synth_out},
                        {"camera", camera_to_json(camera)},
                        {"ransac",
                         {{"iterations", 500}, {"threshold_m", 0.006}, {"min_inliers", 20},
                          {"seed", synth_seed}}},
                        {"patch_radius_px", 25},
                        {"standoff_m", 0.05},
                        {"start_q", {0.0, 0.5, 0.0, -1.2, 0.0, 0.8, 0.0}},
                        {"iou_threshold", 0.5}};
            std::ofstream(fs::path(synth_out) / "config.json") << config.dump(2) << "\n";
        } else if (*pose_cmd) {
            hmr::CameraModel camera = camera_from_json_file(pose_camera);
            hmr::DepthMap depth = hmr::read_depth_pgm(pose_depth);
            auto patch = hmr::extract_patch(depth, pose_u, pose_v, pose_radius, camera);
            hmr::RansacParams params;
            params.seed = pose_seed;
            hmr::PlaneModel plane_cam = hmr::ransac_plane(patch.points, params);
            int ui = int(std::lround(pose_u)), vi = int(std::lround(pose_v));
            Eigen::Vector3d contact_cam =
                hmr::deproject(pose_u, pose_v, depth.meters(ui, vi), camera);
            double off = plane_cam.normal.dot(contact_cam) + plane_cam.d;
            contact_cam -= off * plane_cam.normal;
            Eigen::Vector3d contact_base = hmr::camera_to_base(contact_cam, camera);
            hmr::PlaneModel plane_base = plane_cam;
            plane_base.normal = camera.extrinsic_rotation * plane_cam.normal;
            plane_base.d = -plane_base.normal.dot(contact_base);
            hmr::Pose6 pose = hmr::pose_from_contact(contact_base, plane_base, pose_standoff);
            json out = pose_to_json(pose);
            out["plane"] = {{"normal_base",
                             {plane_base.normal.x(), plane_base.normal.y(), plane_base.normal.z()}},
                            {"inlier_count", plane_cam.inlier_count},
                            {"inlier_rms_m", plane_cam.inlier_rms}};
            std::cout << out.dump(2) << "\n";
        } else if (*plan || *simulate) {
            bool simulating = static_cast<bool>(*simulate);
            std::string chain_path = simulating ? sim_chain : plan_chain;
            std::string pose_path = simulating ? sim_pose : plan_pose;
            hmr::KinematicChain chain = hmr::KinematicChain::load(chain_path);
            json pj;
            std::ifstream(pose_path) >> pj;
            hmr::Pose6 target = pose_from_json(pj);

            Eigen::VectorXd start_q = chain.midrange();
            auto waypoints = hmr::plan_path(chain, start_q, target);
            if (waypoints.size() < 2) waypoints.push_back(waypoints.front());
            hmr::SplineTiming timing;
            if (!simulating) timing.max_joint_velocity = plan_vel_cap;
            hmr::JointTrajectory traj = hmr::fit_spline(waypoints, timing);
            auto validation = hmr::validate(traj, chain);

            if (!simulating) {
                std::cout << "waypoints: " << waypoints.size()
                          << ", duration: " << traj.duration()
                          << " s, valid: " << (validation.ok ? "yes" : "no") << "\n";
                if (!plan_out.empty()) {
                    std::ofstream csv(plan_out);
                    csv << "t";
                    for (size_t j = 0; j < traj.dof; ++j) csv << ",q" << j;
                    for (size_t j = 0; j < traj.dof; ++j) csv << ",qd" << j;
                    for (size_t j = 0; j < traj.dof; ++j) csv << ",qdd" << j;
                    csv << "\n";
                    double rate = 100.0;
                    for (double t = 0.0; t <= traj.duration() + 1e-12; t += 1.0 / rate) {
                        auto s = hmr::sample(traj, std::min(t, traj.duration()));
                        csv << t;
                        for (Eigen::Index j = 0; j < s.q.size(); ++j) csv << "," << s.q(j);
                        for (Eigen::Index j = 0; j < s.qd.size(); ++j) csv << "," << s.qd(j);
                        for (Eigen::Index j = 0; j < s.qdd.size(); ++j) csv << "," << s.qdd(j);
                        csv << "\n";
                    }
                }
                return validation.ok ? 0 : 3;
            }

            hmr::ControllerGains gains = hmr::ControllerGains::uniform(chain.dof(), sim_kp, sim_kd);
            hmr::RunOptions options;
            options.dt = sim_dt;
            options.step_log_csv = sim_log;
            auto exec = hmr::run_tracking(traj, chain, gains, target, options);
            std::string report = hmr::report_to_json(exec);
            std::cout << report << "\n";
            if (!sim_out.empty()) std::ofstream(sim_out) << report << "\n";
            return exec.goal_reached ? 0 : 3;
        } else if (*e2e) {
            std::vector<std::string> overrides = e2e_sets;
            if (!e2e_replay.empty()) overrides.push_back("replay_dir=" + e2e_replay);
            hmr::PipelineConfig config = hmr::PipelineConfig::load(e2e_config, overrides);
            auto results = hmr::run_e2e(config);
            std::ofstream out;
            if (!e2e_out.empty()) out.open(e2e_out);
            size_t failures = 0;
            for (const auto& r : results) {
                std::string line = r.to_json();
                if (out.is_open()) out << line << "\n";
                std::cout << line << "\n";
                if (!r.ok) ++failures;
            }
            std::cerr << results.size() - failures << "/" << results.size() << " samples succeeded\n";
            return failures ? 3 : 0;
        } else if (*report_cmd) {
            std::vector<hmr::ScoreReport> reports;
            for (const auto& file : report_files) {
                std::ifstream in(file);
                if (!in) throw std::runtime_error("cannot open " + file);
                json j;
                in >> j;
                hmr::ScoreReport r;
                r.label = j.value("label", fs::path(file).stem().string());
                for (const auto& [key, rate] : j.at("success_rate").items())
                    r.success_rate[std::stod(key)] = rate.get<double>();
                reports.push_back(std::move(r));
            }
            std::cout << hmr::render_report(reports);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
