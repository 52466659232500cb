#include "hmr/synth_scene.hpp"

#include <cmath>
#include <random>

#include <Eigen/Geometry>

namespace hmr {
namespace {

constexpr double kPi = 3.14159265358979323846;

/// Exact depth of the plane along the ray through pixel (u, v), or 0 when the
/// ray misses (parallel or intersecting behind the camera).
double ray_plane_depth(double u, double v, const Eigen::Vector3d& n, const Eigen::Vector3d& p0,
                       const CameraModel& cam) {
    Eigen::Vector3d dir((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0);
    double denom = n.dot(dir);
    if (std::abs(denom) < 1e-12) return 0.0;
    double t = n.dot(p0) / denom;
    return t > 0.0 ? t : 0.0; // dir.z == 1, so t is the depth
}

} // namespace

SyntheticScene synth_scene(const SceneSpec& spec, const CameraModel& camera) {
    camera.validate();
    if (spec.distance_m <= 0) throw std::invalid_argument("plane distance must be positive");
    if (spec.outlier_fraction < 0 || spec.outlier_fraction >= 0.5)
        throw std::invalid_argument("outlier fraction must be in [0, 0.5)");

    Eigen::Matrix3d tilt =
        (Eigen::AngleAxisd(spec.tilt_x_deg * kPi / 180.0, Eigen::Vector3d::UnitX()) *
         Eigen::AngleAxisd(spec.tilt_y_deg * kPi / 180.0, Eigen::Vector3d::UnitY()))
            .toRotationMatrix();
    Eigen::Vector3d normal = tilt * Eigen::Vector3d(0, 0, -1); // toward the camera
    Eigen::Vector3d p0(0, 0, spec.distance_m);

    SyntheticScene scene;
    scene.camera = camera;
    scene.plane_normal_cam = normal;
    scene.plane_point_cam = p0;
    scene.contact_u = spec.contact_u;
    scene.contact_v = spec.contact_v;

    double contact_depth = ray_plane_depth(spec.contact_u, spec.contact_v, normal, p0, camera);
    if (contact_depth <= 0.0)
        throw NotVisible("contact pixel ray does not hit the plane");
    scene.contact_point_cam = deproject(spec.contact_u, spec.contact_v, contact_depth, camera);

    scene.depth = DepthMap(camera.width, camera.height);
    scene.rgb = ImageRgb(camera.width, camera.height, 180);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma_mm);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_real_distribution<double> salt_mm(300.0, 3000.0);

    for (int v = 0; v < camera.height; ++v) {
        for (int u = 0; u < camera.width; ++u) {
            double z = ray_plane_depth(u, v, normal, p0, camera);
            if (z <= 0.0) continue;
            double mm = z * 1e3;
            if (spec.outlier_fraction > 0 && coin(rng) < spec.outlier_fraction)
                mm = salt_mm(rng);
            else if (spec.noise_sigma_mm > 0)
                mm += noise(rng);
            if (mm < 1.0 || mm > 65535.0) continue; // leave invalid
            scene.depth.at(u, v) = static_cast<uint16_t>(std::lround(mm));
        }
    }

    // Contact marker in the RGB render, for eyeballing dumps.
    int cu = static_cast<int>(std::lround(spec.contact_u));
    int cv = static_cast<int>(std::lround(spec.contact_v));
    for (int d = -3; d <= 3; ++d) {
        if (cu + d >= 0 && cu + d < camera.width && cv >= 0 && cv < camera.height) {
            uint8_t* px = scene.rgb.at(cu + d, cv);
            px[0] = 255; px[1] = 0; px[2] = 0;
        }
        if (cv + d >= 0 && cv + d < camera.height && cu >= 0 && cu < camera.width) {
            uint8_t* px = scene.rgb.at(cu, cv + d);
            px[0] = 255; px[1] = 0; px[2] = 0;
        }
    }
    return scene;
}

} // namespace hmr
