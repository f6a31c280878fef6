#pragma once

#include "stsim/compliance.h"
#include "stsim/geometry.h"
#include "stsim/grid.h"
#include "stsim/scene.h"
#include "stsim/shading.h"

#include <json.hpp>

#include <array>
#include <string>

namespace stsim::sensor {

/// Every tunable of the simulated sensor. Defaults: 224x224 px over a
/// 15x15 cm active area with a 5 mm gel.
struct SensorConfig {
    int width = 224;
    int height = 224;
    double active_width = 0.15;   ///< m
    double active_height = 0.15;  ///< m
    double gel_thickness = 0.005; ///< m

    shading::PhongParams phong;
    double led_elevation_deg = 15.0;
    shading::LedColors led_colors = shading::default_led_colors();

    compliance::ComplianceParams compliance;
    int normal_radius = 1;

    double internal_intensity = 1.0;
    double external_intensity = 1.0;

    scene::VisualParams visual;

    /// Scale for 16-bit PGM depth imports.
    double pgm_meters_per_level = 1e-6;

    double pixel_pitch() const { return active_width / width; }
    scene::SensorGrid grid() const { return {width, height, pixel_pitch()}; }

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;
};

/// JSON schema: nested objects keyed phong.{ka,kd,ks,alpha,ambient},
/// leds.{elevation_deg,colors}, compliance.{k_pixel,smoothing_sigma},
/// normals.radius, visual.{background,light_intensity},
/// depth_import.pgm_meters_per_level, plus top-level
/// resolution [w,h], active_area_m [w,h], gel_thickness_m,
/// internal_intensity, external_intensity. Missing keys keep defaults;
/// unknown keys are rejected.
SensorConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SensorConfig& config);
SensorConfig load_config(const std::string& path);

/// Same sensor sampled at width x height: keeps the active width and square
/// pixels, and scales k_pixel with pixel area so penetrations stay put.
SensorConfig resample(const SensorConfig& config, int width, int height);

struct SensorOutput {
    shading::TactileImage tactile;
    RgbImage visual;
    RgbImage blended;
    compliance::LoadResult load;
};

/// Convex per-pixel mix with weight internal / (internal + external) on the
/// tactile image.
RgbImage blend(const shading::TactileImage& tactile, const RgbImage& visual, double internal, double external);

/// Configured sensor. Holds the LED ring and the undeformed-membrane image.
/// capture() is const and safe to call concurrently.
class Sensor {
public:
    explicit Sensor(SensorConfig config);

    const SensorConfig& config() const { return config_; }
    const std::vector<shading::LightSource>& lights() const { return lights_; }
    const shading::TactileImage& baseline() const { return baseline_; }

    /// lower_surface -> solve_penetration -> smooth -> normals -> shade,
    /// plus the visual render and the blend.
    SensorOutput capture(const scene::SceneObject& obj, const scene::Pose& pose) const;

    /// Tactile render of an externally supplied penetration map.
    shading::TactileImage render_tactile(const geometry::HeightField& surface) const;

private:
    SensorConfig config_;
    std::vector<shading::LightSource> lights_;
    shading::TactileImage baseline_;
};

SensorOutput capture(const scene::SceneObject& obj, const scene::Pose& pose, const SensorConfig& config);

}  // namespace stsim::sensor
