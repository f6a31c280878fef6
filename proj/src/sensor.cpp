#include "stsim/sensor.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <utility>

namespace stsim::sensor {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!obj.is_object()) {
        throw std::invalid_argument(where + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw std::invalid_argument(where + ": unknown key '" + key + "'");
        }
    }
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) {
        throw std::invalid_argument(where + ": expected a number");
    }
    return j.get<double>();
}

int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) {
        throw std::invalid_argument(where + ": expected an integer");
    }
    return j.get<int>();
}

Rgb rgb(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 3) {
        throw std::invalid_argument(where + ": expected [r, g, b]");
    }
    return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

json rgb_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

template <typename T, typename F>
void read_pair(const json& j, const std::string& where, T& a, T& b, F convert)
{
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument(where + ": expected a two-element array");
    }
    a = convert(j[0], where);
    b = convert(j[1], where);
}

}  // namespace

void SensorConfig::validate() const
{
    if (width < 3 || height < 3) {
        throw std::invalid_argument("resolution: must be at least 3x3");
    }
    if (!(active_width > 0.0) || !(active_height > 0.0)) {
        throw std::invalid_argument("active_area_m: must be positive");
    }
    const double px = active_width / width;
    const double py = active_height / height;
    if (std::abs(px - py) > 1e-9 * std::max(px, py)) {
        throw std::invalid_argument("active_area_m/resolution: pixels must be square");
    }
    if (!(gel_thickness > 0.0) || !std::isfinite(gel_thickness)) {
        throw std::invalid_argument("gel_thickness_m: must be positive");
    }
    phong.validate();
    if (!(led_elevation_deg > 0.0 && led_elevation_deg <= 90.0)) {
        throw std::invalid_argument("leds.elevation_deg: must lie in (0, 90]");
    }
    for (const Rgb& c : led_colors) {
        for (int k = 0; k < 3; ++k) {
            if (!(c[k] >= 0.0 && c[k] <= 1.0)) {
                throw std::invalid_argument("leds.colors: channels must lie in [0,1]");
            }
        }
    }
    compliance.validate();
    if (normal_radius < 1 || width <= 2 * normal_radius || height <= 2 * normal_radius) {
        throw std::invalid_argument("normals.radius: must be >= 1 and fit the resolution");
    }
    if (!(internal_intensity >= 0.0) || !(external_intensity >= 0.0)) {
        throw std::invalid_argument("internal_intensity/external_intensity: must be non-negative");
    }
    if (internal_intensity + external_intensity <= 0.0) {
        throw std::invalid_argument("internal_intensity/external_intensity: must not both be zero");
    }
    if (!(pgm_meters_per_level > 0.0)) {
        throw std::invalid_argument("depth_import.pgm_meters_per_level: must be positive");
    }
    if (!(visual.light_intensity >= 0.0)) {
        throw std::invalid_argument("visual.light_intensity: must be non-negative");
    }
}

SensorConfig config_from_json(const json& j)
{
    SensorConfig c;
    check_keys(j,
               {"schema_version", "resolution", "active_area_m", "gel_thickness_m", "phong", "leds", "compliance",
                "normals", "internal_intensity", "external_intensity", "visual", "depth_import"},
               "config");

    if (j.contains("schema_version") && integer(j["schema_version"], "schema_version") != 1) {
        throw std::invalid_argument("schema_version: only version 1 is supported");
    }
    if (j.contains("resolution")) {
        read_pair(j["resolution"], "resolution", c.width, c.height, integer);
    }
    if (j.contains("active_area_m")) {
        read_pair(j["active_area_m"], "active_area_m", c.active_width, c.active_height, number);
    }
    if (j.contains("gel_thickness_m")) {
        c.gel_thickness = number(j["gel_thickness_m"], "gel_thickness_m");
    }
    if (j.contains("phong")) {
        const json& p = j["phong"];
        check_keys(p, {"ka", "kd", "ks", "alpha", "ambient"}, "phong");
        if (p.contains("ka")) c.phong.k_a = number(p["ka"], "phong.ka");
        if (p.contains("kd")) c.phong.k_d = number(p["kd"], "phong.kd");
        if (p.contains("ks")) c.phong.k_s = number(p["ks"], "phong.ks");
        if (p.contains("alpha")) c.phong.alpha = number(p["alpha"], "phong.alpha");
        if (p.contains("ambient")) c.phong.i_a = rgb(p["ambient"], "phong.ambient");
    }
    if (j.contains("leds")) {
        const json& l = j["leds"];
        check_keys(l, {"elevation_deg", "colors"}, "leds");
        if (l.contains("elevation_deg")) c.led_elevation_deg = number(l["elevation_deg"], "leds.elevation_deg");
        if (l.contains("colors")) {
            const json& cols = l["colors"];
            if (!cols.is_array() || cols.size() != 4) {
                throw std::invalid_argument("leds.colors: expected four [r, g, b] triples");
            }
            for (std::size_t k = 0; k < 4; ++k) {
                c.led_colors[k] = rgb(cols[k], "leds.colors");
            }
        }
    }
    if (j.contains("compliance")) {
        const json& m = j["compliance"];
        check_keys(m, {"k_pixel", "smoothing_sigma"}, "compliance");
        if (m.contains("k_pixel")) c.compliance.k_pixel = number(m["k_pixel"], "compliance.k_pixel");
        if (m.contains("smoothing_sigma")) {
            c.compliance.smoothing_sigma = number(m["smoothing_sigma"], "compliance.smoothing_sigma");
        }
    }
    if (j.contains("normals")) {
        check_keys(j["normals"], {"radius"}, "normals");
        if (j["normals"].contains("radius")) c.normal_radius = integer(j["normals"]["radius"], "normals.radius");
    }
    if (j.contains("internal_intensity")) {
        c.internal_intensity = number(j["internal_intensity"], "internal_intensity");
    }
    if (j.contains("external_intensity")) {
        c.external_intensity = number(j["external_intensity"], "external_intensity");
    }
    if (j.contains("visual")) {
        const json& v = j["visual"];
        check_keys(v, {"background", "light_intensity"}, "visual");
        if (v.contains("background")) c.visual.background = rgb(v["background"], "visual.background");
        if (v.contains("light_intensity")) {
            c.visual.light_intensity = number(v["light_intensity"], "visual.light_intensity");
        }
    }
    if (j.contains("depth_import")) {
        check_keys(j["depth_import"], {"pgm_meters_per_level"}, "depth_import");
        if (j["depth_import"].contains("pgm_meters_per_level")) {
            c.pgm_meters_per_level =
                number(j["depth_import"]["pgm_meters_per_level"], "depth_import.pgm_meters_per_level");
        }
    }
    c.validate();
    return c;
}

json config_to_json(const SensorConfig& c)
{
    json cols = json::array();
    for (const Rgb& col : c.led_colors) {
        cols.push_back(rgb_json(col));
    }
    return json{
        {"schema_version", 1},
        {"resolution", {c.width, c.height}},
        {"active_area_m", {c.active_width, c.active_height}},
        {"gel_thickness_m", c.gel_thickness},
        {"phong",
         {{"ka", c.phong.k_a},
          {"kd", c.phong.k_d},
          {"ks", c.phong.k_s},
          {"alpha", c.phong.alpha},
          {"ambient", rgb_json(c.phong.i_a)}}},
        {"leds", {{"elevation_deg", c.led_elevation_deg}, {"colors", cols}}},
        {"compliance", {{"k_pixel", c.compliance.k_pixel}, {"smoothing_sigma", c.compliance.smoothing_sigma}}},
        {"normals", {{"radius", c.normal_radius}}},
        {"internal_intensity", c.internal_intensity},
        {"external_intensity", c.external_intensity},
        {"visual", {{"background", rgb_json(c.visual.background)}, {"light_intensity", c.visual.light_intensity}}},
        {"depth_import", {{"pgm_meters_per_level", c.pgm_meters_per_level}}},
    };
}

SensorConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

SensorConfig resample(const SensorConfig& config, int width, int height)
{
    if (width < 1 || height < 1) {
        throw std::invalid_argument("resolution: must be positive");
    }
    SensorConfig out = config;
    const double area_ratio = (static_cast<double>(config.width) / width) * (static_cast<double>(config.width) / width);
    out.width = width;
    out.height = height;
    out.active_height = config.active_width * height / width;
    out.compliance.k_pixel = config.compliance.k_pixel * area_ratio;
    return out;
}

RgbImage blend(const shading::TactileImage& tactile, const RgbImage& visual, double internal, double external)
{
    if (!(internal >= 0.0) || !(external >= 0.0)) {
        throw std::invalid_argument("blend intensities must be non-negative");
    }
    if (internal + external <= 0.0) {
        throw std::invalid_argument("blend intensities must not both be zero");
    }
    if (!tactile.same_shape(visual)) {
        throw std::invalid_argument("blend inputs must share dimensions");
    }
    const double alpha = internal / (internal + external);
    const double beta = 1.0 - alpha;
    RgbImage out(tactile.width(), tactile.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            out[i][c] = alpha * tactile[i][c] + beta * visual[i][c];
        }
    }
    return out;
}

Sensor::Sensor(SensorConfig config) : config_(std::move(config))
{
    config_.validate();
    lights_ = shading::led_ring(config_.led_elevation_deg, config_.led_colors);
    const Rgb flat = shading::shade_pixel({0.0, 0.0, 1.0}, lights_, config_.phong, {0.0, 0.0, 1.0});
    baseline_ = shading::TactileImage(config_.width, config_.height, flat);
}

shading::TactileImage Sensor::render_tactile(const geometry::HeightField& surface) const
{
    const geometry::NormalField normals = geometry::normals_covariance(surface, config_.normal_radius);
    return shading::shade(normals, lights_, config_.phong, {0.0, 0.0, 1.0});
}

SensorOutput Sensor::capture(const scene::SceneObject& obj, const scene::Pose& pose) const
{
    obj.validate(config_.gel_thickness);
    const scene::SensorGrid grid = config_.grid();
    const ScalarGrid clearance = scene::lower_surface(obj, pose, grid);

    compliance::LoadResult load = compliance::solve_penetration(
        clearance, grid.pixel_pitch, compliance::grams_to_newtons(obj.weight_g), config_.compliance,
        config_.gel_thickness);

    shading::TactileImage tactile;
    if (load.contact_area_px() == 0) {
        tactile = baseline_;
    } else {
        const geometry::HeightField smoothed = compliance::smooth(load.displacement, config_.compliance.smoothing_sigma);
        const geometry::HeightField surface =
            geometry::clip_depth(smoothed.values(), grid.pixel_pitch, config_.gel_thickness);
        tactile = render_tactile(surface);
    }

    RgbImage visual = scene::render_visual(obj, pose, grid, config_.visual);
    RgbImage blended = blend(tactile, visual, config_.internal_intensity, config_.external_intensity);
    return SensorOutput{std::move(tactile), std::move(visual), std::move(blended), std::move(load)};
}

SensorOutput capture(const scene::SceneObject& obj, const scene::Pose& pose, const SensorConfig& config)
{
    return Sensor(config).capture(obj, pose);
}

}  // namespace stsim::sensor
