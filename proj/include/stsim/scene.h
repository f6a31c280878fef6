#pragma once

#include "stsim/grid.h"

#include <cstdint>
#include <numbers>
#include <string>
#include <variant>

namespace stsim::scene {

// Analytic primitives. Lengths in meters, measured in the object frame.
struct Sphere {
    double radius = 0.02;
};

struct Box {
    double size_x = 0.05;
    double size_y = 0.05;
};

/// Flat disc; a nonzero edge_radius rounds the rim with a quarter-circle fillet.
struct Cylinder {
    double radius = 0.035;
    double edge_radius = 0.0;
};

/// Flat plate whose distinguishing feature is its albedo texture.
struct TexturedPlate {
    double size_x = 0.05;
    double size_y = 0.05;
};

enum class BumpPattern { sinusoid, radial, checker };

/// Flat plate with a relief pattern on its underside.
///
/// sinusoid: a(1 + sin(2 pi u / p)) / 2 along the object x-axis.
/// radial:   a(1 + sin(2 pi r / p)) / 2, concentric ridges around the center.
/// checker:  0 on even cells, a on odd cells of side p.
struct EngravedPlate {
    double size_x = 0.05;
    double size_y = 0.05;
    BumpPattern pattern = BumpPattern::sinusoid;
    double period = 0.004;
    double amplitude = 0.001;
};

using Shape = std::variant<Sphere, Box, Cylinder, TexturedPlate, EngravedPlate>;

enum class AlbedoKind { constant, checker, stripes };

/// Surface color in the object frame.
struct Albedo {
    AlbedoKind kind = AlbedoKind::constant;
    Rgb primary{0.5, 0.5, 0.5};
    Rgb secondary{0.5, 0.5, 0.5};
    double period = 0.01;

    Rgb at(double u, double v) const;
};

struct SceneObject {
    std::string id;
    std::string class_label;
    Shape shape;
    Albedo albedo;
    double weight_g = 0.0;

    /// Relief amplitude for engraved plates, zero otherwise.
    double texture_amplitude() const;
    /// Radius of the smallest origin-centered circle covering the footprint.
    double footprint_radius() const;
    void validate(double gel_thickness) const;
};

/// In-plane placement relative to the sensor center.
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    bool operator==(const Pose&) const = default;
};

/// Pixel-center layout of the sensor, origin at the center of the active area.
struct SensorGrid {
    int width = 224;
    int height = 224;
    double pixel_pitch = 0.15 / 224.0;

    double x_at(int i) const { return (i + 0.5 - 0.5 * width) * pixel_pitch; }
    double y_at(int j) const { return (j + 0.5 - 0.5 * height) * pixel_pitch; }
};

/// Height of the object's underside above the rest membrane, per pixel.
///
/// The lowest point of the analytic surface sits at 0. Pixels outside the
/// footprint are +inf. Throws when the footprint misses the sensor entirely.
ScalarGrid lower_surface(const SceneObject& obj, const Pose& pose, const SensorGrid& grid);

struct VisualParams {
    Rgb background{0.5, 0.5, 0.5};
    double light_intensity = 1.0;
};

/// Orthographic view of the object underside lit by one white light along
/// the view axis. Relief is ignored; only spheres shade non-uniformly.
RgbImage render_visual(const SceneObject& obj, const Pose& pose, const SensorGrid& grid,
                       const VisualParams& params = {});

/// Counter-based SplitMix64 stream. The i-th draw depends only on the seed
/// and i, so derived streams are reproducible regardless of call order.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 bits.
    double uniform();
    /// Independent stream keyed by `key`.
    RandomStream split(std::uint64_t key) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

struct PoseBounds {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
    double theta_min = 0.0;
    double theta_max = 2.0 * std::numbers::pi;
};

/// Center range that keeps the whole footprint on the sensor, or the sensor
/// center when the object is too large for that.
PoseBounds footprint_bounds(const SceneObject& obj, const SensorGrid& grid);

/// Uniform x, y within bounds and theta in [theta_min, theta_max).
Pose sample_pose(RandomStream& stream, const PoseBounds& bounds);

}  // namespace stsim::scene
