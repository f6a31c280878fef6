#pragma once

#include "stsim/geometry.h"
#include "stsim/grid.h"

#include <array>
#include <vector>

namespace stsim::shading {

/// Phong coefficients. The defaults are the membrane constants used for the
/// tactile renderer (ks 0.5, kd 1.0, ka 0.8, shininess 5).
struct PhongParams {
    double k_a = 0.8;
    double k_d = 1.0;
    double k_s = 0.5;
    double alpha = 5.0;
    Rgb i_a{0.3, 0.3, 0.3};

    void validate() const;
};

/// Directional light. `direction` points from the surface toward the light.
struct LightSource {
    Vec3 direction{0.0, 0.0, 1.0};
    Rgb i_d{1.0, 1.0, 1.0};
    Rgb i_s{1.0, 1.0, 1.0};

    void validate() const;
};

using TactileImage = RgbImage;

/// Mirror `l` about `n`: 2(l.n)n - l.
Vec3 reflect(const Vec3& l, const Vec3& n);

/// Per-channel Phong intensity for one normal, clamped to [0,1].
Rgb shade_pixel(const Vec3& normal, const std::vector<LightSource>& lights, const PhongParams& params,
                const Vec3& view);

/// Shade every normal. Throws on an empty light list.
TactileImage shade(const geometry::NormalField& normals, const std::vector<LightSource>& lights,
                   const PhongParams& params, const Vec3& view = {0.0, 0.0, 1.0});

/// LED colors in ring order: sides -x, +y, +x, -y.
using LedColors = std::array<Rgb, 4>;

/// Blue, red, white, green.
LedColors default_led_colors();

/// Four directional lights, one per sensor side in the order -x, +y, +x, -y.
///
/// Each light sits `elevation_deg` above the membrane plane and its direction
/// leans toward the sensor center, so the +x light at 45 degrees has direction
/// (-0.7071, 0, 0.7071). Elevation must lie in (0, 90].
std::vector<LightSource> led_ring(double elevation_deg, const LedColors& colors = default_led_colors());

}  // namespace stsim::shading
