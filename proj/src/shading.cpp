#include "stsim/shading.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stsim::shading {

namespace {

bool channels_in_unit_range(const Rgb& c)
{
    for (int k = 0; k < 3; ++k) {
        if (!(c[k] >= 0.0 && c[k] <= 1.0)) {
            return false;
        }
    }
    return true;
}

}  // namespace

void PhongParams::validate() const
{
    if (!(k_a >= 0.0 && k_d >= 0.0 && k_s >= 0.0)) {
        throw std::invalid_argument("phong coefficients must be non-negative");
    }
    if (!(alpha >= 1.0)) {
        throw std::invalid_argument("phong shininess must be >= 1");
    }
    for (int c = 0; c < 3; ++c) {
        if (!(i_a[c] >= 0.0) || !std::isfinite(i_a[c])) {
            throw std::invalid_argument("ambient intensity must be non-negative");
        }
    }
}

void LightSource::validate() const
{
    if (std::abs(norm(direction) - 1.0) > 1e-9) {
        throw std::invalid_argument("light direction must be unit length");
    }
    if (!channels_in_unit_range(i_d) || !channels_in_unit_range(i_s)) {
        throw std::invalid_argument("light intensities must lie in [0,1] per channel");
    }
}

Vec3 reflect(const Vec3& l, const Vec3& n)
{
    return 2.0 * dot(l, n) * n - l;
}

Rgb shade_pixel(const Vec3& normal, const std::vector<LightSource>& lights, const PhongParams& params,
                const Vec3& view)
{
    Rgb out{params.k_a * params.i_a.r, params.k_a * params.i_a.g, params.k_a * params.i_a.b};
    for (const LightSource& light : lights) {
        const double diffuse = std::max(dot(light.direction, normal), 0.0);
        const double rv = std::max(dot(reflect(light.direction, normal), view), 0.0);
        const double specular = std::pow(rv, params.alpha);
        for (int c = 0; c < 3; ++c) {
            out[c] += params.k_d * diffuse * light.i_d[c] + params.k_s * specular * light.i_s[c];
        }
    }
    for (int c = 0; c < 3; ++c) {
        out[c] = std::clamp(out[c], 0.0, 1.0);
    }
    return out;
}

TactileImage shade(const geometry::NormalField& normals, const std::vector<LightSource>& lights,
                   const PhongParams& params, const Vec3& view)
{
    if (lights.empty()) {
        throw std::invalid_argument("shade requires at least one light");
    }
    params.validate();
    for (const LightSource& light : lights) {
        light.validate();
    }
    if (std::abs(norm(view) - 1.0) > 1e-9) {
        throw std::invalid_argument("view vector must be unit length");
    }

    TactileImage img(normals.width(), normals.height());
    for (std::size_t i = 0; i < normals.size(); ++i) {
        img[i] = shade_pixel(normals[i], lights, params, view);
    }
    return img;
}

LedColors default_led_colors()
{
    return {Rgb{0.0, 0.0, 1.0}, Rgb{1.0, 0.0, 0.0}, Rgb{1.0, 1.0, 1.0}, Rgb{0.0, 1.0, 0.0}};
}

std::vector<LightSource> led_ring(double elevation_deg, const LedColors& colors)
{
    if (!(elevation_deg > 0.0 && elevation_deg <= 90.0)) {
        throw std::invalid_argument("LED elevation must lie in (0, 90] degrees");
    }
    const double e = elevation_deg * std::numbers::pi / 180.0;
    const double horizontal = elevation_deg == 90.0 ? 0.0 : std::cos(e);
    const double vertical = elevation_deg == 90.0 ? 1.0 : std::sin(e);

    // Inward-pointing azimuths for sides -x, +y, +x, -y.
    const std::array<std::array<double, 2>, 4> inward{{{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}}};

    std::vector<LightSource> lights;
    lights.reserve(4);
    for (std::size_t k = 0; k < 4; ++k) {
        LightSource light;
        light.direction = {horizontal * inward[k][0], horizontal * inward[k][1], vertical};
        light.i_d = colors[k];
        light.i_s = colors[k];
        lights.push_back(light);
    }
    return lights;
}

}  // namespace stsim::shading
