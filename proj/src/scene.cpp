#include "stsim/scene.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stsim::scene {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool odd_cell(double a, double b)
{
    const auto s = static_cast<long long>(std::floor(a)) + static_cast<long long>(std::floor(b));
    return (s % 2 + 2) % 2 == 1;
}

bool inside_rect(double u, double v, double sx, double sy)
{
    return std::abs(u) <= 0.5 * sx && std::abs(v) <= 0.5 * sy;
}

double bump(const EngravedPlate& plate, double u, double v)
{
    const double a = plate.amplitude;
    const double p = plate.period;
    switch (plate.pattern) {
    case BumpPattern::sinusoid:
        return 0.5 * a * (1.0 + std::sin(2.0 * std::numbers::pi * u / p));
    case BumpPattern::radial:
        return 0.5 * a * (1.0 + std::sin(2.0 * std::numbers::pi * std::hypot(u, v) / p));
    case BumpPattern::checker:
        return odd_cell(u / p, v / p) ? a : 0.0;
    }
    return 0.0;
}

// Clearance of the underside at object-frame point (u, v), +inf off-footprint.
double clearance_local(const Shape& shape, double u, double v)
{
    struct Visitor {
        double u;
        double v;

        double operator()(const Sphere& s) const
        {
            const double r2 = u * u + v * v;
            const double R2 = s.radius * s.radius;
            return r2 < R2 ? s.radius - std::sqrt(R2 - r2) : kInf;
        }
        double operator()(const Box& b) const { return inside_rect(u, v, b.size_x, b.size_y) ? 0.0 : kInf; }
        double operator()(const Cylinder& c) const
        {
            const double r = std::hypot(u, v);
            if (r > c.radius) {
                return kInf;
            }
            const double flat = c.radius - c.edge_radius;
            if (r <= flat) {
                return 0.0;
            }
            const double t = r - flat;
            return c.edge_radius - std::sqrt(std::max(c.edge_radius * c.edge_radius - t * t, 0.0));
        }
        double operator()(const TexturedPlate& p) const { return inside_rect(u, v, p.size_x, p.size_y) ? 0.0 : kInf; }
        double operator()(const EngravedPlate& p) const
        {
            return inside_rect(u, v, p.size_x, p.size_y) ? bump(p, u, v) : kInf;
        }
    };
    return std::visit(Visitor{u, v}, shape);
}

// Cosine between the underside normal and the view axis, ignoring relief.
double view_cosine(const Shape& shape, double u, double v)
{
    if (const auto* s = std::get_if<Sphere>(&shape)) {
        const double r2 = u * u + v * v;
        return std::sqrt(std::max(s->radius * s->radius - r2, 0.0)) / s->radius;
    }
    return 1.0;
}

struct LocalPoint {
    double u;
    double v;
};

LocalPoint to_local(const Pose& pose, double x, double y)
{
    const double dx = x - pose.x;
    const double dy = y - pose.y;
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    return {c * dx + s * dy, -s * dx + c * dy};
}

}  // namespace

Rgb Albedo::at(double u, double v) const
{
    switch (kind) {
    case AlbedoKind::constant:
        return primary;
    case AlbedoKind::checker:
        return odd_cell(u / period, v / period) ? secondary : primary;
    case AlbedoKind::stripes:
        return odd_cell(u / period, 0.0) ? secondary : primary;
    }
    return primary;
}

double SceneObject::texture_amplitude() const
{
    if (const auto* p = std::get_if<EngravedPlate>(&shape)) {
        return p->amplitude;
    }
    return 0.0;
}

double SceneObject::footprint_radius() const
{
    struct Visitor {
        double operator()(const Sphere& s) const { return s.radius; }
        double operator()(const Box& b) const { return 0.5 * std::hypot(b.size_x, b.size_y); }
        double operator()(const Cylinder& c) const { return c.radius; }
        double operator()(const TexturedPlate& p) const { return 0.5 * std::hypot(p.size_x, p.size_y); }
        double operator()(const EngravedPlate& p) const { return 0.5 * std::hypot(p.size_x, p.size_y); }
    };
    return std::visit(Visitor{}, shape);
}

void SceneObject::validate(double gel_thickness) const
{
    auto fail = [this](const std::string& what) {
        throw std::invalid_argument("object '" + id + "': " + what);
    };
    if (!(weight_g >= 0.0) || !std::isfinite(weight_g)) {
        fail("weight must be non-negative");
    }
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (const auto* s = std::get_if<Sphere>(&shape); s && !positive(s->radius)) {
        fail("sphere radius must be positive");
    }
    if (const auto* b = std::get_if<Box>(&shape); b && !(positive(b->size_x) && positive(b->size_y))) {
        fail("box sizes must be positive");
    }
    if (const auto* c = std::get_if<Cylinder>(&shape)) {
        if (!positive(c->radius) || !(c->edge_radius >= 0.0 && c->edge_radius <= c->radius)) {
            fail("cylinder needs radius > 0 and 0 <= edge_radius <= radius");
        }
    }
    if (const auto* p = std::get_if<TexturedPlate>(&shape); p && !(positive(p->size_x) && positive(p->size_y))) {
        fail("plate sizes must be positive");
    }
    if (const auto* p = std::get_if<EngravedPlate>(&shape)) {
        if (!(positive(p->size_x) && positive(p->size_y) && positive(p->period))) {
            fail("engraved plate sizes and period must be positive");
        }
        if (!(p->amplitude >= 0.0)) {
            fail("texture amplitude must be non-negative");
        }
    }
    if (!(texture_amplitude() < gel_thickness)) {
        fail("texture amplitude must be below the gel thickness");
    }
    if (albedo.kind != AlbedoKind::constant && !positive(albedo.period)) {
        fail("albedo pattern period must be positive");
    }
}

ScalarGrid lower_surface(const SceneObject& obj, const Pose& pose, const SensorGrid& grid)
{
    ScalarGrid clearance(grid.width, grid.height, kInf);
    bool any = false;
    for (int j = 0; j < grid.height; ++j) {
        for (int i = 0; i < grid.width; ++i) {
            const LocalPoint p = to_local(pose, grid.x_at(i), grid.y_at(j));
            const double c = clearance_local(obj.shape, p.u, p.v);
            clearance.at(i, j) = c;
            any = any || std::isfinite(c);
        }
    }
    if (!any) {
        std::ostringstream msg;
        msg << "object '" << obj.id << "' at pose (" << pose.x << ", " << pose.y << ", " << pose.theta
            << ") does not overlap the sensor";
        throw std::invalid_argument(msg.str());
    }
    return clearance;
}

RgbImage render_visual(const SceneObject& obj, const Pose& pose, const SensorGrid& grid, const VisualParams& params)
{
    RgbImage img(grid.width, grid.height, params.background);
    for (int j = 0; j < grid.height; ++j) {
        for (int i = 0; i < grid.width; ++i) {
            const LocalPoint p = to_local(pose, grid.x_at(i), grid.y_at(j));
            if (!std::isfinite(clearance_local(obj.shape, p.u, p.v))) {
                continue;
            }
            const double shade = params.light_intensity * view_cosine(obj.shape, p.u, p.v);
            const Rgb a = obj.albedo.at(p.u, p.v);
            Rgb& out = img.at(i, j);
            for (int c = 0; c < 3; ++c) {
                out[c] = std::clamp(a[c] * shade, 0.0, 1.0);
            }
        }
    }
    return img;
}

std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t RandomStream::next_u64()
{
    return mix64(seed_ + 0x9E3779B97F4A7C15ULL * counter_++);
}

double RandomStream::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RandomStream RandomStream::split(std::uint64_t key) const
{
    return RandomStream(mix64(seed_ ^ mix64(key ^ 0xD1B54A32D192ED03ULL)));
}

PoseBounds footprint_bounds(const SceneObject& obj, const SensorGrid& grid)
{
    const double r = obj.footprint_radius();
    const double hx = std::max(0.5 * grid.width * grid.pixel_pitch - r, 0.0);
    const double hy = std::max(0.5 * grid.height * grid.pixel_pitch - r, 0.0);
    PoseBounds b;
    b.x_min = -hx;
    b.x_max = hx;
    b.y_min = -hy;
    b.y_max = hy;
    return b;
}

Pose sample_pose(RandomStream& stream, const PoseBounds& bounds)
{
    if (bounds.x_max < bounds.x_min || bounds.y_max < bounds.y_min || bounds.theta_max < bounds.theta_min) {
        throw std::invalid_argument("pose bounds must satisfy min <= max");
    }
    Pose p;
    p.x = bounds.x_min + stream.uniform() * (bounds.x_max - bounds.x_min);
    p.y = bounds.y_min + stream.uniform() * (bounds.y_max - bounds.y_min);
    p.theta = bounds.theta_min + stream.uniform() * (bounds.theta_max - bounds.theta_min);
    return p;
}

}  // namespace stsim::scene
