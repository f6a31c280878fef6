#pragma once

// Analytic fixtures shared by the unit tests.

#include "stsim/geometry.h"
#include "stsim/grid.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace stsim::fixtures {

/// Spherical cap pressed `depth` into the membrane, centered on the grid.
/// Height f(r) = sqrt(R^2 - r^2) - (R - depth) inside the contact disc.
struct SphereCap {
    double radius;
    double depth;
    double pitch;
    int size;

    double cx(int i) const { return (i - 0.5 * (size - 1)) * pitch; }

    double contact_radius() const { return std::sqrt(2.0 * radius * depth - depth * depth); }

    double r_at(int i, int j) const { return std::hypot(cx(i), cx(j)); }

    double height(int i, int j) const
    {
        const double r2 = cx(i) * cx(i) + cx(j) * cx(j);
        if (r2 >= radius * radius) {
            return 0.0;
        }
        return std::max(std::sqrt(radius * radius - r2) - (radius - depth), 0.0);
    }

    /// Analytic slope and unit normal; valid strictly inside the contact disc.
    double dfdx(int i, int j) const { return -cx(i) / std::sqrt(radius * radius - r_at(i, j) * r_at(i, j)); }
    double dfdy(int i, int j) const { return -cx(j) / std::sqrt(radius * radius - r_at(i, j) * r_at(i, j)); }
    Vec3 normal(int i, int j) const
    {
        const double s = std::sqrt(radius * radius - r_at(i, j) * r_at(i, j));
        return {cx(i) / radius, cx(j) / radius, s / radius};
    }

    /// Pixels farther than `rim_px` from the contact boundary, inside or out.
    bool away_from_rim(int i, int j, double rim_px) const
    {
        return std::abs(r_at(i, j) - contact_radius()) > rim_px * pitch;
    }
    bool inside(int i, int j) const { return r_at(i, j) < contact_radius(); }

    geometry::HeightField field() const
    {
        ScalarGrid g(size, size);
        for (int j = 0; j < size; ++j) {
            for (int i = 0; i < size; ++i) {
                g.at(i, j) = height(i, j);
            }
        }
        return geometry::HeightField(std::move(g), pitch);
    }
};

/// Default fixture: 256x256 at 0.1 mm, R = 10 mm pressed 4 mm (80 px contact radius).
inline SphereCap default_cap() { return SphereCap{0.01, 0.004, 1e-4, 256}; }

inline double angle_deg(const Vec3& a, const Vec3& b)
{
    const double c = std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0);
    return std::acos(c) * 180.0 / M_PI;
}

}  // namespace stsim::fixtures
