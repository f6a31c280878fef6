#pragma once

#include "stsim/grid.h"

#include <array>

namespace stsim::geometry {

/// Gel surface as penetration depth per pixel, meters.
///
/// Zero is the undeformed rest surface; positive values are pushed toward the
/// internal camera. Width and height are at least 3 so every pixel has a full
/// neighborhood for normal estimation.
class HeightField {
public:
    HeightField(ScalarGrid values, double pixel_pitch);

    int width() const { return values_.width(); }
    int height() const { return values_.height(); }
    double pixel_pitch() const { return pixel_pitch_; }

    double at(int x, int y) const { return values_.at(x, y); }
    const ScalarGrid& values() const { return values_; }

    bool operator==(const HeightField&) const = default;

private:
    ScalarGrid values_;
    double pixel_pitch_;
};

/// Surface slopes (dimensionless) on the same grid as the source field.
struct GradientField {
    ScalarGrid dx;
    ScalarGrid dy;
};

using NormalField = Grid<Vec3>;

/// Clamp a raw penetration map to the elastomer thickness.
/// Rejects non-finite or negative samples, naming the first offending pixel.
HeightField clip_depth(const ScalarGrid& raw_depth, double pixel_pitch, double gel_thickness);

/// Central differences in the interior, one-sided differences on the border.
GradientField gradients(const HeightField& hf);

/// Per-pixel normal from the principal axes of the (2r+1)^2 neighborhood.
///
/// The window replicates edge pixels at the border. The returned normal is the
/// eigenvector of the smallest covariance eigenvalue, oriented so z >= 0.
/// A window whose points all coincide yields (0,0,1).
NormalField normals_covariance(const HeightField& hf, int radius = 1);

/// Eigen-decomposition of a symmetric 3x3 matrix.
struct SymmetricEigen3 {
    std::array<double, 3> values;               ///< ascending
    std::array<Vec3, 3> vectors;                ///< unit, matched to values
};

/// Cyclic Jacobi rotations until the off-diagonal mass falls below 1e-10 of
/// the matrix norm (relative). Input is row-major {a00,a01,a02,a11,a12,a22}.
SymmetricEigen3 eigen_symmetric3(const std::array<double, 6>& upper);

/// Smallest-eigenvalue eigenvector of a covariance matrix, oriented z >= 0.
/// Ties between the two smallest eigenvalues (within 1e-12 relative) go to
/// the candidate with the larger z-component. Zero matrices give (0,0,1).
Vec3 smallest_axis(const std::array<double, 6>& covariance);

}  // namespace stsim::geometry
