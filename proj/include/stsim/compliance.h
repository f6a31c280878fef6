#pragma once

#include "stsim/geometry.h"
#include "stsim/grid.h"

#include <vector>

namespace stsim::compliance {

/// Independent vertical spring per pixel.
///
/// The default stiffness is calibrated so a 1133 g load on a flat 7 cm disc,
/// sampled at 224 px across 15 cm, settles about 1.5 mm into the gel.
struct ComplianceParams {
    double k_pixel = 0.863;        ///< N/m per pixel spring
    double smoothing_sigma = 2.0;  ///< px, applied to the rendered surface only

    void validate() const;
};

struct LoadResult {
    double penetration = 0.0;  ///< m, object travel below the rest surface
    MaskGrid contact_mask;     ///< 1 where a spring is compressed
    geometry::HeightField displacement;
    double total_force = 0.0;  ///< N, k * sum(displacement)
    bool saturated = false;    ///< load exceeded full-compression capacity
    int iterations = 0;        ///< bisection steps taken

    std::size_t contact_area_px() const;
};

/// Standard gravity, for gram-to-newton conversion.
inline constexpr double kGravity = 9.80665;

inline double grams_to_newtons(double grams) { return grams * 1e-3 * kGravity; }

/// clamp(delta - clearance, 0, gel_thickness) per pixel. Absent pixels carry
/// +inf clearance and never compress.
geometry::HeightField displacement_at(const ScalarGrid& clearance, double pixel_pitch, double delta,
                                      double gel_thickness);

/// Total spring reaction k * sum(displacement) at travel `delta`, N.
double load_at(const ScalarGrid& clearance, double delta, double k_pixel, double gel_thickness);

/// Travel at which the spring reaction balances `weight_n`.
///
/// Bisects the monotone load curve on [0, gel_thickness], then solves the
/// linear segment containing the root exactly. Loads above the fully
/// compressed capacity return delta = gel_thickness with `saturated` set.
LoadResult solve_penetration(const ScalarGrid& clearance, double pixel_pitch, double weight_n,
                             const ComplianceParams& params, double gel_thickness);

/// Normalized 1D Gaussian taps for radius ceil(3 sigma). sigma = 0 gives {1}.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with edge replication; sigma = 0 is the identity.
geometry::HeightField smooth(const geometry::HeightField& displacement, double sigma);

}  // namespace stsim::compliance
