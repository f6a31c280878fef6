#include "stsim/compliance.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace stsim::compliance {

namespace {

constexpr int kMaxBisection = 60;
constexpr double kBracketTolerance = 1e-12;  // m

// Pixel travel, assuming finite-or-inf clearance.
double compression(double clearance, double delta, double gel_thickness)
{
    return std::clamp(delta - clearance, 0.0, gel_thickness);
}

}  // namespace

void ComplianceParams::validate() const
{
    if (!(k_pixel > 0.0) || !std::isfinite(k_pixel)) {
        throw std::invalid_argument("compliance.k_pixel must be positive");
    }
    if (!(smoothing_sigma >= 0.0) || !std::isfinite(smoothing_sigma)) {
        throw std::invalid_argument("compliance.smoothing_sigma must be non-negative");
    }
}

std::size_t LoadResult::contact_area_px() const
{
    return static_cast<std::size_t>(std::count(contact_mask.begin(), contact_mask.end(), 1));
}

geometry::HeightField displacement_at(const ScalarGrid& clearance, double pixel_pitch, double delta,
                                      double gel_thickness)
{
    if (!(delta >= 0.0)) {
        throw std::invalid_argument("penetration delta must be non-negative");
    }
    ScalarGrid d(clearance.width(), clearance.height());
    for (std::size_t i = 0; i < clearance.size(); ++i) {
        d[i] = compression(clearance[i], delta, gel_thickness);
    }
    return geometry::HeightField(std::move(d), pixel_pitch);
}

double load_at(const ScalarGrid& clearance, double delta, double k_pixel, double gel_thickness)
{
    double sum = 0.0;
    for (double c : clearance) {
        sum += compression(c, delta, gel_thickness);
    }
    return k_pixel * sum;
}

LoadResult solve_penetration(const ScalarGrid& clearance, double pixel_pitch, double weight_n,
                             const ComplianceParams& params, double gel_thickness)
{
    if (!(weight_n >= 0.0) || !std::isfinite(weight_n)) {
        throw std::invalid_argument("weight must be finite and non-negative");
    }
    params.validate();
    if (!(gel_thickness > 0.0)) {
        throw std::invalid_argument("gel thickness must be positive");
    }

    const double k = params.k_pixel;
    double delta = 0.0;
    bool saturated = false;
    int iterations = 0;

    const double capacity = load_at(clearance, gel_thickness, k, gel_thickness);
    if (weight_n == 0.0) {
        delta = 0.0;
    } else if (weight_n >= capacity) {
        delta = gel_thickness;
        saturated = weight_n > capacity;
    } else {
        double lo = 0.0;
        double hi = gel_thickness;
        while (iterations < kMaxBisection && hi - lo > kBracketTolerance) {
            const double mid = 0.5 * (lo + hi);
            if (load_at(clearance, mid, k, gel_thickness) < weight_n) {
                lo = mid;
            } else {
                hi = mid;
            }
            ++iterations;
        }

        // The load curve is piecewise linear; solve the segment under the
        // bracket midpoint directly and keep it if it stays in the bracket.
        const double probe = 0.5 * (lo + hi);
        double offset_sum = 0.0;
        std::size_t active = 0;
        std::size_t full = 0;
        for (double c : clearance) {
            if (probe - c >= gel_thickness) {
                ++full;
            } else if (probe > c) {
                offset_sum += c;
                ++active;
            }
        }
        delta = probe;
        if (active > 0) {
            const double exact = (weight_n / k - static_cast<double>(full) * gel_thickness + offset_sum)
                / static_cast<double>(active);
            if (exact >= lo && exact <= hi) {
                delta = exact;
            }
        }
    }

    geometry::HeightField disp = displacement_at(clearance, pixel_pitch, delta, gel_thickness);
    MaskGrid mask(clearance.width(), clearance.height(), 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < clearance.size(); ++i) {
        const double d = disp.values()[i];
        sum += d;
        mask[i] = d > 0.0 ? 1 : 0;
    }

    return LoadResult{delta, std::move(mask), std::move(disp), k * sum, saturated, iterations};
}

std::vector<double> gaussian_kernel(double sigma)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("smoothing sigma must be non-negative");
    }
    if (sigma == 0.0) {
        return {1.0};
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double t = std::exp(-(i * i) / (2.0 * sigma * sigma));
        taps[static_cast<std::size_t>(i + radius)] = t;
        total += t;
    }
    for (double& t : taps) {
        t /= total;
    }
    return taps;
}

geometry::HeightField smooth(const geometry::HeightField& displacement, double sigma)
{
    const std::vector<double> taps = gaussian_kernel(sigma);
    if (taps.size() == 1) {
        return displacement;
    }
    const int radius = static_cast<int>(taps.size() / 2);
    const int w = displacement.width();
    const int h = displacement.height();
    const ScalarGrid& src = displacement.values();

    ScalarGrid horizontal(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += taps[static_cast<std::size_t>(i + radius)] * src.clamped(x + i, y);
            }
            horizontal.at(x, y) = acc;
        }
    }

    ScalarGrid out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int j = -radius; j <= radius; ++j) {
                acc += taps[static_cast<std::size_t>(j + radius)] * horizontal.clamped(x, y + j);
            }
            // Rounding can push a convex combination a hair below zero.
            out.at(x, y) = std::max(acc, 0.0);
        }
    }
    return geometry::HeightField(std::move(out), displacement.pixel_pitch());
}

}  // namespace stsim::compliance
