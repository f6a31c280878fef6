#pragma once

#include "stsim/geometry.h"
#include "stsim/grid.h"

#include <cstdint>
#include <string>
#include <vector>

namespace stsim::io {

/// Interleaved 8-bit RGB, row-major.
struct Rgb8Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    bool operator==(const Rgb8Image&) const = default;
};

/// round(channel * 255) after clamping to [0,1].
Rgb8Image quantize(const RgbImage& image);

void write_png(const std::string& path, const RgbImage& image);
void write_png(const std::string& path, const Rgb8Image& image);
Rgb8Image read_png(const std::string& path);

/// Width and height from the PNG header without decoding pixels.
std::pair<int, int> png_dimensions(const std::string& path);

struct RawDepth {
    ScalarGrid depth;  ///< m
    double pixel_pitch = 0.0;
};

/// "STSD": 16-byte little-endian header (magic, u32 width, u32 height,
/// f32 pixel pitch) followed by width*height f32 meters, row-major.
void write_stsd(const std::string& path, const ScalarGrid& depth, double pixel_pitch);
RawDepth read_stsd(const std::string& path);

/// Binary 16-bit PGM (P5, maxval > 255, big-endian samples) scaled by
/// meters_per_level.
RawDepth read_pgm16(const std::string& path, double meters_per_level, double pixel_pitch);

/// Dispatches on the file magic.
RawDepth load_raw_depth(const std::string& path, double pgm_meters_per_level, double pgm_pixel_pitch);

}  // namespace stsim::io
