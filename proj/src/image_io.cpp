#include "stsim/image_io.h"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace stsim::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const
    {
        if (f) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode)
{
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return f;
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
    }
}

std::uint32_t get_u32(const unsigned char* p)
{
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8)
        | (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<unsigned char> read_all(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Rgb8Image quantize(const RgbImage& image)
{
    Rgb8Image out{image.width(), image.height(), {}};
    out.pixels.reserve(image.size() * 3);
    for (const Rgb& px : image) {
        for (int c = 0; c < 3; ++c) {
            const double v = std::clamp(px[c], 0.0, 1.0);
            out.pixels.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
        }
    }
    return out;
}

void write_png(const std::string& path, const RgbImage& image)
{
    write_png(path, quantize(image));
}

namespace {

// Keeps libpng quiet and carries its message into the exception.
struct PngErrors {
    std::string message;
};

void png_error_fn(png_structp png, png_const_charp msg)
{
    static_cast<PngErrors*>(png_get_error_ptr(png))->message = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

std::string with_reason(const std::string& what, const PngErrors& errors)
{
    return errors.message.empty() ? what : what + ": " + errors.message;
}

}  // namespace

void write_png(const std::string& path, const Rgb8Image& image)
{
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
        throw std::invalid_argument("RGB buffer size does not match its dimensions");
    }
    FilePtr f = open_file(path, "wb");
    PngErrors errors;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &errors, png_error_fn, png_warning_fn);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error(with_reason("failed to encode PNG '" + path + "'", errors));
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
    for (int y = 0; y < image.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(image.pixels.data() + stride * static_cast<std::size_t>(y)));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Rgb8Image read_png(const std::string& path)
{
    FilePtr f = open_file(path, "rb");
    PngErrors errors;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &errors, png_error_fn, png_warning_fn);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("libpng initialisation failed");
    }
    Rgb8Image out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error(with_reason("failed to decode PNG '" + path + "'", errors));
    }
    png_init_io(png, f.get());
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (depth == 16) {
        png_set_strip_16(png);
    }
    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    if (color & PNG_COLOR_MASK_ALPHA) {
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    const std::size_t stride = png_get_rowbytes(png, info);
    out.pixels.resize(stride * static_cast<std::size_t>(out.height));
    std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) {
        rows[static_cast<std::size_t>(y)] = out.pixels.data() + stride * static_cast<std::size_t>(y);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

std::pair<int, int> png_dimensions(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::array<unsigned char, 24> head{};
    if (!in.read(reinterpret_cast<char*>(head.data()), head.size())) {
        throw std::runtime_error("'" + path + "' is too short to be a PNG");
    }
    static constexpr std::array<unsigned char, 8> sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (!std::equal(sig.begin(), sig.end(), head.begin()) || std::memcmp(head.data() + 12, "IHDR", 4) != 0) {
        throw std::runtime_error("'" + path + "' is not a PNG file");
    }
    auto be32 = [&](std::size_t o) {
        return (static_cast<int>(head[o]) << 24) | (static_cast<int>(head[o + 1]) << 16)
            | (static_cast<int>(head[o + 2]) << 8) | static_cast<int>(head[o + 3]);
    };
    return {be32(16), be32(20)};
}

void write_stsd(const std::string& path, const ScalarGrid& depth, double pixel_pitch)
{
    std::vector<unsigned char> buf;
    buf.reserve(16 + depth.size() * 4);
    buf.insert(buf.end(), {'S', 'T', 'S', 'D'});
    put_u32(buf, static_cast<std::uint32_t>(depth.width()));
    put_u32(buf, static_cast<std::uint32_t>(depth.height()));
    put_u32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(pixel_pitch)));
    for (double v : depth) {
        put_u32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
}

RawDepth read_stsd(const std::string& path)
{
    const std::vector<unsigned char> buf = read_all(path);
    if (buf.size() < 16 || std::memcmp(buf.data(), "STSD", 4) != 0) {
        throw std::runtime_error("'" + path + "' is not an STSD depth file");
    }
    const std::uint32_t w = get_u32(buf.data() + 4);
    const std::uint32_t h = get_u32(buf.data() + 8);
    const float pitch = std::bit_cast<float>(get_u32(buf.data() + 12));
    const std::uint64_t expected = 16 + 4ULL * w * h;
    if (buf.size() != expected) {
        std::ostringstream msg;
        msg << "'" << path << "': expected " << expected << " bytes for " << w << "x" << h << ", found "
            << buf.size();
        throw std::runtime_error(msg.str());
    }
    RawDepth out{ScalarGrid(static_cast<int>(w), static_cast<int>(h)), static_cast<double>(pitch)};
    for (std::size_t i = 0; i < out.depth.size(); ++i) {
        out.depth[i] = static_cast<double>(std::bit_cast<float>(get_u32(buf.data() + 16 + 4 * i)));
    }
    return out;
}

RawDepth read_pgm16(const std::string& path, double meters_per_level, double pixel_pitch)
{
    if (!(meters_per_level > 0.0)) {
        throw std::invalid_argument("PGM import needs a positive meters-per-level scale");
    }
    const std::vector<unsigned char> buf = read_all(path);
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < buf.size()) {
            if (buf[pos] == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else if (std::isspace(buf[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&] {
        skip_space();
        long v = 0;
        bool any = false;
        while (pos < buf.size() && std::isdigit(buf[pos])) {
            v = v * 10 + (buf[pos++] - '0');
            any = true;
        }
        if (!any) {
            throw std::runtime_error("'" + path + "': malformed PGM header");
        }
        return v;
    };

    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5') {
        throw std::runtime_error("'" + path + "' is not a binary PGM");
    }
    pos = 2;
    const long w = read_int();
    const long h = read_int();
    const long maxval = read_int();
    if (maxval <= 255 || maxval > 65535) {
        throw std::runtime_error("'" + path + "': expected a 16-bit PGM");
    }
    ++pos;  // single whitespace before the raster
    if (buf.size() - pos != static_cast<std::size_t>(w * h * 2)) {
        throw std::runtime_error("'" + path + "': raster size does not match header");
    }
    RawDepth out{ScalarGrid(static_cast<int>(w), static_cast<int>(h)), pixel_pitch};
    for (std::size_t i = 0; i < out.depth.size(); ++i) {
        const unsigned level = (static_cast<unsigned>(buf[pos + 2 * i]) << 8) | buf[pos + 2 * i + 1];
        out.depth[i] = level * meters_per_level;
    }
    return out;
}

RawDepth load_raw_depth(const std::string& path, double pgm_meters_per_level, double pgm_pixel_pitch)
{
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() >= 4 && std::memcmp(magic, "STSD", 4) == 0) {
        return read_stsd(path);
    }
    if (in.gcount() >= 2 && magic[0] == 'P' && magic[1] == '5') {
        return read_pgm16(path, pgm_meters_per_level, pgm_pixel_pitch);
    }
    throw std::runtime_error("'" + path + "': unrecognised depth format (expected STSD or 16-bit PGM)");
}

}  // namespace stsim::io
