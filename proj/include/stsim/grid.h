#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stsim {

/// Dense row-major 2D grid. Origin top-left, x rightward, y downward.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, const T& fill = T{})
        : width_(width), height_(height)
    {
        if (width < 0 || height < 0) {
            throw std::invalid_argument("grid dimensions must be non-negative");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& at(int x, int y) { return data_[index(x, y)]; }
    const T& at(int x, int y) const { return data_[index(x, y)]; }

    /// Clamp-to-edge access.
    const T& clamped(int x, int y) const
    {
        x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
        y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
        return data_[index(x, y)];
    }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    bool same_shape(const Grid& other) const
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const Grid& other) const = default;

private:
    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using ScalarGrid = Grid<double>;
using MaskGrid = Grid<unsigned char>;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec3&) const = default;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v)
{
    const double n = norm(v);
    if (!(n > 0.0)) {
        throw std::invalid_argument("cannot normalize a zero-length vector");
    }
    return {v.x / n, v.y / n, v.z / n};
}

/// Linear RGB triple; image channels live in [0,1].
struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;

    double& operator[](int c) { return c == 0 ? r : (c == 1 ? g : b); }
    double operator[](int c) const { return c == 0 ? r : (c == 1 ? g : b); }

    bool operator==(const Rgb&) const = default;
};

using RgbImage = Grid<Rgb>;

}  // namespace stsim
