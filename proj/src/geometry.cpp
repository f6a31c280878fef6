#include "stsim/geometry.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace stsim::geometry {

HeightField::HeightField(ScalarGrid values, double pixel_pitch)
    : values_(std::move(values)), pixel_pitch_(pixel_pitch)
{
    if (values_.width() < 3 || values_.height() < 3) {
        throw std::invalid_argument("height field must be at least 3x3 pixels");
    }
    if (!(pixel_pitch_ > 0.0) || !std::isfinite(pixel_pitch_)) {
        throw std::invalid_argument("pixel pitch must be positive and finite");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("height field values must be finite and non-negative");
        }
    }
}

HeightField clip_depth(const ScalarGrid& raw_depth, double pixel_pitch, double gel_thickness)
{
    if (!(gel_thickness > 0.0) || !std::isfinite(gel_thickness)) {
        throw std::invalid_argument("gel thickness must be positive and finite");
    }
    ScalarGrid out(raw_depth.width(), raw_depth.height());
    for (int y = 0; y < raw_depth.height(); ++y) {
        for (int x = 0; x < raw_depth.width(); ++x) {
            const double v = raw_depth.at(x, y);
            if (!std::isfinite(v) || v < 0.0) {
                std::ostringstream msg;
                msg << "raw depth at pixel (" << x << ", " << y << ") is "
                    << (std::isfinite(v) ? "negative" : "not finite") << ": " << v;
                throw std::invalid_argument(msg.str());
            }
            out.at(x, y) = std::min(v, gel_thickness);
        }
    }
    return HeightField(std::move(out), pixel_pitch);
}

GradientField gradients(const HeightField& hf)
{
    const int w = hf.width();
    const int h = hf.height();
    const double p = hf.pixel_pitch();
    GradientField g{ScalarGrid(w, h), ScalarGrid(w, h)};

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x == 0) {
                g.dx.at(x, y) = (hf.at(1, y) - hf.at(0, y)) / p;
            } else if (x == w - 1) {
                g.dx.at(x, y) = (hf.at(w - 1, y) - hf.at(w - 2, y)) / p;
            } else {
                g.dx.at(x, y) = (hf.at(x + 1, y) - hf.at(x - 1, y)) / (2.0 * p);
            }

            if (y == 0) {
                g.dy.at(x, y) = (hf.at(x, 1) - hf.at(x, 0)) / p;
            } else if (y == h - 1) {
                g.dy.at(x, y) = (hf.at(x, h - 1) - hf.at(x, h - 2)) / p;
            } else {
                g.dy.at(x, y) = (hf.at(x, y + 1) - hf.at(x, y - 1)) / (2.0 * p);
            }
        }
    }
    return g;
}

namespace {

constexpr double kJacobiTolerance = 1e-10;
constexpr int kMaxSweeps = 64;

double off_diagonal_norm(const double a[3][3])
{
    return std::sqrt(2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]));
}

void rotate(double a[3][3], double v[3][3], int p, int q)
{
    const double apq = a[p][q];
    if (apq == 0.0) {
        return;
    }
    const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    for (int k = 0; k < 3; ++k) {
        const double akp = a[k][p];
        const double akq = a[k][q];
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
    }
    for (int k = 0; k < 3; ++k) {
        const double apk = a[p][k];
        const double aqk = a[q][k];
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    // Exact zero keeps the sweep from re-touching the annihilated element.
    a[p][q] = 0.0;
    a[q][p] = 0.0;

    for (int k = 0; k < 3; ++k) {
        const double vkp = v[k][p];
        const double vkq = v[k][q];
        v[k][p] = c * vkp - s * vkq;
        v[k][q] = s * vkp + c * vkq;
    }
}

}  // namespace

SymmetricEigen3 eigen_symmetric3(const std::array<double, 6>& u)
{
    double a[3][3] = {{u[0], u[1], u[2]}, {u[1], u[3], u[4]}, {u[2], u[4], u[5]}};
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    double frob = 0.0;
    for (const auto& row : a) {
        for (double e : row) {
            frob += e * e;
        }
    }
    frob = std::sqrt(frob);

    if (frob > 0.0) {
        bool converged = false;
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            rotate(a, v, 0, 1);
            rotate(a, v, 0, 2);
            rotate(a, v, 1, 2);
            if (converged) {
                break;  // one polishing sweep past the threshold
            }
            converged = off_diagonal_norm(a) <= kJacobiTolerance * frob;
        }
    }

    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });

    SymmetricEigen3 out{};
    for (int k = 0; k < 3; ++k) {
        const int i = order[k];
        out.values[k] = a[i][i];
        out.vectors[k] = normalized(Vec3{v[0][i], v[1][i], v[2][i]});
    }
    return out;
}

Vec3 smallest_axis(const std::array<double, 6>& covariance)
{
    const bool all_zero = std::all_of(covariance.begin(), covariance.end(), [](double e) { return e == 0.0; });
    if (all_zero) {
        return {0.0, 0.0, 1.0};
    }

    const SymmetricEigen3 eig = eigen_symmetric3(covariance);
    const double scale = std::max(std::abs(eig.values[0]), std::abs(eig.values[2]));
    Vec3 n = eig.vectors[0];

    if (eig.values[1] - eig.values[0] <= 1e-12 * scale) {
        // Degenerate pair: the highest-z direction inside their span.
        const Vec3& a = eig.vectors[0];
        const Vec3& b = eig.vectors[1];
        const Vec3 proj = a.z * a + b.z * b;
        if (norm(proj) > 1e-12) {
            n = normalized(proj);
        } else if (std::abs(b.z) > std::abs(a.z)) {
            n = b;
        }
    }

    if (n.z < 0.0) {
        n = -1.0 * n;
    }
    return n;
}

NormalField normals_covariance(const HeightField& hf, int radius)
{
    const int w = hf.width();
    const int h = hf.height();
    if (radius < 1) {
        throw std::invalid_argument("covariance radius must be at least 1");
    }
    if (w <= 2 * radius || h <= 2 * radius) {
        throw std::invalid_argument("height field too small for the covariance radius");
    }

    const double p = hf.pixel_pitch();
    const int side = 2 * radius + 1;
    const double count = static_cast<double>(side * side);
    NormalField normals(w, h);

    std::vector<Vec3> pts(static_cast<std::size_t>(side * side));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // Points are taken relative to the window center; covariance is
            // translation invariant and the offsets stay well conditioned.
            Vec3 mean{};
            std::size_t k = 0;
            for (int j = -radius; j <= radius; ++j) {
                const int yy = std::clamp(y + j, 0, h - 1);
                for (int i = -radius; i <= radius; ++i) {
                    const int xx = std::clamp(x + i, 0, w - 1);
                    const Vec3 q{(xx - x) * p, (yy - y) * p, hf.at(xx, yy) - hf.at(x, y)};
                    pts[k++] = q;
                    mean = mean + q;
                }
            }
            mean = (1.0 / count) * mean;

            std::array<double, 6> cov{};
            for (const Vec3& q : pts) {
                const Vec3 d = q - mean;
                cov[0] += d.x * d.x;
                cov[1] += d.x * d.y;
                cov[2] += d.x * d.z;
                cov[3] += d.y * d.y;
                cov[4] += d.y * d.z;
                cov[5] += d.z * d.z;
            }
            for (double& c : cov) {
                c /= count;
            }
            normals.at(x, y) = smallest_axis(cov);
        }
    }
    return normals;
}

}  // namespace stsim::geometry
