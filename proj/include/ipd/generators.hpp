#ifndef IPD_GENERATORS_HPP
#define IPD_GENERATORS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"

namespace ipd {

using Vertex = std::array<double, 2>;
using Polygon = std::vector<Vertex>;

/// Signed shoelace area; positive for counter-clockwise vertex order.
inline double signed_area(const Polygon& poly) {
    double a = 0.0;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        a += poly[j][0] * poly[i][1] - poly[i][0] * poly[j][1];
    }
    return 0.5 * a;
}

/// Even-odd ray casting.
inline bool point_in_polygon(const Polygon& poly, double x, double y) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const double xi = poly[i][0], yi = poly[i][1];
        const double xj = poly[j][0], yj = poly[j][1];
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) {
            inside = !inside;
        }
    }
    return inside;
}

/**
 * k isotropic unit-variance 2-D Gaussian clusters. Means are uniform in
 * [0, box]^2 and resampled until every pair is at least min_sep apart.
 * Labels are the cluster index.
 */
inline Dataset generate_gaussian_blobs(std::size_t k, std::size_t per_cluster, double box, double min_sep,
                                       std::uint64_t seed) {
    if (k < 1 || per_cluster < 1) {
        throw InputError("k and per_cluster must be >= 1");
    }
    if (!(min_sep >= 0.0) || !(box > 0.0)) {
        throw InputError("box must be > 0 and min_sep >= 0");
    }
    constexpr int kAttemptsPerMean = 10000;
    constexpr int kRestarts = 50;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, box);
    std::vector<Vertex> means;
    for (int restart = 0; restart < kRestarts && means.size() < k; ++restart) {
        means.clear();
        while (means.size() < k) {
            bool placed = false;
            for (int attempt = 0; attempt < kAttemptsPerMean && !placed; ++attempt) {
                const Vertex m{uniform(rng), uniform(rng)};
                placed = std::all_of(means.begin(), means.end(), [&](const Vertex& o) {
                    return std::hypot(m[0] - o[0], m[1] - o[1]) >= min_sep;
                });
                if (placed) {
                    means.push_back(m);
                }
            }
            if (!placed) {
                break;
            }
        }
    }
    if (means.size() < k) {
        throw GenerationError("could not place " + std::to_string(k) + " means with separation " +
                              std::to_string(min_sep) + " in a box of side " + std::to_string(box));
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> coords;
    std::vector<Label> labels;
    coords.reserve(2 * k * per_cluster);
    labels.reserve(k * per_cluster);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < per_cluster; ++i) {
            coords.push_back(means[c][0] + normal(rng));
            coords.push_back(means[c][1] + normal(rng));
            labels.push_back(static_cast<Label>(c));
        }
    }
    return Dataset(2, std::move(coords), std::move(labels), "blobs");
}

/// Uniform fill of each polygon by rejection sampling in its bounding box. Labels are the polygon index.
inline Dataset generate_shapes(const std::vector<Polygon>& shapes, std::size_t per_shape, std::uint64_t seed) {
    if (shapes.empty()) {
        throw InputError("no shapes given");
    }
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        if (shapes[s].size() < 3 || std::abs(signed_area(shapes[s])) < 1e-12) {
            throw InputError("shape " + std::to_string(s) + " has zero area");
        }
    }
    std::mt19937_64 rng(seed);
    std::vector<double> coords;
    std::vector<Label> labels;
    coords.reserve(2 * shapes.size() * per_shape);
    labels.reserve(shapes.size() * per_shape);
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        const Polygon& poly = shapes[s];
        double xmin = poly[0][0], xmax = xmin, ymin = poly[0][1], ymax = ymin;
        for (const auto& v : poly) {
            xmin = std::min(xmin, v[0]);
            xmax = std::max(xmax, v[0]);
            ymin = std::min(ymin, v[1]);
            ymax = std::max(ymax, v[1]);
        }
        std::uniform_real_distribution<double> ux(xmin, xmax);
        std::uniform_real_distribution<double> uy(ymin, ymax);
        for (std::size_t i = 0; i < per_shape;) {
            const double x = ux(rng);
            const double y = uy(rng);
            if (point_in_polygon(poly, x, y)) {
                coords.push_back(x);
                coords.push_back(y);
                labels.push_back(static_cast<Label>(s));
                ++i;
            }
        }
    }
    return Dataset(2, std::move(coords), std::move(labels), "shapes");
}

namespace shapes {

inline Polygon ellipse(double cx, double cy, double rx, double ry, std::size_t n = 48) {
    Polygon p;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        p.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
    }
    return p;
}

inline Polygon star(double cx, double cy, double r_outer, double r_inner, std::size_t spikes) {
    Polygon p;
    for (std::size_t i = 0; i < 2 * spikes; ++i) {
        const double r = (i % 2 == 0) ? r_outer : r_inner;
        const double t = std::numbers::pi / 2.0 + std::numbers::pi * static_cast<double>(i) / static_cast<double>(spikes);
        p.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
    }
    return p;
}

// Sector of a ring between angles a0 < a1 (radians).
inline Polygon ring_sector(double cx, double cy, double r_in, double r_out, double a0, double a1,
                           std::size_t n = 40) {
    Polygon p;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = a0 + (a1 - a0) * static_cast<double>(i) / static_cast<double>(n);
        p.push_back({cx + r_out * std::cos(t), cy + r_out * std::sin(t)});
    }
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = a1 - (a1 - a0) * static_cast<double>(i) / static_cast<double>(n);
        p.push_back({cx + r_in * std::cos(t), cy + r_in * std::sin(t)});
    }
    return p;
}

// Horizontal band of constant thickness following a sine curve.
inline Polygon sine_band(double x0, double x1, double y, double amplitude, double thickness, std::size_t n = 60) {
    Polygon p;
    const double k = 2.0 * std::numbers::pi / (x1 - x0);
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n);
        p.push_back({x, y + amplitude * std::sin(k * (x - x0)) - thickness / 2.0});
    }
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = x1 - (x1 - x0) * static_cast<double>(i) / static_cast<double>(n);
        p.push_back({x, y + amplitude * std::sin(k * (x - x0)) + thickness / 2.0});
    }
    return p;
}

inline Polygon fish(double cx, double cy, double length) {
    // Oval body open at the back where a forked tail attaches; counter-clockwise from the nose.
    const double half = length / 2.0;
    const double rx = half * 0.7;
    const double ry = length * 0.22;
    Polygon p;
    const std::size_t n = 24;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = 0.9 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        p.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
    }
    p.push_back({cx - half, cy + length * 0.25});
    p.push_back({cx - half * 0.85, cy});
    p.push_back({cx - half, cy - length * 0.25});
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 1.1 * std::numbers::pi + 0.9 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        p.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
    }
    return p;
}

inline Polygon jellyfish(double cx, double cy, double width) {
    // Dome on top, zigzag tentacle fringe below.
    Polygon p;
    const double r = width / 2.0;
    const std::size_t n = 30;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        p.push_back({cx + r * std::cos(t), cy + r * 0.8 * std::sin(t)});
    }
    const int teeth = 5;
    const double step = width / teeth;
    for (int i = 0; i < teeth; ++i) {
        const double x = cx - r + step * i;
        p.push_back({x + step * 0.25, cy - r * 0.9});
        p.push_back({x + step * 0.5, cy - r * 0.9});
        p.push_back({x + step * 0.75, cy});
        p.push_back({x + step, cy});
    }
    p.pop_back();
    return p;
}

/**
 * Nine animal-like outlines laid out on a 3x3 grid inside [0, 100]^2 with
 * wide gaps between cells. Used to build large 2-D benchmark sets of
 * arbitrarily shaped, well-separated clusters.
 */
inline std::vector<Polygon> aquanimal_like() {
    constexpr double c0 = 16.0, c1 = 50.0, c2 = 84.0;
    return {
        fish(c0, c0, 28.0),
        star(c1, c0, 13.0, 5.5, 5),
        ring_sector(c2, c0, 7.0, 13.0, 0.35 * std::numbers::pi, 1.65 * std::numbers::pi),
        sine_band(c0 - 13.0, c0 + 13.0, c1, 6.0, 6.0),
        ellipse(c1, c1, 13.0, 7.0),
        jellyfish(c2, c1, 24.0),
        ring_sector(c0, c2, 5.0, 12.0, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi),
        star(c1, c2, 13.0, 7.0, 8),
        fish(c2, c2, 26.0),
    };
}

}  // namespace shapes

}  // namespace ipd

#endif  // IPD_GENERATORS_HPP
