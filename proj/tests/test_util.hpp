#pragma once

// Shared test helpers: deterministic RNG corpora, random convex polygons,
// and brute-force oracles kept independent of the library code paths they
// check.

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "obc/dynamics.hpp"
#include "obc/geometry.hpp"
#include "obc/io.hpp"

namespace testutil {

using obc::ConvexPolygon;
using obc::Point;

inline ConvexPolygon skewed_triangle() {
    return ConvexPolygon::validate({{0.0, 0.0}, {1.0, 0.0}, {0.2, 0.9}});
}

inline ConvexPolygon parallelogram() {
    return ConvexPolygon::validate({{0.0, 0.0}, {1.0, 0.0}, {1.3, 0.5}, {0.3, 0.5}});
}

inline ConvexPolygon centered_square() {
    return ConvexPolygon::validate({{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}});
}

// Andrew monotone chain; strictly convex hull (collinear points dropped).
inline std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return {};
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && obc::cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && obc::cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

// Random strictly convex polygon with 3..8 vertices in [-1,1]^2.
inline ConvexPolygon random_polygon(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::uniform_int_distribution<int> n_pts(4, 9);
    for (;;) {
        std::vector<Point> pts;
        const int n = n_pts(rng);
        for (int i = 0; i < n; ++i) pts.push_back({coord(rng), coord(rng)});
        std::vector<Point> hull = convex_hull(std::move(pts));
        if (hull.size() < 3) continue;
        bool sharp = true;
        for (std::size_t i = 0; i < hull.size() && sharp; ++i) {
            const Point a = hull[i];
            const Point b = hull[(i + 1) % hull.size()];
            const Point c = hull[(i + 2) % hull.size()];
            if (obc::cross(b - a, c - b) < 1e-6) sharp = false;
        }
        if (!sharp) continue;
        return ConvexPolygon::validate(std::move(hull));
    }
}

// Random point outside the closed polygon, away from the singular rays, with
// sup-norm at most `extent`.
inline Point random_exterior_point(std::mt19937_64& rng, const ConvexPolygon& poly, double extent,
                                   double clearance = 1e-7) {
    std::uniform_real_distribution<double> coord(-extent, extent);
    for (;;) {
        const Point z{coord(rng), coord(rng)};
        if (poly.contains(z, 1e-9)) continue;
        if (obc::distance_to_singular_set(poly, z) < clearance) continue;
        return z;
    }
}

// Brute-force supporting-line classifier: for each vertex v_k, the line from
// z through v_k supports the polygon with the interior on the left iff every
// vertex sits on the left of (or on) that line. Exactly one vertex qualifies
// strictly for a generic exterior point; two qualify when z lies on a
// singular ray.
inline std::optional<int> oracle_cone_index(const ConvexPolygon& poly, Point z) {
    const long d = static_cast<long>(poly.size());
    std::vector<int> touching;
    for (long k = 1; k <= d; ++k) {
        const Point dir = poly.vertex(k) - z;
        bool all_left = true;
        for (long j = 1; j <= d && all_left; ++j) {
            if (j == k) continue;
            if (obc::cross(dir, poly.vertex(j) - z) < 0.0) all_left = false;
        }
        if (all_left) touching.push_back(static_cast<int>(k));
    }
    if (touching.size() == 1) return touching.front();
    return std::nullopt; // singular or interior configuration
}

// Distance oracle: dense sampling along each ray.
inline double oracle_distance_to_rays(const ConvexPolygon& poly, Point z, double reach, int samples = 200000) {
    double best = std::numeric_limits<double>::infinity();
    for (const obc::SingularRay& ray : obc::singular_rays(poly)) {
        for (int i = 0; i <= samples; ++i) {
            const Point p = ray.origin + (reach * i / samples) * ray.direction;
            best = std::min(best, std::abs(z - p));
        }
    }
    return best;
}

} // namespace testutil
