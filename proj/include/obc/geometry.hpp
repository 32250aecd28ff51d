#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "obc/errors.hpp"

namespace obc {

// Planar points are complex numbers; the billiard map is complex-affine.
using Point = std::complex<double>;

inline double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }
inline double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }
// Rotation by +90 degrees.
inline Point perp(Point a) { return {-a.imag(), a.real()}; }
inline double sqr_norm(Point a) { return dot(a, a); }
// Sup-norm on the plane: max(|x|, |y|).
inline double coord_norm(Point a) { return std::max(std::abs(a.real()), std::abs(a.imag())); }

// Half-line from `origin` in unit `direction`; these extend a polygon side
// beyond one of its endpoints and carry the discontinuities of the map.
struct SingularRay {
    Point origin;
    Point direction; // unit length
};

inline double distance_to_ray(const SingularRay& ray, Point z) {
    const Point w = z - ray.origin;
    const double along = dot(w, ray.direction);
    if (along <= 0.0) return std::abs(w);
    return std::abs(w - along * ray.direction);
}

// Strictly convex polygon, vertices in counter-clockwise order.
//
// Public indices are 1-based and cyclic: vertex(d+1) == vertex(1). Side j
// joins vertex j and vertex j+1; ray j extends side j beyond vertex j.
class ConvexPolygon {
public:
    static constexpr double kCollinearTol = 1e-12;

    // Validates convexity; clockwise input is reversed rather than rejected.
    static ConvexPolygon validate(std::vector<Point> pts) {
        if (pts.size() < 3)
            throw domain_error("TooFewVertices", "need at least 3 vertices, got " + std::to_string(pts.size()));
        double scale = 0.0;
        for (const Point& p : pts) scale = std::max(scale, coord_norm(p));
        scale = std::max(scale, 1.0);

        double area2 = 0.0;
        const std::size_t d = pts.size();
        for (std::size_t i = 0; i < d; ++i) area2 += cross(pts[i], pts[(i + 1) % d]);
        if (area2 < 0.0) std::reverse(pts.begin(), pts.end());

        const double tol = kCollinearTol * scale * scale;
        double turning = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const Point a = pts[i];
            const Point b = pts[(i + 1) % d];
            const Point c = pts[(i + 2) % d];
            const double turn = cross(b - a, c - b);
            if (std::abs(turn) <= tol)
                throw domain_error("DegenerateCollinear",
                                   "vertices " + std::to_string(i + 1) + ".." + std::to_string(i + 3) +
                                       " are collinear or repeated");
            if (turn < 0.0)
                throw domain_error("NotConvex", "right turn at vertex " + std::to_string(((i + 1) % d) + 1));
            turning += std::atan2(cross(b - a, c - b), dot(b - a, c - b));
        }
        // All-left-turns plus total turning 2*pi excludes self-winding input.
        if (std::abs(turning - 2.0 * M_PI) > 1e-9)
            throw domain_error("NotConvex", "vertex sequence winds more than once");
        return ConvexPolygon(std::move(pts));
    }

    std::size_t size() const { return vertices_.size(); }
    const std::vector<Point>& vertices() const { return vertices_; }

    // 1-based cyclic access: any integer k maps onto {1..d}.
    Point vertex(long k) const {
        const long d = static_cast<long>(vertices_.size());
        long i = (k - 1) % d;
        if (i < 0) i += d;
        return vertices_[static_cast<std::size_t>(i)];
    }

    // max over vertices of max(|x|,|y|); the norm used by the trap radii.
    double sup_norm() const {
        double m = 0.0;
        for (const Point& v : vertices_) m = std::max(m, coord_norm(v));
        return m;
    }

    // max over vertices of the euclidean modulus (>= sup_norm, <= sqrt(2)*sup_norm).
    double max_vertex_modulus() const {
        double m = 0.0;
        for (const Point& v : vertices_) m = std::max(m, std::abs(v));
        return m;
    }

    // Unit tangent of side j, pointing from vertex j to vertex j+1.
    Point side_tangent(long j) const {
        const Point e = vertex(j + 1) - vertex(j);
        return e / std::abs(e);
    }

    // Unit normal of side j: tangent rotated by +90 degrees (points into P).
    Point side_normal(long j) const { return perp(side_tangent(j)); }

    // z in the closed polygon, with an absolute slack on each edge line.
    bool contains(Point z, double slack = 0.0) const {
        const std::size_t d = vertices_.size();
        for (std::size_t i = 0; i < d; ++i) {
            const Point a = vertices_[i];
            const Point e = vertices_[(i + 1) % d] - a;
            if (cross(e, z - a) < -slack * std::abs(e)) return false;
        }
        return true;
    }

    double area() const {
        double area2 = 0.0;
        const std::size_t d = vertices_.size();
        for (std::size_t i = 0; i < d; ++i) area2 += cross(vertices_[i], vertices_[(i + 1) % d]);
        return 0.5 * area2;
    }

    // Default absolute tolerance for on-singular-set decisions.
    double singular_tolerance() const { return 1e-12 * std::max(1.0, sup_norm()); }

private:
    explicit ConvexPolygon(std::vector<Point> pts) : vertices_(std::move(pts)) {}
    std::vector<Point> vertices_;
};

// Ray k has origin vertex k and direction along vertex(k) - vertex(k+1).
inline std::vector<SingularRay> singular_rays(const ConvexPolygon& poly) {
    std::vector<SingularRay> rays;
    rays.reserve(poly.size());
    for (long k = 1; k <= static_cast<long>(poly.size()); ++k) {
        const Point dir = poly.vertex(k) - poly.vertex(k + 1);
        rays.push_back({poly.vertex(k), dir / std::abs(dir)});
    }
    return rays;
}

inline double distance_to_singular_set(const ConvexPolygon& poly, Point z) {
    double best = std::numeric_limits<double>::infinity();
    for (long k = 1; k <= static_cast<long>(poly.size()); ++k) {
        const Point dir = poly.vertex(k) - poly.vertex(k + 1);
        best = std::min(best, distance_to_ray({poly.vertex(k), dir / std::abs(dir)}, z));
    }
    return best;
}

struct ConeQuery {
    enum class Kind { Cone, OnSingularSet, InsidePolygon };
    Kind kind;
    int index; // 1-based cone index, valid when kind == Cone
};

// Locates the open cone containing z. The cone with apex vertex(k) is
// spanned by the directions vertex(k-1)-vertex(k) and vertex(k)-vertex(k+1):
//   z - v_k = s*(v_{k-1} - v_k) + t*(v_k - v_{k+1}),  s > 0, t > 0.
// Points within `tol` of a singular ray report OnSingularSet; points of the
// closed polygon report InsidePolygon (checked first).
inline ConeQuery cone_index(const ConvexPolygon& poly, Point z, std::optional<double> tol = std::nullopt) {
    const double eps = tol.value_or(poly.singular_tolerance());
    if (poly.contains(z, eps)) return {ConeQuery::Kind::InsidePolygon, 0};
    if (distance_to_singular_set(poly, z) <= eps) return {ConeQuery::Kind::OnSingularSet, 0};

    const long d = static_cast<long>(poly.size());
    int best_k = 0;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (long k = 1; k <= d; ++k) {
        const Point v = poly.vertex(k);
        const Point u = poly.vertex(k - 1) - v;
        const Point w = v - poly.vertex(k + 1);
        const double denom = cross(u, w); // positive for a strictly convex ccw polygon
        const double s = cross(z - v, w) / denom;
        const double t = cross(u, z - v) / denom;
        // Margin in length units so the best cone is picked robustly.
        const double margin = std::min(s * std::abs(u), t * std::abs(w));
        if (margin > best_margin) {
            best_margin = margin;
            best_k = static_cast<int>(k);
        }
    }
    if (best_margin <= 0.0) return {ConeQuery::Kind::OnSingularSet, 0};
    return {ConeQuery::Kind::Cone, best_k};
}

// Line through a pair of distinct vertices, identified by their 1-based ids.
struct VertexLine {
    int a, b;
    Point direction; // unit
};

struct GeneralPositionReport {
    bool ok;
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> parallel_pairs;
};

// A polygon is in general position when no two of the lines through vertex
// pairs (sides and diagonals) are parallel within angle_tol.
inline GeneralPositionReport general_position_check(const ConvexPolygon& poly, double angle_tol = 1e-9) {
    std::vector<VertexLine> lines;
    const int d = static_cast<int>(poly.size());
    for (int a = 1; a <= d; ++a)
        for (int b = a + 1; b <= d; ++b) {
            const Point e = poly.vertex(b) - poly.vertex(a);
            lines.push_back({a, b, e / std::abs(e)});
        }
    GeneralPositionReport report{true, {}};
    const double sin_tol = std::sin(std::min(angle_tol, M_PI / 2.0));
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j)
            if (std::abs(cross(lines[i].direction, lines[j].direction)) <= sin_tol) {
                report.ok = false;
                report.parallel_pairs.push_back({{lines[i].a, lines[i].b}, {lines[j].a, lines[j].b}});
            }
    return report;
}

// ---------------------------------------------------------------------------
// Convex clipping kernel used by the itinerary subdivision.

// Closed halfplane {z : <normal, z> >= offset}.
struct HalfPlane {
    Point normal;
    double offset;
};

// Convex polygon as a ccw vertex loop; empty vector means empty region.
using ConvexRegion = std::vector<Point>;

inline double region_area(const ConvexRegion& r) {
    if (r.size() < 3) return 0.0;
    double area2 = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) area2 += cross(r[i], r[(i + 1) % r.size()]);
    return 0.5 * area2;
}

inline Point region_centroid(const ConvexRegion& r) {
    Point c{0.0, 0.0};
    for (const Point& p : r) c += p;
    return c / static_cast<double>(r.size());
}

// Sutherland-Hodgman clip against a single halfplane.
inline ConvexRegion clip(const ConvexRegion& region, const HalfPlane& hp) {
    ConvexRegion out;
    const std::size_t n = region.size();
    if (n == 0) return out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = region[i];
        const Point b = region[(i + 1) % n];
        const double da = dot(hp.normal, a) - hp.offset;
        const double db = dot(hp.normal, b) - hp.offset;
        if (da >= 0.0) out.push_back(a);
        if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
            const double t = da / (da - db);
            out.push_back(a + t * (b - a));
        }
    }
    if (out.size() < 3) out.clear();
    return out;
}

// Signed distance from z to the region boundary, positive inside.
inline double region_interior_distance(const ConvexRegion& r, Point z) {
    if (r.size() < 3) return -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Point a = r[i];
        const Point e = r[(i + 1) % r.size()] - a;
        best = std::min(best, cross(e, z - a) / std::abs(e));
    }
    return best;
}

// Regular n-gon inscribed in the circle of radius `radius` about the origin.
// The half-step phase keeps vertices off the coordinate axes while preserving
// central symmetry for even n.
inline ConvexRegion inscribed_disc_polygon(double radius, int sides = 64) {
    ConvexRegion r;
    r.reserve(static_cast<std::size_t>(sides));
    for (int i = 0; i < sides; ++i) {
        const double ang = (2.0 * M_PI * i + M_PI) / sides;
        r.push_back(Point{radius * std::cos(ang), radius * std::sin(ang)});
    }
    return r;
}

// The two halfplanes whose intersection is the open cone with apex vertex(k).
inline std::pair<HalfPlane, HalfPlane> cone_halfplanes(const ConvexPolygon& poly, long k) {
    const Point v = poly.vertex(k);
    const Point u = poly.vertex(k - 1) - v;
    const Point w = v - poly.vertex(k + 1);
    const Point n1 = -perp(w) / std::abs(w); // s > 0 side
    const Point n2 = perp(u) / std::abs(u);  // t > 0 side
    return {HalfPlane{n1, dot(n1, v)}, HalfPlane{n2, dot(n2, v)}};
}

} // namespace obc
