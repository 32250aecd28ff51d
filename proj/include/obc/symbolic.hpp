#pragma once

#include <bit>
#include <cstdint>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "obc/dynamics.hpp"
#include "obc/geometry.hpp"
#include "obc/parallel.hpp"

namespace obc {

struct SubdivisionOptions {
    int disc_sides = 64;          // the trap disc is approximated by an inscribed n-gon
    double clip_scale = std::numbers::sqrt2; // disc radius = clip_scale * trap.r, circumscribing
                                             // the invariant sup-norm ball of radius trap.r
    double sliver_area_factor = 1e-14;       // cells below factor * trap.r^2 are dropped
    std::size_t max_cells = 10'000'000;
    int threads = 1;
};

// Domain of continuity of T^n together with the affine map T^n restricted to
// it: T^n(z) = scale * z + offset with scale = (-lambda)^n and offset equal to
// the branch translation of the itinerary. `region` lives in source
// coordinates, `image` is the forward image polygon scale*region + offset.
struct ContinuityCell {
    ConvexRegion region;
    ConvexRegion image;
    Itinerary itinerary;
    double scale;
    Point offset;
    std::uint64_t symbol_mask;
    int distinct_symbols;
};

struct LevelStats {
    int depth = 0;
    std::size_t kept = 0;
    std::size_t slivers = 0;         // dropped this level
    double sliver_area = 0.0;        // total source-coordinate area dropped this level
    int min_distinct_symbols = 0;    // over kept cells and just-dropped slivers
    std::vector<Point> sliver_offsets; // branch translations of the dropped cells
};

// Level-by-level construction of the continuity domains of T^n clipped to the
// trap disc. Children are generated in (parent order, ascending symbol)
// order, which keeps every level sorted lexicographically by itinerary.
class CellRefinement {
public:
    CellRefinement(MapParams params, TrapRadii trap, SubdivisionOptions opts = {})
        : params_(std::move(params)), trap_(trap), opts_(opts) {
        const long d = static_cast<long>(params_.polygon.size());
        if (d > 64) throw domain_error("ParameterOutOfRange", "subdivision supports at most 64 vertices");
        clip_region_ = inscribed_disc_polygon(opts_.clip_scale * trap_.r, opts_.disc_sides);
        sliver_threshold_ = opts_.sliver_area_factor * trap_.r * trap_.r;
        cone_planes_.reserve(static_cast<std::size_t>(d));
        for (long k = 1; k <= d; ++k) cone_planes_.push_back(cone_halfplanes(params_.polygon, k));

        stats_ = LevelStats{};
        stats_.depth = 1;
        stats_.min_distinct_symbols = 1;
        for (long k = 1; k <= d; ++k) {
            ConvexRegion region = clip(clip(clip_region_, cone_planes_[k - 1].first), cone_planes_[k - 1].second);
            if (region.empty()) continue;
            const double area = region_area(region);
            ContinuityCell cell;
            cell.itinerary = {static_cast<std::uint8_t>(k)};
            cell.scale = -params_.lambda;
            cell.offset = (1.0 + params_.lambda) * params_.polygon.vertex(k);
            cell.symbol_mask = 1ull << (k - 1);
            cell.distinct_symbols = 1;
            cell.image.reserve(region.size());
            for (const Point& z : region) cell.image.push_back(cell.scale * z + cell.offset);
            cell.region = std::move(region);
            if (area < sliver_threshold_) {
                ++stats_.slivers;
                stats_.sliver_area += area;
                stats_.sliver_offsets.push_back(cell.offset);
            } else {
                cells_.push_back(std::move(cell));
            }
        }
        stats_.kept = cells_.size();
        cumulative_sliver_area_ = stats_.sliver_area;
    }

    int depth() const { return stats_.depth; }
    const std::vector<ContinuityCell>& cells() const { return cells_; }
    const LevelStats& stats() const { return stats_; }
    const ConvexRegion& clip_region() const { return clip_region_; }
    const MapParams& params() const { return params_; }
    const TrapRadii& trap() const { return trap_; }
    // Source-coordinate area dropped as slivers across all levels so far.
    double cumulative_sliver_area() const { return cumulative_sliver_area_; }

    // Extends every cell by one symbol, splitting cells whose image straddles
    // several cones.
    void advance() {
        const long d = static_cast<long>(params_.polygon.size());
        const double lambda = params_.lambda;
        struct Dropped {
            Point offset;
            int distinct;
        };
        std::vector<std::vector<ContinuityCell>> buckets(cells_.size());
        std::vector<std::vector<Dropped>> dropped(cells_.size());
        std::vector<double> dropped_area(cells_.size(), 0.0);

        parallel_for(cells_.size(), opts_.threads, [&](std::size_t ci) {
            const ContinuityCell& cell = cells_[ci];
            const int last = cell.itinerary.back();
            for (long m = 1; m <= d; ++m) {
                if (m == last) continue; // consecutive reflections about one vertex are impossible
                ConvexRegion piece = clip(clip(cell.image, cone_planes_[m - 1].first), cone_planes_[m - 1].second);
                if (piece.empty()) continue;

                ContinuityCell child;
                child.itinerary = cell.itinerary;
                child.itinerary.push_back(static_cast<std::uint8_t>(m));
                child.scale = -lambda * cell.scale;
                child.offset = -lambda * cell.offset + (1.0 + lambda) * params_.polygon.vertex(m);
                child.symbol_mask = cell.symbol_mask | (1ull << (m - 1));
                child.distinct_symbols = static_cast<int>(std::popcount(child.symbol_mask));

                // The clipped image only selects the candidate cones; the
                // stored image is re-derived from the region so that
                // image == scale*region + offset holds exactly.
                child.region = cell.region;
                child.region = clip(child.region, pull_back(cone_planes_[m - 1].first, cell.scale, cell.offset));
                child.region = clip(child.region, pull_back(cone_planes_[m - 1].second, cell.scale, cell.offset));
                if (child.region.empty()) continue;
                child.image.reserve(child.region.size());
                for (const Point& z : child.region) child.image.push_back(child.scale * z + child.offset);
                const double area = region_area(child.region);
                if (area < sliver_threshold_) {
                    dropped[ci].push_back({child.offset, child.distinct_symbols});
                    dropped_area[ci] += area;
                } else {
                    buckets[ci].push_back(std::move(child));
                }
            }
        });

        std::vector<ContinuityCell> next;
        LevelStats stats;
        stats.depth = stats_.depth + 1;
        stats.min_distinct_symbols = static_cast<int>(d);
        for (std::size_t ci = 0; ci < buckets.size(); ++ci) {
            for (ContinuityCell& child : buckets[ci]) {
                stats.min_distinct_symbols = std::min(stats.min_distinct_symbols, child.distinct_symbols);
                next.push_back(std::move(child));
            }
            // Dropped slivers still carry admissible itineraries; keep them in
            // the diagnostics so the minima stay conservative.
            stats.slivers += dropped[ci].size();
            stats.sliver_area += dropped_area[ci];
            for (const Dropped& drop : dropped[ci]) {
                stats.sliver_offsets.push_back(drop.offset);
                stats.min_distinct_symbols = std::min(stats.min_distinct_symbols, drop.distinct);
            }
        }
        if (next.size() > opts_.max_cells)
            throw domain_error("DepthTooLarge", "cell count " + std::to_string(next.size()) +
                                                    " exceeds cap at depth " + std::to_string(stats.depth));
        stats.kept = next.size();
        cumulative_sliver_area_ += stats.sliver_area;
        cells_ = std::move(next);
        stats_ = std::move(stats);
    }

    // Halfplane {<n,w> >= c} in image coordinates, pulled back through
    // w = scale*z + offset into source coordinates.
    static HalfPlane pull_back(const HalfPlane& hp, double scale, Point offset) {
        const double c = hp.offset - dot(hp.normal, offset);
        if (scale > 0.0) return {hp.normal, c / scale};
        return {-hp.normal, -c / scale};
    }

private:
    MapParams params_;
    TrapRadii trap_;
    SubdivisionOptions opts_;
    ConvexRegion clip_region_;
    double sliver_threshold_;
    std::vector<std::pair<HalfPlane, HalfPlane>> cone_planes_;
    std::vector<ContinuityCell> cells_;
    LevelStats stats_;
    double cumulative_sliver_area_ = 0.0;
};

// All depth-n continuity domains intersected with the trap disc.
inline std::vector<ContinuityCell> subdivide(const MapParams& params, int depth, const TrapRadii& trap,
                                             SubdivisionOptions opts = {}) {
    if (depth < 1) throw domain_error("ParameterOutOfRange", "depth must be >= 1");
    CellRefinement engine(params, trap, opts);
    while (engine.depth() < depth) engine.advance();
    return engine.cells();
}

struct ItineraryCounts {
    std::vector<std::size_t> kept;       // #I_n from kept cells, n = 1..N
    std::vector<std::size_t> with_slivers; // kept + dropped at each depth
    std::vector<double> log_rate;        // (1/n) * log(kept[n])
    std::vector<int> min_distinct;       // min distinct symbols at each depth
    // Smallest depth at which every itinerary contains >= 3 distinct
    // symbols; 0 when not reached within N.
    int three_symbol_depth = 0;
};

inline ItineraryCounts itinerary_counts(const MapParams& params, int max_depth, const TrapRadii& trap,
                                        SubdivisionOptions opts = {}) {
    if (max_depth < 1) throw domain_error("ParameterOutOfRange", "depth must be >= 1");
    ItineraryCounts out;
    CellRefinement engine(params, trap, opts);
    for (int n = 1; n <= max_depth; ++n) {
        if (n > 1) engine.advance();
        const LevelStats& st = engine.stats();
        out.kept.push_back(st.kept);
        out.with_slivers.push_back(st.kept + st.slivers);
        out.log_rate.push_back(st.kept > 0 ? std::log(static_cast<double>(st.kept)) / n : 0.0);
        out.min_distinct.push_back(st.min_distinct_symbols);
        if (out.three_symbol_depth == 0 && st.kept > 0 && st.min_distinct_symbols >= 3)
            out.three_symbol_depth = n;
    }
    return out;
}

struct SingularSegment {
    Point a, b;
    int order; // points need order-1 iterations to land on the singular rays
};

namespace detail {

// Chord of the implicit line {<normal,z> = offset} inside a convex region,
// further restricted by extra halfplanes. Returns false when empty.
inline bool line_chord(const ConvexRegion& region, Point normal, double offset,
                       const std::vector<HalfPlane>& extra, Point& a, Point& b) {
    if (region.size() < 3) return false;
    const Point n_unit = normal / std::abs(normal);
    const double c_unit = offset / std::abs(normal);
    const Point base = region_centroid(region) + (c_unit - dot(n_unit, region_centroid(region))) * n_unit;
    const Point dir = perp(n_unit);
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    auto restrict_halfplane = [&](const HalfPlane& hp) {
        const double num = dot(hp.normal, base) - hp.offset;
        const double den = dot(hp.normal, dir);
        if (std::abs(den) < 1e-300) {
            if (num < 0.0) t_hi = t_lo - 1.0;
            return;
        }
        const double t = -num / den;
        if (den > 0.0) t_lo = std::max(t_lo, t);
        else t_hi = std::min(t_hi, t);
    };
    for (std::size_t i = 0; i < region.size(); ++i) {
        const Point p = region[i];
        const Point e = region[(i + 1) % region.size()] - p;
        const Point inward = perp(e);
        restrict_halfplane({inward, dot(inward, p)});
    }
    for (const HalfPlane& hp : extra) restrict_halfplane(hp);
    if (!(t_lo < t_hi)) return false;
    a = base + t_lo * dir;
    b = base + t_hi * dir;
    return true;
}

} // namespace detail

// The order-n singular set inside the trap disc: the d singular rays clipped
// to the disc, plus their preimages under the composed branch maps of every
// continuity domain of depth below n.
inline std::vector<SingularSegment> singular_set_order_n(const MapParams& params, int order, const TrapRadii& trap,
                                                         SubdivisionOptions opts = {}) {
    if (order < 1) throw domain_error("ParameterOutOfRange", "order must be >= 1");
    std::vector<SingularSegment> segments;
    const std::vector<SingularRay> rays = singular_rays(params.polygon);
    CellRefinement engine(params, trap, opts);
    const double min_length = 1e-12 * trap.r; // corner touches are not segments

    for (const SingularRay& ray : rays) {
        // Line through the ray with the ray-start halfplane.
        const Point n = perp(ray.direction);
        Point a, b;
        if (detail::line_chord(engine.clip_region(), n, dot(n, ray.origin),
                               {{ray.direction, dot(ray.direction, ray.origin)}}, a, b) &&
            std::abs(b - a) > min_length)
            segments.push_back({a, b, 1});
    }

    for (int depth = 1; depth < order; ++depth) {
        if (depth > 1) engine.advance();
        for (const ContinuityCell& cell : engine.cells()) {
            for (const SingularRay& ray : rays) {
                const Point n = perp(ray.direction);
                const HalfPlane line_as_floor = CellRefinement::pull_back({n, dot(n, ray.origin)}, cell.scale, cell.offset);
                const HalfPlane start = CellRefinement::pull_back({ray.direction, dot(ray.direction, ray.origin)},
                                                                  cell.scale, cell.offset);
                Point a, b;
                if (detail::line_chord(cell.region, line_as_floor.normal, line_as_floor.offset, {start}, a, b) &&
                    std::abs(b - a) > min_length)
                    segments.push_back({a, b, depth + 1});
            }
        }
    }
    return segments;
}

struct SingularConnectionReport {
    Itinerary itinerary;
    int side;        // 1-based side index k
    double residual; // |det(H - (1 - (-lambda)^L) v_k, v_{k+1} - v_k)|
};

// Determinant residual of the side-line return condition for an orbit
// segment with the given itinerary: a point on the line of side k comes back
// to that line after |itinerary| steps iff the residual vanishes.
inline double singular_connection_residual(const MapParams& params, std::span<const std::uint8_t> itinerary, int side) {
    const Point h = branch_translation(params, itinerary);
    double pw = 1.0;
    for (std::size_t i = 0; i < itinerary.size(); ++i) pw *= -params.lambda;
    const Point vk = params.polygon.vertex(side);
    const Point edge = params.polygon.vertex(side + 1) - vk;
    return std::abs(cross(h - (1.0 - pw) * vk, edge));
}

// The residual as a polynomial in lambda has coefficients
//   <v_{i_{n-1}} - v_k, eta_k>, <v_{i_{n-l-1}} - v_{i_{n-l}}, eta_k>,
//   <v_k - v_{i_0}, eta_k>
// up to the factor |edge_k|. Pairs for which every coefficient vanishes are
// structural degeneracies (a side line mapped into itself by the branches of
// its own endpoints), identically zero in lambda; they carry no parameter
// coincidence and are excluded from connection reports.
inline bool singular_connection_is_structural(const ConvexPolygon& poly, std::span<const std::uint8_t> itinerary,
                                              int side, double tol = 0.0) {
    const std::size_t n = itinerary.size();
    const Point eta = poly.side_normal(side);
    const double scale_tol = tol > 0.0 ? tol : 1e-12 * std::max(1.0, 2.0 * poly.max_vertex_modulus());
    double worst = std::abs(dot(poly.vertex(itinerary[n - 1]) - poly.vertex(side), eta));
    for (std::size_t l = 1; l + 1 <= n && worst <= scale_tol; ++l)
        worst = std::max(worst, std::abs(dot(poly.vertex(itinerary[n - l - 1]) - poly.vertex(itinerary[n - l]), eta)));
    worst = std::max(worst, std::abs(dot(poly.vertex(side) - poly.vertex(itinerary[0]), eta)));
    return worst <= scale_tol;
}

// Scans itineraries realized near the singular rays (one-sided nudges of
// sampled ray points, iterated) and reports all (itinerary prefix, side)
// pairs whose residual falls below tol. Generic parameters yield an empty
// report.
inline std::vector<SingularConnectionReport> detect_singular_connections(const MapParams& params, int n_max,
                                                                         double tol, const TrapRadii& trap,
                                                                         int seeds_per_ray = 128,
                                                                         SubdivisionOptions opts = {}) {
    if (n_max < 2) throw domain_error("ParameterOutOfRange", "n_max must be >= 2");
    CellRefinement engine(params, trap, opts); // for the clip region only
    const std::vector<SingularRay> rays = singular_rays(params.polygon);
    const double nudge = 1e-9 * std::max(1.0, params.polygon.sup_norm());

    std::set<Itinerary> seen;
    for (const SingularRay& ray : rays) {
        const Point n = perp(ray.direction);
        Point a, b;
        if (!detail::line_chord(engine.clip_region(), n, dot(n, ray.origin),
                                {{ray.direction, dot(ray.direction, ray.origin)}}, a, b))
            continue;
        for (int s = 0; s < seeds_per_ray; ++s) {
            const double t = (s + 0.5) / seeds_per_ray;
            const Point base = a + t * (b - a);
            for (const double side_sign : {+1.0, -1.0}) {
                const OrbitResult orb = orbit(params, base + side_sign * nudge * n, n_max);
                for (std::size_t len = 1; len <= orb.itinerary.size(); ++len)
                    seen.insert(Itinerary(orb.itinerary.begin(), orb.itinerary.begin() + static_cast<long>(len)));
            }
        }
    }

    std::vector<SingularConnectionReport> reports;
    for (const Itinerary& itin : seen)
        for (int k = 1; k <= static_cast<int>(params.polygon.size()); ++k) {
            if (singular_connection_is_structural(params.polygon, itin, k)) continue;
            const double res = singular_connection_residual(params, itin, k);
            if (res < tol) reports.push_back({itin, k, res});
        }
    return reports;
}

} // namespace obc
