#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "obc/symbolic.hpp"

namespace obc {

struct PeriodicAttractor {
    Itinerary itinerary; // minimal period, lexicographically minimal rotation
    int period;
    Point point;                    // fixed point of the composed branch map
    std::vector<Point> orbit_points; // point, T(point), ..., T^{p-1}(point)
    bool verified;                  // plain iteration reproduces the itinerary
    double drift;                   // |T^p(point) - point| from plain iteration
};

struct CertificationResult {
    enum class Status { Certified, Inconclusive };
    Status status = Status::Inconclusive;
    int depth = 0;
    double margin = 0.0;     // m(n) - 2*r*lambda^n at the certifying depth
    double min_distance = 0.0; // m(n)
    double threshold = 0.0;  // safety * 2 * r * lambda^n
    std::vector<PeriodicAttractor> attractors;
    std::string diagnostics;
};

namespace detail {

// Uniform-grid index over cell bounding boxes for point location.
class CellLocator {
public:
    CellLocator(const std::vector<ContinuityCell>& cells, const ConvexRegion& clip_region, int grid = 96)
        : cells_(cells), grid_(grid), buckets_(static_cast<std::size_t>(grid) * grid) {
        double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
        double hi_x = -lo_x, hi_y = -lo_x;
        for (const Point& p : clip_region) {
            lo_x = std::min(lo_x, p.real());
            lo_y = std::min(lo_y, p.imag());
            hi_x = std::max(hi_x, p.real());
            hi_y = std::max(hi_y, p.imag());
        }
        lo_ = {lo_x, lo_y};
        inv_step_ = {grid / std::max(hi_x - lo_x, 1e-300), grid / std::max(hi_y - lo_y, 1e-300)};
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
            double cx0 = std::numeric_limits<double>::infinity(), cy0 = cx0, cx1 = -cx0, cy1 = -cx0;
            for (const Point& p : cells[ci].region) {
                cx0 = std::min(cx0, p.real());
                cy0 = std::min(cy0, p.imag());
                cx1 = std::max(cx1, p.real());
                cy1 = std::max(cy1, p.imag());
            }
            const auto [ix0, iy0] = index_of({cx0, cy0});
            const auto [ix1, iy1] = index_of({cx1, cy1});
            for (int ix = ix0; ix <= ix1; ++ix)
                for (int iy = iy0; iy <= iy1; ++iy) buckets_[static_cast<std::size_t>(iy) * grid_ + ix].push_back(ci);
        }
    }

    // Cell whose interior contains z deepest; -1 when z is in no cell.
    int locate(Point z, double* interior_distance = nullptr) const {
        const auto [ix, iy] = index_of(z);
        int best = -1;
        double best_d = 0.0;
        for (const std::size_t ci : buckets_[static_cast<std::size_t>(iy) * grid_ + ix]) {
            const double d = region_interior_distance(cells_[ci].region, z);
            if (d > best_d) {
                best_d = d;
                best = static_cast<int>(ci);
            }
        }
        if (interior_distance) *interior_distance = best_d;
        return best;
    }

private:
    std::pair<int, int> index_of(Point z) const {
        int ix = static_cast<int>((z.real() - lo_.real()) * inv_step_.real());
        int iy = static_cast<int>((z.imag() - lo_.imag()) * inv_step_.imag());
        ix = std::clamp(ix, 0, grid_ - 1);
        iy = std::clamp(iy, 0, grid_ - 1);
        return {ix, iy};
    }

    const std::vector<ContinuityCell>& cells_;
    int grid_;
    Point lo_, inv_step_;
    std::vector<std::vector<std::size_t>> buckets_;
};

inline Itinerary minimal_rotation(const Itinerary& word) {
    Itinerary best = word;
    Itinerary rot = word;
    for (std::size_t s = 1; s < word.size(); ++s) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < best) best = rot;
    }
    return best;
}

inline int minimal_period(const Itinerary& word) {
    const int n = static_cast<int>(word.size());
    for (int p = 1; p <= n; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (int i = p; i < n && ok; ++i) ok = word[static_cast<std::size_t>(i)] == word[static_cast<std::size_t>(i - p)];
        if (ok) return p;
    }
    return n;
}

// Cycles of the cell -> cell map, where each cell's image polygon must lie
// strictly inside its successor. Throws NotStrictlyInside when an image
// straddles cells (the subdivision depth is too small).
inline std::vector<PeriodicAttractor> attractors_from_cells(const MapParams& params,
                                                            const std::vector<ContinuityCell>& cells,
                                                            const ConvexRegion& clip_region, double tol) {
    if (cells.empty()) return {};
    const CellLocator locator(cells, clip_region);
    std::vector<int> succ(cells.size(), -1);
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const int target = locator.locate(region_centroid(cells[ci].image));
        if (target < 0)
            throw domain_error("NotStrictlyInside", "image of cell " + std::to_string(ci) + " left the cell complex");
        for (const Point& w : cells[ci].image)
            if (region_interior_distance(cells[static_cast<std::size_t>(target)].region, w) <= tol)
                throw domain_error("NotStrictlyInside",
                                   "image of cell " + std::to_string(ci) + " is not strictly inside cell " +
                                       std::to_string(target));
        succ[ci] = target;
    }

    // Functional graph: follow successors, marking discovery times per walk.
    std::vector<int> state(cells.size(), 0); // 0 unvisited, 1 on stack, 2 done
    std::vector<int> order(cells.size(), -1);
    std::vector<PeriodicAttractor> attractors;
    std::vector<Itinerary> seen_keys;

    for (std::size_t start = 0; start < cells.size(); ++start) {
        if (state[start] != 0) continue;
        std::vector<std::size_t> path;
        std::size_t cur = start;
        while (state[cur] == 0) {
            state[cur] = 1;
            order[cur] = static_cast<int>(path.size());
            path.push_back(cur);
            cur = static_cast<std::size_t>(succ[cur]);
        }
        if (state[cur] == 1) {
            // New cycle: path[order[cur]..end].
            std::vector<std::size_t> cycle(path.begin() + order[cur], path.end());
            // Deterministic start: lexicographically smallest cell itinerary.
            std::size_t best = 0;
            for (std::size_t i = 1; i < cycle.size(); ++i)
                if (cells[cycle[i]].itinerary < cells[cycle[best]].itinerary) best = i;
            std::rotate(cycle.begin(), cycle.begin() + static_cast<long>(best), cycle.end());

            Itinerary word;
            for (const std::size_t ci : cycle)
                word.insert(word.end(), cells[ci].itinerary.begin(), cells[ci].itinerary.end());
            const int p = minimal_period(word);
            Itinerary reduced(word.begin(), word.begin() + p);
            reduced = minimal_rotation(reduced);

            const Itinerary key = reduced;
            if (std::find(seen_keys.begin(), seen_keys.end(), key) == seen_keys.end()) {
                seen_keys.push_back(key);
                PeriodicAttractor attr;
                attr.itinerary = reduced;
                attr.period = p;
                double pw = 1.0;
                for (int i = 0; i < p; ++i) pw *= -params.lambda;
                // Fixed point of the composed branch map (branch reduced[0]
                // applied first); its orbit follows the reduced word.
                attr.point = branch_translation(params, reduced) / (1.0 - pw);
                attr.orbit_points.resize(static_cast<std::size_t>(p));
                Point z = attr.point;
                attr.orbit_points[0] = z;
                for (int i = 0; i < p - 1; ++i) {
                    z = -params.lambda * z + (1.0 + params.lambda) * params.polygon.vertex(reduced[static_cast<std::size_t>(i)]);
                    attr.orbit_points[static_cast<std::size_t>(i + 1)] = z;
                }
                // Verify against plain iteration (cone classification included).
                attr.verified = true;
                attr.drift = std::numeric_limits<double>::infinity();
                Point w = attr.point;
                for (int i = 0; i < p; ++i) {
                    const StepResult s = step(params, w);
                    if (s.status != StepResult::Status::Ok ||
                        s.cone != static_cast<int>(reduced[static_cast<std::size_t>(i)])) {
                        attr.verified = false;
                        break;
                    }
                    w = s.z;
                }
                if (attr.verified) {
                    attr.drift = std::abs(w - attr.point);
                    if (attr.drift > 1e-6 * std::max(1.0, std::abs(attr.point))) attr.verified = false;
                }
                attractors.push_back(std::move(attr));
            }
        }
        for (const std::size_t ci : path) state[ci] = 2;
    }
    // Deterministic output order.
    std::sort(attractors.begin(), attractors.end(),
              [](const PeriodicAttractor& a, const PeriodicAttractor& b) { return a.itinerary < b.itinerary; });
    return attractors;
}

} // namespace detail

// Enumerates the periodic attractors from the depth-n cell complex. The
// caller normally certifies first; NotStrictlyInside signals that depth is
// too small for the cell graph to close up.
inline std::vector<PeriodicAttractor> enumerate_attractors(const MapParams& params, int depth, double tol = 0.0,
                                                           SubdivisionOptions opts = {}) {
    const TrapRadii trap = trap_radii(params, 0.0);
    CellRefinement engine(params, trap, opts);
    while (engine.depth() < depth) engine.advance();
    return detail::attractors_from_cells(params, engine.cells(), engine.clip_region(), tol);
}

// Covering certificate for asymptotic periodicity at the fixed parameters:
// at depth n every limit point lies within 2*r*lambda^n of some branch
// translation, so once those clear the singular rays by more than the
// covering radius the singular structure stops growing and every orbit is
// trapped by a periodic cycle. `safety` scales the distance requirement to
// absorb floating-point slack.
inline CertificationResult certify(const MapParams& params, int max_depth, double safety = 1.25,
                                   SubdivisionOptions opts = {}) {
    if (safety < 1.0) throw domain_error("ParameterOutOfRange", "safety factor must be >= 1");
    const TrapRadii trap = trap_radii(params, 0.0);
    CellRefinement engine(params, trap, opts);
    CertificationResult result;
    double cover = 2.0 * trap.r * params.lambda; // 2*r*lambda^n at n = 1
    std::string notes;

    for (int n = 1; n <= max_depth; ++n) {
        if (n > 1) {
            engine.advance();
            cover *= params.lambda;
        }
        double min_dist = std::numeric_limits<double>::infinity();
        for (const ContinuityCell& cell : engine.cells())
            min_dist = std::min(min_dist, distance_to_singular_set(params.polygon, cell.offset));
        for (const Point& h : engine.stats().sliver_offsets)
            min_dist = std::min(min_dist, distance_to_singular_set(params.polygon, h));

        result.depth = n;
        result.min_distance = min_dist;
        result.threshold = safety * cover;
        result.margin = min_dist - cover;
        if (!engine.cells().empty() && min_dist > safety * cover) {
            try {
                result.attractors =
                    detail::attractors_from_cells(params, engine.cells(), engine.clip_region(), 0.0);
                result.status = CertificationResult::Status::Certified;
                result.diagnostics = notes + "separation holds at depth " + std::to_string(n);
                return result;
            } catch (const domain_error& e) {
                // Margin cleared but some image still straddles cells; deepen.
                notes = std::string(e.what()) + " at depth " + std::to_string(n) + "; ";
            }
        }
    }
    result.status = CertificationResult::Status::Inconclusive;
    result.diagnostics = notes + "no separating depth found up to " + std::to_string(max_depth);
    return result;
}

struct BasinAssignment {
    enum class Outcome { Attractor, Singular, Unresolved, InsidePolygon };
    Outcome outcome;
    int index; // 0-based attractor index, valid when outcome == Attractor
    int steps; // iterations spent
};

// Iterates z0 until it lands within tol of some attractor orbit point.
inline BasinAssignment basin_assign(const MapParams& params, const std::vector<PeriodicAttractor>& attractors,
                                    Point z0, int max_iter, double tol) {
    if (attractors.empty()) throw domain_error("EmptyAttractorList", "basin assignment needs attractors");
    const double tol2 = tol * tol;
    Point z = z0;
    for (int it = 0; it <= max_iter; ++it) {
        for (std::size_t ai = 0; ai < attractors.size(); ++ai)
            for (const Point& w : attractors[ai].orbit_points)
                if (sqr_norm(z - w) < tol2)
                    return {BasinAssignment::Outcome::Attractor, static_cast<int>(ai), it};
        if (it == max_iter) break;
        const StepResult s = step(params, z);
        if (s.status == StepResult::Status::SingularHit) return {BasinAssignment::Outcome::Singular, -1, it};
        if (s.status == StepResult::Status::EnteredPolygon)
            return {BasinAssignment::Outcome::InsidePolygon, -1, it};
        z = s.z;
    }
    return {BasinAssignment::Outcome::Unresolved, -1, max_iter};
}

} // namespace obc
