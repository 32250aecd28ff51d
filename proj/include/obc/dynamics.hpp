#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "obc/geometry.hpp"

namespace obc {

// Itinerary symbols are 1-based cone indices.
using Itinerary = std::vector<std::uint8_t>;

struct MapParams {
    ConvexPolygon polygon;
    double lambda;

    MapParams(ConvexPolygon poly, double lam) : polygon(std::move(poly)), lambda(lam) {
        if (!(lam > 0.0 && lam < 1.0))
            throw domain_error("ParameterOutOfRange", "lambda must lie strictly in (0,1)");
    }
};

struct StepResult {
    enum class Status { Ok, SingularHit, EnteredPolygon };
    Status status;
    Point z;
    int cone; // 1-based, valid when status == Ok
};

// One application of the contracted outer billiard map:
//   z' = -lambda*z + (1+lambda)*v_k  =  v_k + lambda*(v_k - z)
// where v_k is the apex of the cone containing z.
inline StepResult step(const MapParams& params, Point z) {
    const ConeQuery q = cone_index(params.polygon, z);
    if (q.kind == ConeQuery::Kind::OnSingularSet) return {StepResult::Status::SingularHit, z, 0};
    if (q.kind == ConeQuery::Kind::InsidePolygon) return {StepResult::Status::EnteredPolygon, z, 0};
    const Point v = params.polygon.vertex(q.index);
    return {StepResult::Status::Ok, -params.lambda * z + (1.0 + params.lambda) * v, q.index};
}

struct OrbitResult {
    enum class Status { Completed, SingularHit, EnteredPolygonError };
    Status status;
    int stop_step; // step index at which iteration stopped (== n_steps when Completed)
    std::vector<Point> points; // points[0] == z0; one entry per completed step after that
    Itinerary itinerary;       // cone index consumed at each completed step
};

inline OrbitResult orbit(const MapParams& params, Point z0, int n_steps) {
    OrbitResult out{OrbitResult::Status::Completed, 0, {z0}, {}};
    out.points.reserve(static_cast<std::size_t>(n_steps) + 1);
    Point z = z0;
    for (int i = 0; i < n_steps; ++i) {
        const StepResult s = step(params, z);
        if (s.status == StepResult::Status::SingularHit) {
            out.status = OrbitResult::Status::SingularHit;
            out.stop_step = i;
            return out;
        }
        if (s.status == StepResult::Status::EnteredPolygon) {
            assert(false && "orbit entered the polygon from an exterior start");
            out.status = OrbitResult::Status::EnteredPolygonError;
            out.stop_step = i;
            return out;
        }
        z = s.z;
        out.points.push_back(z);
        out.itinerary.push_back(static_cast<std::uint8_t>(s.cone));
    }
    out.stop_step = n_steps;
    return out;
}

// Image of the origin under the branch maps of the itinerary:
//   H = (1+lambda) * sum_{j=0}^{n-1} (-lambda)^{n-j-1} * v_{i_j},
// evaluated by Horner's rule (apply branch i_0 first).
inline Point branch_translation(const MapParams& params, std::span<const std::uint8_t> itinerary) {
    Point h{0.0, 0.0};
    for (const std::uint8_t sym : itinerary)
        h = -params.lambda * h + (1.0 + params.lambda) * params.polygon.vertex(sym);
    return h;
}

// Endpoint of n branch applications along the given symbol sequence:
//   (-lambda)^n * z0 + H(itinerary).
inline Point orbit_closed_form(const MapParams& params, Point z0, std::span<const std::uint8_t> itinerary) {
    Point z = z0;
    for (const std::uint8_t sym : itinerary)
        z = -params.lambda * z + (1.0 + params.lambda) * params.polygon.vertex(sym);
    return z;
}

struct TrapRadii {
    double a; // contraction bound lambda + epsilon
    double b; // sup-norm vertex bound ||P|| + epsilon
    double r; // b*(1+a)/(1-a)^2
};

// Radii of the trapping region. The ball {max(|x|,|y|) <= r} is mapped into
// itself and contains the limit dynamics; epsilon widens the bounds to a
// parameter neighbourhood (epsilon = 0 gives the fixed-parameter radii).
inline TrapRadii trap_radii(const MapParams& params, double epsilon) {
    if (epsilon < 0.0) throw domain_error("ParameterOutOfRange", "epsilon must be nonnegative");
    const double a = params.lambda + epsilon;
    if (a >= 1.0) throw domain_error("ParameterOutOfRange", "lambda + epsilon must be below 1");
    const double b = params.polygon.sup_norm() + epsilon;
    return {a, b, b * (1.0 + a) / ((1.0 - a) * (1.0 - a))};
}

// Fixed point of T_j o T_k (branch k applied first); it lies on the line
// through the two vertices.
inline Point two_symbol_fixed_point(const MapParams& params, int k, int j) {
    if (k == j) throw domain_error("SameVertex", "two-symbol cycle needs distinct vertices");
    return (params.polygon.vertex(j) - params.lambda * params.polygon.vertex(k)) / (1.0 - params.lambda);
}

} // namespace obc
