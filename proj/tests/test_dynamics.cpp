#include <catch_amalgamated.hpp>

#include <random>

#include "obc/dynamics.hpp"
#include "obc/io.hpp"
#include "test_util.hpp"

using namespace obc;

TEST_CASE("map parameters require lambda in (0,1)") {
    CHECK_THROWS_AS(MapParams(unit_square(), 1.0), domain_error);
    CHECK_THROWS_AS(MapParams(unit_square(), 0.0), domain_error);
    CHECK_THROWS_AS(MapParams(unit_square(), 1.5), domain_error);
    CHECK_NOTHROW(MapParams(unit_square(), 0.5));
}

TEST_CASE("one step on the unit square") {
    const MapParams params(unit_square(), 0.5);
    const StepResult s = step(params, {0.5, -1.0});
    REQUIRE(s.status == StepResult::Status::Ok);
    CHECK(s.cone == 2);
    CHECK(std::abs(s.z - Point{1.25, 0.5}) < 1e-15);
}

TEST_CASE("a step contracts the distance to the chosen vertex by lambda") {
    std::mt19937_64 rng(81);
    for (const double lambda : {0.5, 1e-9}) {
        const MapParams params(testutil::random_polygon(rng), lambda);
        for (int i = 0; i < 300; ++i) {
            const Point z = testutil::random_exterior_point(rng, params.polygon, 4.0);
            const StepResult s = step(params, z);
            REQUIRE(s.status == StepResult::Status::Ok);
            const Point v = params.polygon.vertex(s.cone);
            CHECK(std::abs(s.z - v) == Catch::Approx(lambda * std::abs(z - v)).margin(1e-12));
        }
    }
}

TEST_CASE("contraction within a shared cone") {
    std::mt19937_64 rng(82);
    const MapParams params(unit_square(), 0.37);
    for (int i = 0; i < 2000; ++i) {
        const Point z1 = testutil::random_exterior_point(rng, params.polygon, 4.0);
        const Point z2 = testutil::random_exterior_point(rng, params.polygon, 4.0);
        const ConeQuery q1 = cone_index(params.polygon, z1);
        const ConeQuery q2 = cone_index(params.polygon, z2);
        if (q1.index != q2.index) continue;
        const StepResult s1 = step(params, z1);
        const StepResult s2 = step(params, z2);
        CHECK(std::abs(s1.z - s2.z) == Catch::Approx(params.lambda * std::abs(z1 - z2)).margin(1e-12));
    }
}

TEST_CASE("orbit of three steps matches hand substitution") {
    const MapParams params(unit_square(), 0.5);
    const OrbitResult orb = orbit(params, {0.5, -1.0}, 3);
    REQUIRE(orb.status == OrbitResult::Status::Completed);
    REQUIRE(orb.points.size() == 4);
    // z1 = -0.5*(0.5,-1) + 1.5*v2 = (1.25, 0.5); z1 is in cone 3 (apex (1,1));
    // z2 = -0.5*z1 + 1.5*(1,1) = (0.875, 1.25); z2 is in cone 4 (apex (0,1));
    // z3 = -0.5*z2 + 1.5*(0,1) = (-0.4375, 0.875).
    CHECK(std::abs(orb.points[1] - Point{1.25, 0.5}) < 1e-15);
    CHECK(std::abs(orb.points[2] - Point{0.875, 1.25}) < 1e-15);
    CHECK(std::abs(orb.points[3] - Point{-0.4375, 0.875}) < 1e-15);
    CHECK(orb.itinerary == Itinerary{2, 3, 4});
}

TEST_CASE("zero-step orbit is the identity") {
    const MapParams params(unit_square(), 0.5);
    const OrbitResult orb = orbit(params, {2.0, 2.0}, 0);
    CHECK(orb.status == OrbitResult::Status::Completed);
    CHECK(orb.points == std::vector<Point>{{2.0, 2.0}});
    CHECK(orb.itinerary.empty());
}

TEST_CASE("orbit on a singular start reports the hit") {
    const MapParams params(unit_square(), 0.5);
    const OrbitResult orb = orbit(params, {-1.0, 0.0}, 5);
    CHECK(orb.status == OrbitResult::Status::SingularHit);
    CHECK(orb.stop_step == 0);
}

#ifdef NDEBUG
TEST_CASE("an interior start is reported, not silently stepped") {
    const MapParams params(unit_square(), 0.5);
    CHECK(step(params, {0.5, 0.5}).status == StepResult::Status::EnteredPolygon);
    const OrbitResult orb = orbit(params, {0.5, 0.5}, 5);
    CHECK(orb.status == OrbitResult::Status::EnteredPolygonError);
    CHECK(orb.stop_step == 0);
}
#endif

TEST_CASE("central symmetry conjugates orbits through the antipode") {
    const MapParams params(testutil::centered_square(), 0.6);
    std::mt19937_64 rng(83);
    for (int i = 0; i < 200; ++i) {
        const Point z0 = testutil::random_exterior_point(rng, params.polygon, 5.0);
        const OrbitResult a = orbit(params, z0, 12);
        const OrbitResult b = orbit(params, -z0, 12);
        if (a.status != OrbitResult::Status::Completed || b.status != OrbitResult::Status::Completed) continue;
        REQUIRE(a.points.size() == b.points.size());
        for (std::size_t t = 0; t < a.points.size(); ++t)
            CHECK(std::abs(a.points[t] + b.points[t]) < 1e-12);
        // Itineraries differ by the half-turn relabeling k -> k + d/2.
        for (std::size_t t = 0; t < a.itinerary.size(); ++t) {
            const int shifted = ((a.itinerary[t] - 1 + 2) % 4) + 1;
            CHECK(static_cast<int>(b.itinerary[t]) == shifted);
        }
    }
}

TEST_CASE("closed form matches iteration") {
    std::mt19937_64 rng(84);
    std::uniform_real_distribution<double> lam(0.05, 0.95);
    std::uniform_int_distribution<int> steps(1, 50);
    for (int trial = 0; trial < 2000; ++trial) {
        const MapParams params(testutil::random_polygon(rng), lam(rng));
        const TrapRadii trap = trap_radii(params, 0.0);
        const Point z0 = testutil::random_exterior_point(rng, params.polygon, 2.0);
        const OrbitResult orb = orbit(params, z0, steps(rng));
        if (orb.itinerary.empty()) continue;
        const Point endpoint = orbit_closed_form(params, z0, orb.itinerary);
        CHECK(std::abs(endpoint - orb.points.back()) < 1e-9 * trap.r);
    }
}

TEST_CASE("single-symbol closed form is one step") {
    const MapParams params(unit_square(), 0.5);
    const Itinerary one{2};
    CHECK(std::abs(orbit_closed_form(params, {0.5, -1.0}, one) - Point{1.25, 0.5}) < 1e-15);
}

TEST_CASE("branch translation identities") {
    const MapParams params(unit_square(), 0.4);
    const Itinerary single{3};
    CHECK(std::abs(branch_translation(params, single) - 1.4 * Point{1.0, 1.0}) < 1e-15);

    // H is the image of the origin under the composed branches.
    std::mt19937_64 rng(85);
    std::uniform_int_distribution<int> sym(1, 4);
    for (int trial = 0; trial < 200; ++trial) {
        Itinerary itin;
        for (int i = 0; i < 12; ++i) itin.push_back(static_cast<std::uint8_t>(sym(rng)));
        CHECK(std::abs(branch_translation(params, itin) - orbit_closed_form(params, {0.0, 0.0}, itin)) == 0.0);

        // Appending a symbol applies one more branch.
        Itinerary longer = itin;
        longer.push_back(2);
        const Point expect = -params.lambda * branch_translation(params, itin) +
                             (1.0 + params.lambda) * params.polygon.vertex(2);
        CHECK(std::abs(branch_translation(params, longer) - expect) < 1e-15);
    }
}

TEST_CASE("branch translations are bounded by the trap radius") {
    std::mt19937_64 rng(86);
    std::uniform_real_distribution<double> lam(0.05, 0.95);
    std::uniform_int_distribution<int> len(1, 60);
    for (int trial = 0; trial < 1000; ++trial) {
        const MapParams params(testutil::random_polygon(rng), lam(rng));
        const TrapRadii trap = trap_radii(params, 0.0);
        std::uniform_int_distribution<int> sym(1, static_cast<int>(params.polygon.size()));
        Itinerary itin;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) itin.push_back(static_cast<std::uint8_t>(sym(rng)));
        const Point h = branch_translation(params, itin);
        // Sup-norm bound b*(1+a)/(1-a) <= r.
        CHECK(coord_norm(h) <= trap.b * (1.0 + trap.a) / (1.0 - trap.a) + 1e-9);
        CHECK(coord_norm(h) <= trap.r + 1e-9);
    }
}

TEST_CASE("trap radii formula and monotonicity") {
    const MapParams params(unit_square(), 0.5);
    const TrapRadii t0 = trap_radii(params, 0.0);
    CHECK(t0.a == 0.5);
    CHECK(t0.b == 1.0);
    CHECK(t0.r == Catch::Approx(6.0));

    const TrapRadii t1 = trap_radii(params, 0.1);
    CHECK(t1.a == Catch::Approx(0.6));
    CHECK(t1.b == Catch::Approx(1.1));
    CHECK(t1.r > t0.r);

    CHECK_THROWS_AS(trap_radii(params, 0.5), domain_error);
    CHECK_THROWS_AS(trap_radii(params, -0.1), domain_error);
}

TEST_CASE("the sup-norm ball of radius r traps the dynamics") {
    std::mt19937_64 rng(87);
    std::uniform_real_distribution<double> lam(0.05, 0.95);
    for (int pi = 0; pi < 10; ++pi) {
        const MapParams params(testutil::random_polygon(rng), lam(rng));
        const TrapRadii trap = trap_radii(params, 0.0);
        std::uniform_real_distribution<double> coord(-trap.r, trap.r);
        for (int i = 0; i < 1000; ++i) {
            const Point z{coord(rng), coord(rng)};
            const StepResult s = step(params, z);
            if (s.status != StepResult::Status::Ok) continue;
            CHECK(coord_norm(s.z) <= trap.r * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("similarity equivariance") {
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> scale(0.3, 3.0);
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const ConvexPolygon poly = testutil::random_polygon(rng);
        const MapParams params(poly, 0.55);
        const Point rot = std::polar(scale(rng), angle(rng));
        const Point offset{shift(rng), shift(rng)};
        auto g = [&](Point z) { return rot * z + offset; };

        std::vector<Point> mapped;
        for (const Point& v : poly.vertices()) mapped.push_back(g(v));
        const MapParams conj(ConvexPolygon::validate(std::move(mapped)), 0.55);

        const Point z = testutil::random_exterior_point(rng, poly, 4.0);
        const StepResult s = step(params, z);
        const StepResult sg = step(conj, g(z));
        REQUIRE(s.status == StepResult::Status::Ok);
        REQUIRE(sg.status == StepResult::Status::Ok);
        CHECK(std::abs(g(s.z) - sg.z) < 1e-10 * std::max(1.0, std::abs(rot)));
    }
}

TEST_CASE("two-symbol fixed point") {
    const MapParams params(unit_square(), 0.5);
    CHECK(std::abs(two_symbol_fixed_point(params, 1, 2) - Point{2.0, 0.0}) < 1e-15);
    CHECK_THROWS_AS(two_symbol_fixed_point(params, 2, 2), domain_error);

    // Collinearity with the two vertices, and the small-lambda limit.
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 200; ++trial) {
        const ConvexPolygon poly = testutil::random_polygon(rng);
        const int d = static_cast<int>(poly.size());
        std::uniform_int_distribution<int> pick(1, d);
        const int k = pick(rng);
        int j = pick(rng);
        if (j == k) j = (j % d) + 1;
        const MapParams p(poly, 0.3);
        const Point x = two_symbol_fixed_point(p, k, j);
        CHECK(std::abs(cross(x - poly.vertex(k), poly.vertex(j) - poly.vertex(k))) < 1e-12);

        const MapParams tiny(poly, 1e-12);
        CHECK(std::abs(two_symbol_fixed_point(tiny, k, j) - poly.vertex(j)) < 1e-9);
    }
}
