#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "hardylab/error.hpp"
#include "hardylab/grid_domain.hpp"

using namespace hardylab;

TEST_SUITE("grid_domain") {

TEST_CASE("interval layout") {
    const GridDomain d = build_domain(Shape::interval, 16);
    CHECK(d.n_interior() == 15);
    CHECK(d.n_boundary() == 2);
    CHECK(d.h == doctest::Approx(1.0 / 16));
    CHECK(d.interior[d.reference_node].x == doctest::Approx(0.5));
    CHECK(d.delta.front() == doctest::Approx(d.h));
    CHECK(d.perimeter() == doctest::Approx(2.0));
}

TEST_CASE("square layout and boundary ordering") {
    const GridDomain d = build_domain(Shape::square, 16);
    CHECK(d.n_interior() == 15 * 15);
    CHECK(d.n_boundary() == 64);
    CHECK(d.perimeter() == doctest::Approx(4.0));
    int inactive = 0;
    for (char a : d.boundary_active) inactive += !a;
    CHECK(inactive == 4);
    // Counter-clockwise: bottom edge first.
    CHECK(d.boundary[1].y == 0.0);
    CHECK(d.boundary[1].x == doctest::Approx(d.h));
    for (std::size_t b = 1; b < d.n_boundary(); ++b)
        CHECK(d.boundary_param[b] > d.boundary_param[b - 1]);
}

TEST_CASE("disk weights and distances") {
    const GridDomain d = build_domain(Shape::disk, 32);
    const double total = std::accumulate(d.surface_weights.begin(), d.surface_weights.end(), 0.0);
    CHECK(total == doctest::Approx(2 * std::numbers::pi));
    for (std::size_t i = 0; i < d.n_interior(); ++i) {
        const Point p = d.interior[i];
        CHECK(d.delta[i] == doctest::Approx(1 - std::hypot(p.x, p.y)));
        CHECK(d.delta[i] >= d.h - 1e-12);
    }
}

TEST_CASE("every link is symmetric or reaches the boundary") {
    for (auto [shape, n] : {std::pair{Shape::interval, 20}, {Shape::square, 12}, {Shape::disk, 20}}) {
        const GridDomain d = build_domain(shape, n);
        const int w = d.width();
        for (std::size_t i = 0; i < d.n_interior(); ++i)
            for (int k = 0; k < w; ++k) {
                const int v = d.links[i * w + k];
                if (v < 0) continue;
                const int back = k ^ 1;  // -x <-> +x, -y <-> +y
                CHECK(d.links[v * w + back] == static_cast<int>(i));
            }
    }
}

TEST_CASE("strips") {
    const GridDomain d = build_domain(Shape::square, 32);
    const Strip s = extract_strip(d, 2 * d.h);
    CHECK(s.total_weight() == doctest::Approx(4 * (1 - 4 * d.h)).epsilon(0.05));
    for (int i : s.nodes) CHECK(std::abs(d.delta[i] - 2 * d.h) < d.h);
    CHECK_THROWS_AS(extract_strip(d, 0.5 * d.h), LabError);
    CHECK_THROWS_AS(extract_strip(d, 0.49), LabError);
}

TEST_CASE("exhaustion invariants") {
    for (auto [shape, n] : {std::pair{Shape::interval, 64}, {Shape::square, 32}, {Shape::disk, 48}}) {
        const GridDomain d = build_domain(shape, n);
        const Exhaustion ex = build_exhaustion(d, 6);
        REQUIRE(ex.levels.size() == 6);
        for (std::size_t l = 0; l < ex.levels.size(); ++l) {
            const Subdomain& s = ex.levels[l];
            CHECK(s.member[d.reference_node]);
            if (l > 0) CHECK(s.nodes.size() > ex.levels[l - 1].nodes.size());
            const bool last = l + 1 == ex.levels.size();
            for (int v : s.outer) CHECK((v < 0) == last);
        }
        CHECK(ex.levels.back().nodes.size() == d.n_interior());
    }
    CHECK_THROWS_AS(build_exhaustion(build_domain(Shape::interval, 16), 8), LabError);
}

TEST_CASE("rejects bad grids") {
    CHECK_THROWS_AS(build_domain(Shape::interval, 4), LabError);
    CHECK_THROWS_AS(build_domain(Shape::square, 17), LabError);
    CHECK_THROWS_AS(parse_shape("torus"), LabError);
}

}
