#include <doctest.h>

#include "hardylab/battery.hpp"
#include "hardylab/error.hpp"
#include "hardylab/measures.hpp"

using namespace hardylab;

TEST_SUITE("measures") {

TEST_CASE("atoms are canonical") {
    InteriorMeasure t(10);
    t.add_atom(7, 1.0);
    t.add_atom(2, 0.5);
    t.add_atom(7, -0.25);
    REQUIRE(t.atoms.size() == 2);
    CHECK(t.atoms[0].node == 2);
    CHECK(t.atom_at(7) == doctest::Approx(0.75));
    const auto loads = t.loads(0.1);
    CHECK(loads[7] == doctest::Approx(7.5));
    CHECK(loads[0] == 0.0);
}

TEST_CASE("partial order") {
    InteriorMeasure a(4), b(4);
    a.density = {1, 2, 3, 4};
    b.density = {1, 2, 3, 4};
    b.add_atom(1, 0.5);
    CHECK(leq(a, b));
    CHECK_FALSE(leq(b, a));
    a.add_atom(1, 0.5 + 1e-12);
    CHECK_FALSE(leq(a, b));
    CHECK(leq(a, b, 1e-10));
    BoundaryMeasure n1(3), n2(3);
    n1.masses = {0, 1, 0};
    n2.masses = {0, 1, 2};
    CHECK(leq(n1, n2));
    CHECK(couple_leq({a, n1}, {b, n2}, 1e-10));
    CHECK_FALSE(couple_leq({b, n2}, {a, n1}));
}

TEST_CASE("jordan split") {
    const GridDomain d = build_domain(Shape::square, 16);
    Rng rng(3);
    for (int k = 0; k < 10; ++k) {
        const InteriorMeasure t = random_interior(d, rng, false);
        const auto [p, m] = jordan_split(t);
        const InteriorMeasure zero(d.n_interior());
        CHECK(leq(zero, p));
        CHECK(leq(zero, m));
        const InteriorMeasure back = p - m;
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(back.density[i] == t.density[i]);
            CHECK(p.density[i] * m.density[i] == 0.0);  // mutually singular
        }
        std::vector<double> one(d.n_interior(), 1.0);
        CHECK(weighted_norm(t, one, d.cell_volume()) ==
              doctest::Approx(weighted_norm(p, one, d.cell_volume()) + weighted_norm(m, one, d.cell_volume())));

        const BoundaryMeasure n = random_boundary(d, rng, false);
        const auto [np, nm] = jordan_split(n);
        CHECK(total_variation(n) == doctest::Approx(np.total_mass() + nm.total_mass()));
        CHECK(total_variation_diff(np - nm, n) == 0.0);
    }
}

TEST_CASE("diffuse and concentrated parts") {
    InteriorMeasure t(5);
    t.density = {1, 0, 2, 0, 1};
    t.add_atom(3, 4.0);
    const auto [diffuse, conc] = diffuse_concentrated_split(t);
    CHECK(diffuse.atoms.empty());
    CHECK(diffuse.density == t.density);
    CHECK(conc.atom_at(3) == 4.0);
    CHECK(conc.density == std::vector<double>(5, 0.0));
}

TEST_CASE("restriction and mismatches") {
    BoundaryMeasure n(4);
    n.masses = {1, 2, 3, 4};
    const std::vector<int> a{1, 3};
    const BoundaryMeasure r = restrict(n, a);
    CHECK(r.masses == std::vector<double>{0, 2, 0, 4});
    const std::vector<int> bad{9};
    CHECK_THROWS_AS(restrict(n, bad), LabError);
    CHECK_THROWS_AS(n + BoundaryMeasure(3), LabError);
}

TEST_CASE("random batteries are reproducible and signed as asked") {
    const GridDomain d = build_domain(Shape::disk, 24);
    Rng r1(42), r2(42);
    const InteriorMeasure a = random_interior(d, r1, true), b = random_interior(d, r2, true);
    CHECK(a.density == b.density);
    CHECK(leq(InteriorMeasure(d.n_interior()), a));
    const BoundaryMeasure n = random_boundary(d, r1, true);
    CHECK(leq(BoundaryMeasure(d.n_boundary()), n));
}

}
