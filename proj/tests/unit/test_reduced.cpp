#include <doctest.h>

#include "hardylab/battery.hpp"
#include "hardylab/error.hpp"
#include "hardylab/reduced.hpp"

using namespace hardylab;

namespace {

std::shared_ptr<Lab> lab_for(Shape s, int n, double gamma) {
    GridDomain d = build_domain(s, n);
    Potential v = build_hardy_potential(d, gamma, SingularSet::whole());
    return make_lab(std::move(d), std::move(v));
}

// Density plus an atom in the interior, atoms at both endpoints.
MeasureCouple atom_battery(const Lab& lab) {
    MeasureCouple c{InteriorMeasure(lab.dom().n_interior()), BoundaryMeasure(lab.dom().n_boundary())};
    for (std::size_t i = 0; i < c.tau.size(); ++i) c.tau.density[i] = 1.0 + lab.dom().interior[i].x;
    c.tau.add_atom(nearest_interior_node(lab.dom(), {0.3, 0.0}), 0.5);
    c.nu.masses.assign(c.nu.size(), 1.0);
    return c;
}

}  // namespace

TEST_SUITE("reduced") {

TEST_CASE("default schedule") {
    const auto s = default_schedule(4);
    CHECK(s == std::vector<double>{1, 2, 4, 8, 16});
}

TEST_CASE("schedule must be increasing") {
    auto lab = lab_for(Shape::interval, 32, 0.0);
    ReduceOptions o;
    o.schedule = {1, 4, 2};
    CHECK_THROWS_AS(reduced_boundary(*lab, Nonlinearity::power(2), BoundaryMeasure(2), o), LabError);
    o.schedule.clear();
    CHECK_THROWS_AS(reduced_boundary(*lab, Nonlinearity::power(2), BoundaryMeasure(2), o), LabError);
}

TEST_CASE("zero nonlinearity leaves the couple unchanged") {
    auto lab = lab_for(Shape::disk, 32, 0.2);
    Rng rng(1);
    const InteriorMeasure t = random_interior(lab->dom(), rng, true);
    const BoundaryMeasure n = random_boundary(lab->dom(), rng, true);
    const ReducedResult r = reduced_couple(*lab, Nonlinearity::zero(), t, n);
    CHECK(r.cauchy_ok);
    CHECK(max_abs_diff(r.u_sharp, linear_solution(*lab, t, n)) <= 1e-10 * r.u_sharp.max_abs());
    CHECK(total_variation_diff(r.nu_sharp, n) <= 1e-6 * total_variation(n));
    CHECK(weighted_distance(r.tau_sharp, t, lab->phi(), lab->vol()) <=
          1e-9 * weighted_norm(t, lab->phi(), lab->vol()));
}

TEST_CASE("bounded nonlinearity: every couple is good") {
    auto lab = lab_for(Shape::interval, 64, 0.2);
    const MeasureCouple c = atom_battery(*lab);
    const Nonlinearity f = truncate(Nonlinearity::power(3), 10.0);
    const ReducedResult r = reduced_couple(*lab, f, c.tau, c.nu);
    const SolveResult s = solve_bvp(*lab, f, c.tau, c.nu);
    CHECK(r.cauchy_ok);
    CHECK(r.monotone_ok);
    CHECK(r.bounds_ok);
    CHECK(max_abs_diff(r.u_sharp, s.u) <= 1e-7 * s.u.max_abs());
    CHECK(total_variation_diff(r.nu_sharp, c.nu) <= 1e-6 * total_variation(c.nu));
}

TEST_CASE("monotone scheme for a superlinear power") {
    auto lab = lab_for(Shape::interval, 64, 0.2);
    const MeasureCouple c = atom_battery(*lab);
    const ReducedResult r = reduced_couple(*lab, Nonlinearity::positive_power(3), c.tau, c.nu);
    CHECK(r.monotone_ok);
    CHECK(r.cauchy_ok);
    CHECK(r.bounds_ok);
    CHECK(r.representation_residual <= 1e-8);
    REQUIRE(r.per_level.size() >= 2);
    for (std::size_t k = 1; k < r.per_level.size(); ++k)
        CHECK(r.per_level[k].level > r.per_level[k - 1].level);
}

TEST_CASE("diffuse part is preserved exactly") {
    auto lab = lab_for(Shape::interval, 64, 0.2);
    const MeasureCouple c = atom_battery(*lab);
    const ReducedResult r = reduced_couple(*lab, Nonlinearity::positive_power(3), c.tau, c.nu);
    CHECK(r.tau_sharp.density == c.tau.density);
}

TEST_CASE("interior and boundary reductions are independent") {
    auto lab = lab_for(Shape::interval, 64, 0.2);
    const MeasureCouple c = atom_battery(*lab);
    const IndependenceReport r = verify_independence(*lab, Nonlinearity::positive_power(3), c.tau, c.nu);
    CHECK(r.pass);
    CHECK(r.nu_discrepancy <= 1e-6 * r.nu_norm);
    CHECK(r.tau_discrepancy <= 1e-6 * r.tau_norm);
}

TEST_CASE("lattice properties of the boundary reduction") {
    auto lab = lab_for(Shape::disk, 32, 0.1);
    Rng rng(12);
    const BoundaryMeasure nu = random_boundary(lab->dom(), rng, true);
    std::vector<std::vector<int>> subsets(2);
    for (int b = 0; b < static_cast<int>(lab->dom().n_boundary()); ++b) (b % 2 ? subsets[0] : subsets[1]).push_back(b);
    const LatticeReport r = verify_lattice(*lab, Nonlinearity::power(3), nu, subsets, 99, 24);
    CHECK(r.pass);
    CHECK(r.candidates >= 24);
    CHECK(r.certified >= 20);
    CHECK(r.restriction_violation <= 1e-6 * r.nu_norm);
}

TEST_CASE("signed reduction squeezes between the Jordan parts") {
    auto lab = lab_for(Shape::disk, 32, 0.2);
    Rng rng(21);
    const InteriorMeasure t = random_interior(lab->dom(), rng, false);
    const BoundaryMeasure n = random_boundary(lab->dom(), rng, false);
    auto [tp, tm] = jordan_split(t);
    auto [np, nm] = jordan_split(n);
    const Nonlinearity f = Nonlinearity::power(3);
    const SignedReport r = reduced_signed(*lab, f, t, n, {tm, tp, nm, np});
    CHECK(r.bounds_ok);
    CHECK(r.squeeze_ok);
    CHECK(r.sandwich_ok);
    CHECK(r.cauchy_ok);
    const GoodnessReport g =
        verify_sandwich_goodness(*lab, f, {r.tau_tilde, r.nu_tilde}, r.upper, r.lower);
    CHECK(g.pass);
    CHECK_THROWS_AS(reduced_signed(*lab, f, t, n, {tp, tm, np, nm}), LabError);
}

TEST_CASE("positive-part characterization") {
    auto lab = lab_for(Shape::interval, 64, 0.2);
    MeasureCouple c = atom_battery(*lab);
    c.nu.masses[1] = -2.0;
    c.tau.add_atom(nearest_interior_node(lab->dom(), {0.7, 0.0}), -1.0);
    const CharacterizationReport r =
        verify_positive_part_characterization(*lab, Nonlinearity::positive_power(3), c.tau, c.nu);
    CHECK(r.agreement);
    CHECK(r.negative_couple_good);
    CHECK(r.rows.size() == 5);
}

TEST_CASE("convergence of the clamped nonlinear terms and maximality") {
    auto lab = lab_for(Shape::interval, 64, 0.2);
    const MeasureCouple c = atom_battery(*lab);
    const Nonlinearity f = Nonlinearity::positive_power(3);
    const L1Report l = verify_L1_convergence(*lab, f, c.tau, c.nu);
    CHECK(l.converges);
    CHECK(l.good);
    const ReducedResult red = reduced_couple(*lab, f, c.tau, c.nu);
    const MaximalityReport m = verify_maximality(*lab, f, c.tau, c.nu, red);
    CHECK(m.maximal);
    CHECK(m.gate_agreement);
}

TEST_CASE("subcritical probe keeps the trace mass") {
    ProbeSpec s;
    s.n_cells = {16, 32};
    s.p = 1.1;
    const ProbeReport r = refinement_probe(s);
    REQUIRE(r.rows.size() == 2);
    for (const ProbeRow& row : r.rows) {
        CHECK(row.cauchy_ok);
        CHECK(row.layer_mass == doctest::Approx(1.0));
    }
    CHECK(r.relative_spread <= 0.05);
}

}
