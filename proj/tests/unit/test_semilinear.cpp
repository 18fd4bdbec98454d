#include <doctest.h>

#include <cmath>
#include <limits>

#include "hardylab/battery.hpp"
#include "hardylab/error.hpp"
#include "hardylab/semilinear.hpp"

using namespace hardylab;

namespace {

std::shared_ptr<Lab> lab_for(Shape s, int n, double gamma) {
    GridDomain d = build_domain(s, n);
    Potential v = build_hardy_potential(d, gamma, SingularSet::whole());
    return make_lab(std::move(d), std::move(v));
}

}  // namespace

TEST_SUITE("semilinear") {

TEST_CASE("nonlinearity factories") {
    const Nonlinearity p = Nonlinearity::power(3);
    CHECK(p(-2) == doctest::Approx(-8));
    CHECK(p.derivative(2) == doctest::Approx(12));
    CHECK(p.monotone());
    const Nonlinearity q = Nonlinearity::positive_power(2);
    CHECK(q(-1) == 0.0);
    CHECK(q.vanishes_on_nonpositive());
    CHECK(Nonlinearity::exponential()(1e-20) == doctest::Approx(1e-20));
    CHECK_THROWS_AS(Nonlinearity::power(0.5), LabError);
    CHECK_THROWS_AS(Nonlinearity::linear(-1), LabError);
}

TEST_CASE("truncation and reflection") {
    const Nonlinearity f = Nonlinearity::exponential();
    const Nonlinearity t = truncate(f, 4.0);
    CHECK(t(10) == 4.0);
    CHECK(t.derivative(10) == 0.0);
    CHECK(t(-100) == doctest::Approx(-1.0));
    CHECK(t.bounded());
    CHECK(t.bound() == 4.0);
    CHECK(*t.truncation_level() == 4.0);
    CHECK(truncate(t, 2.0)(10) == 2.0);
    const Nonlinearity r = reflect(f);
    CHECK(r(1.0) == doctest::Approx(1 - std::exp(-1.0)));
    CHECK(r.monotone());
    CHECK_FALSE(reflect(Nonlinearity::positive_power(3)).vanishes_on_nonpositive());
    CHECK(reflect(Nonlinearity::zero()).vanishes_on_nonpositive());
}

TEST_CASE("zero nonlinearity reproduces the linear solution") {
    auto lab = lab_for(Shape::disk, 32, 0.2);
    Rng rng(2);
    const InteriorMeasure t = random_interior(lab->dom(), rng, false);
    const BoundaryMeasure n = random_boundary(lab->dom(), rng, false);
    const SolveResult s = solve_bvp(*lab, Nonlinearity::zero(), t, n);
    CHECK(s.converged);
    CHECK(max_abs_diff(s.u, linear_solution(*lab, t, n)) <= 1e-12 * s.u.max_abs());
}

TEST_CASE("representation identity for converged solves") {
    for (auto [shape, n] : {std::pair{Shape::interval, 64}, {Shape::square, 24}, {Shape::disk, 32}}) {
        auto lab = lab_for(shape, n, 0.2);
        Rng rng(5);
        for (const Nonlinearity& f : {Nonlinearity::power(3), Nonlinearity::positive_power(2),
                                      truncate(Nonlinearity::exponential(), 50.0)}) {
            const InteriorMeasure t = random_interior(lab->dom(), rng, false);
            const BoundaryMeasure b = random_boundary(lab->dom(), rng, false);
            const SolveResult s = solve_bvp(*lab, f, t, b);
            REQUIRE(s.converged);
            CHECK(representation_residual(*lab, f, s.u, linear_solution(*lab, t, b)) <= 1e-9);
            // Differential form too.
            const auto r = lab->op->apply(s.u);
            const auto loads = t.loads(lab->vol());
            double worst = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                worst = std::max(worst, std::abs(r[i] + f(s.u.interior[i]) - loads[i]));
                scale = std::max(scale, std::abs(loads[i]) + std::abs(r[i]));
            }
            CHECK(worst <= 1e-8 * std::max(scale, 1.0 / (lab->dom().h * lab->dom().h)));
        }
    }
}

TEST_CASE("Newton and the damped fixed point agree") {
    auto lab = lab_for(Shape::interval, 32, 0.1);
    Rng rng(6);
    const InteriorMeasure t = random_interior(lab->dom(), rng, true);
    const BoundaryMeasure b = random_boundary(lab->dom(), rng, true);
    const Nonlinearity f = Nonlinearity::linear(0.5);
    SolveOptions fp;
    fp.solver = SolverKind::fixed_point;
    const SolveResult a = solve_bvp(*lab, f, t, b);
    const SolveResult c = solve_bvp(*lab, f, t, b, fp);
    REQUIRE(a.converged);
    REQUIRE(c.converged);
    CHECK(max_abs_diff(a.u, c.u) <= 1e-8 * a.u.max_abs());
    CHECK(parse_solver("fixed_point") == SolverKind::fixed_point);
    CHECK_THROWS_AS(parse_solver("multigrid"), LabError);
}

TEST_CASE("comparison principle") {
    auto lab = lab_for(Shape::square, 20, 0.2);
    Rng rng(8);
    const InteriorMeasure t = random_interior(lab->dom(), rng, true);
    const BoundaryMeasure b = random_boundary(lab->dom(), rng, true);
    const Nonlinearity f = Nonlinearity::positive_power(3);
    const SolveResult lo = solve_bvp(*lab, f, 0.5 * t, 0.5 * b);
    const SolveResult hi = solve_bvp(*lab, f, t, b);
    CHECK(compare_sub_super(lo.u, hi.u));
    CHECK_FALSE(compare_sub_super(hi.u, lo.u));
    // Solutions lie below the linear supersolution.
    CHECK(compare_sub_super(hi.u, linear_solution(*lab, t, b)));
}

TEST_CASE("non-finite nonlinearity values at the start name the node") {
    auto lab = lab_for(Shape::interval, 32, 0.0);
    const Nonlinearity bad("bad", [](double t) { return t > 0.5 ? std::numeric_limits<double>::quiet_NaN() : t; },
                           [](double) { return 1.0; }, false);
    SolveOptions o;
    o.initial = Field(lab->dom().n_interior(), 2);
    o.initial->interior[7] = 1.0;
    try {
        (void)solve_bvp(*lab, bad, InteriorMeasure(lab->dom().n_interior()), BoundaryMeasure(2), o);
        FAIL("expected an error");
    } catch (const LabError& e) {
        CHECK(e.stage() == Stage::solve);
        CHECK(std::string(e.what()).find("node 7") != std::string::npos);
    }
}

TEST_CASE("Kato inequality holds exactly on the stencil") {
    for (auto [shape, n] : {std::pair{Shape::interval, 64}, {Shape::square, 24}, {Shape::disk, 32}}) {
        for (double gamma : {-0.2, 0.2}) {
            auto lab = lab_for(shape, n, gamma);
            Rng rng(3);
            std::uniform_real_distribution<double> u(-1, 1);
            for (int k = 0; k < 20; ++k) {
                Field w(lab->dom().n_interior(), lab->dom().n_boundary());
                for (double& v : w.interior) v = u(rng);
                for (double& v : w.boundary) v = u(rng);
                const KatoReport r = kato_check(*lab->op, w);
                CHECK(r.worst_violation <= 0.0);
                CHECK(r.sign_change_nodes > 0);
            }
        }
    }
}

TEST_CASE("exhaustion solve matches the direct solve for bounded f") {
    for (auto [shape, n] : {std::pair{Shape::interval, 64}, {Shape::disk, 32}}) {
        auto lab = lab_for(shape, n, 0.2);
        Rng rng(10);
        const InteriorMeasure t = random_interior(lab->dom(), rng, true);
        const BoundaryMeasure b = random_boundary(lab->dom(), rng, true);
        const Nonlinearity f = truncate(Nonlinearity::power(3), 5.0);
        const Field w = linear_solution(*lab, t, b);
        const ExhaustionSolveResult e = solve_by_exhaustion(*lab, f, t, w, build_exhaustion(lab->dom(), 5));
        const SolveResult s = solve_bvp(*lab, f, t, b);
        CHECK(e.decreasing);
        CHECK(max_abs_diff(e.result.u, s.u) <= 1e-6 * s.u.max_abs());
        CHECK(e.levels.size() == 5);
    }
}

TEST_CASE("gradient proxy") {
    auto lab = lab_for(Shape::square, 32, 0.0);
    Field u(lab->dom().n_interior(), lab->dom().n_boundary());
    CHECK(interior_gradient_norm(lab->dom(), u) == 0.0);
    for (std::size_t i = 0; i < u.interior.size(); ++i) u.interior[i] = lab->dom().interior[i].x;
    CHECK(interior_gradient_norm(lab->dom(), u) > 0.0);
}

}
