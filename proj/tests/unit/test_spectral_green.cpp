#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hardylab/battery.hpp"
#include "hardylab/error.hpp"
#include "hardylab/spectral_green.hpp"

using namespace hardylab;

namespace {

std::shared_ptr<Lab> lab_for(Shape s, int n, double gamma, LabOptions opts = {}) {
    GridDomain d = build_domain(s, n);
    Potential v = build_hardy_potential(d, gamma, SingularSet::whole());
    return make_lab(std::move(d), std::move(v), opts);
}

constexpr double pi = std::numbers::pi;

}  // namespace

TEST_SUITE("spectral_green") {

TEST_CASE("discrete Dirichlet eigenvalues") {
    for (int n : {32, 128}) {
        auto lab = lab_for(Shape::interval, n, 0.0);
        const double h = 1.0 / n;
        CHECK(lab->spectral.lambda == doctest::Approx(4 / (h * h) * std::pow(std::sin(pi * h / 2), 2)).epsilon(1e-9));
        for (std::size_t i = 0; i < lab->dom().n_interior(); ++i)
            CHECK(lab->spectral.phi[i] == doctest::Approx(std::sin(pi * lab->dom().interior[i].x)).epsilon(1e-7));
    }
    auto sq = lab_for(Shape::square, 32, 0.0);
    const double h = 1.0 / 32;
    CHECK(sq->spectral.lambda == doctest::Approx(8 / (h * h) * std::pow(std::sin(pi * h / 2), 2)).epsilon(1e-9));
    CHECK(lab_for(Shape::interval, 128, 0.0)->spectral.lambda == doctest::Approx(pi * pi).epsilon(0.01));
    CHECK(lab_for(Shape::square, 64, 0.0)->spectral.lambda == doctest::Approx(2 * pi * pi).epsilon(0.02));
}

TEST_CASE("ground state normalisation and positivity") {
    auto lab = lab_for(Shape::disk, 48, 0.2);
    CHECK(lab->spectral.phi[lab->dom().reference_node] == 1.0);
    for (double p : lab->spectral.phi) CHECK(p > 0);
    CHECK(lab->spectral.lambda > 0);
}

TEST_CASE("fitted decay exponent approaches the indicial root") {
    // Phi ~ delta^alpha with alpha (1 - alpha) = gamma, larger root.
    for (double gamma : {-0.2, 0.1, 0.2}) {
        auto lab = lab_for(Shape::interval, 2048, gamma);
        const double root = (1 + std::sqrt(1 - 4 * gamma)) / 2;
        CHECK(std::abs(lab->spectral.alpha_fit - root) < 0.025);
    }
    auto coarse = lab_for(Shape::interval, 128, 0.2);
    auto fine = lab_for(Shape::interval, 2048, 0.2);
    const double root = (1 + std::sqrt(1 - 0.8)) / 2;
    CHECK(std::abs(fine->spectral.alpha_fit - root) < std::abs(coarse->spectral.alpha_fit - root));
}

TEST_CASE("B1 and B2 hold for subcritical gamma") {
    auto lab = lab_for(Shape::interval, 256, 0.2);
    const B1B2Report r = check_B1_B2(lab->dom(), lab->spectral);
    CHECK(r.b1_holds);
    CHECK(r.b2_window);
    CHECK_FALSE(r.near_critical);
}

TEST_CASE("inadmissible potentials are rejected") {
    GridDomain d = build_domain(Shape::interval, 64);
    Potential v = build_hardy_potential(d, 2.0, SingularSet::whole());
    CHECK_THROWS_AS(make_lab(std::move(d), std::move(v)), LabError);
}

TEST_CASE("Green function of the interval") {
    auto lab = lab_for(Shape::interval, 40, 0.0);
    const GridDomain& d = lab->dom();
    for (int j : {3, 20, 31}) {
        InteriorMeasure t(d.n_interior());
        t.add_atom(j, 1.0);
        const Field g = lab->green->apply(t);
        const double y = d.interior[j].x;
        for (std::size_t i = 0; i < d.n_interior(); ++i) {
            const double x = d.interior[i].x;
            CHECK(g.interior[i] == doctest::Approx(std::min(x, y) * (1 - std::max(x, y))).epsilon(1e-10));
        }
        for (double b : g.boundary) CHECK(b == 0.0);
    }
}

TEST_CASE("dense Green operator agrees with the factorization") {
    LabOptions o;
    o.dense_green = true;
    auto lab = lab_for(Shape::square, 16, 0.1, o);
    REQUIRE(lab->green->dense() != nullptr);
    Rng rng(1);
    const InteriorMeasure t = random_interior(lab->dom(), rng, false);
    const Field g = lab->green->apply(t);
    const auto loads = t.loads(lab->vol());
    const Eigen::VectorXd ref = *lab->green->dense() * Eigen::Map<const Eigen::VectorXd>(loads.data(), loads.size());
    for (std::size_t i = 0; i < g.interior.size(); ++i) CHECK(g.interior[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("Martin kernel of the interval") {
    auto lab = lab_for(Shape::interval, 40, 0.0);
    const GridDomain& d = lab->dom();
    const Field k0 = lab->martin->column(0);  // boundary node at x = 0
    for (std::size_t i = 0; i < d.n_interior(); ++i)
        CHECK(k0.interior[i] == doctest::Approx(2 * (1 - d.interior[i].x)).epsilon(1e-12));
    CHECK(k0.interior[d.reference_node] == doctest::Approx(1.0));
    CHECK(lab->martin->omega()[0] == doctest::Approx(0.5));
    const std::vector<double> row = lab->martin->row(5);
    CHECK(row[0] == doctest::Approx(k0.interior[5]).epsilon(1e-12));
}

TEST_CASE("Martin columns are positive, harmonic and normalised") {
    auto lab = lab_for(Shape::disk, 32, 0.2);
    const GridDomain& d = lab->dom();
    for (int y : {0, 17, 60}) {
        const Field k = lab->martin->column(y);
        CHECK(k.interior[d.reference_node] == doctest::Approx(1.0));
        for (double v : k.interior) CHECK(v > 0);
        const auto r = lab->op->apply(k);
        for (double v : r) CHECK(std::abs(v) < 1e-8 * k.max_abs() / (d.h * d.h));
    }
}

TEST_CASE("square corners carry no harmonic measure") {
    auto lab = lab_for(Shape::square, 16, 0.0);
    const auto& d = lab->dom();
    double total = 0.0;
    for (std::size_t b = 0; b < d.n_boundary(); ++b) {
        if (!d.boundary_active[b]) CHECK(lab->martin->omega()[b] == 0.0);
        total += lab->martin->omega()[b];
    }
    CHECK(total == doctest::Approx(1.0));
    const Field kc = lab->martin->column(0);
    CHECK(kc.interior[d.reference_node] == doctest::Approx(1.0));
}

TEST_CASE("weighted estimates") {
    for (auto [shape, n] : {std::pair{Shape::interval, 128}, {Shape::disk, 48}}) {
        auto lab = lab_for(shape, n, 0.2);
        const WeightedEstimatesReport r = verify_weighted_estimates(*lab, 3, 8);
        CHECK(r.green_ratio_min > 0);
        CHECK(r.martin_ratio_min > 0);
        CHECK(r.martin_ratio_max / r.martin_ratio_min < 2.0);
        CHECK(r.green_strip_decays);
        CHECK(r.zero_data_integral == 0.0);
    }
}

TEST_CASE("geometric levels") {
    const auto g = geometric_levels(1.0, 16.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g[2] == doctest::Approx(4.0));
}

}
