#include "hardylab/battery.hpp"

#include <cmath>
#include <numbers>

namespace hardylab {

namespace {

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

int pick(Rng& rng, std::size_t n) {
    return static_cast<int>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
}

}  // namespace

InteriorMeasure random_interior(const GridDomain& d, Rng& rng, bool positive, int max_atoms) {
    InteriorMeasure t(d.n_interior());
    // Low-frequency trigonometric density; the signed variant may change sign.
    const double pi = std::numbers::pi;
    const double a0 = uniform(rng, 0.2, 1.0);
    const double a1 = uniform(rng, -0.5, 0.5), a2 = uniform(rng, -0.5, 0.5);
    const double k1 = 1 + pick(rng, 3), k2 = 1 + pick(rng, 3);
    const double shift = positive ? 0.0 : uniform(rng, -1.2, 0.2);
    for (std::size_t i = 0; i < d.n_interior(); ++i) {
        const Point p = d.interior[i];
        double v = a0 + shift + a1 * std::cos(k1 * pi * p.x) + a2 * std::sin(k2 * pi * (p.x + p.y));
        if (positive) v = std::abs(v);
        t.density[i] = v;
    }
    const int na = max_atoms > 0 ? pick(rng, max_atoms + 1) : 0;
    for (int k = 0; k < na; ++k) {
        const int node = pick(rng, d.n_interior());
        double m = uniform(rng, 0.2, 1.0);
        if (!positive && uniform(rng, 0.0, 1.0) < 0.5) m = -m;
        t.add_atom(node, m);
    }
    return t;
}

BoundaryMeasure random_boundary(const GridDomain& d, Rng& rng, bool positive, int max_atoms) {
    BoundaryMeasure nu(d.n_boundary());
    const double c = uniform(rng, 0.0, 0.5);
    for (std::size_t b = 0; b < d.n_boundary(); ++b)
        if (d.boundary_active[b]) nu.masses[b] = c * d.surface_weights[b];
    const int na = 1 + (max_atoms > 1 ? pick(rng, max_atoms) : 0);
    for (int k = 0; k < na; ++k) {
        int b = pick(rng, d.n_boundary());
        while (!d.boundary_active[b]) b = (b + 1) % static_cast<int>(d.n_boundary());
        double m = uniform(rng, 0.2, 1.0);
        if (!positive && uniform(rng, 0.0, 1.0) < 0.5) m = -m;
        nu.masses[b] += m;
    }
    return nu;
}

int nearest_interior_node(const GridDomain& d, Point p) {
    int best = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < d.n_interior(); ++i) {
        const double r = std::hypot(d.interior[i].x - p.x, d.interior[i].y - p.y);
        if (r < bd - 1e-14) {
            bd = r;
            best = static_cast<int>(i);
        }
    }
    return best;
}

int nearest_boundary_node(const GridDomain& d, Point p) {
    int best = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < d.n_boundary(); ++i) {
        const double r = std::hypot(d.boundary[i].x - p.x, d.boundary[i].y - p.y);
        if (r < bd - 1e-14) {
            bd = r;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace hardylab
