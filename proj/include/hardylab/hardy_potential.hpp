#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hardylab/grid_domain.hpp"

namespace hardylab {

/// Compact subset E of the boundary on which the potential is singular.
struct SingularSet {
    enum class Kind { all, endpoints, arcs, nodes };
    Kind kind = Kind::all;
    std::vector<double> endpoints;                // interval: 0 and/or 1
    std::vector<std::pair<double, double>> arcs;  // boundary parameter ranges
    std::vector<int> nodes;                       // boundary node indices

    static SingularSet whole() { return {}; }
    static SingularSet at_endpoints(std::vector<double> e);
    static SingularSet on_arcs(std::vector<std::pair<double, double>> a);
    static SingularSet at_nodes(std::vector<int> n);
    std::string describe() const;
};

/// Boundary nodes belonging to E.
std::vector<int> singular_nodes(const GridDomain& d, const SingularSet& e);
/// dist(x_i, E) for every interior node.
std::vector<double> distance_to_set(const GridDomain& d, const SingularSet& e);

struct Potential {
    std::vector<double> values;
    double gamma = 0.0;
    SingularSet singular_set;
    double a_bar = 0.0;  // max |V| delta^2
};

Potential build_hardy_potential(const GridDomain& d, double gamma, const SingularSet& e);
/// Arbitrary nodal potential, a_bar computed from the values.
Potential make_potential(const GridDomain& d, std::vector<double> values);

struct A2Report {
    bool satisfied = false;
    double margin = 0.0;  // smallest eigenvalue of the quadratic-form pencil
    int iterations = 0;
};

A2Report check_A2(const GridDomain& d, const Potential& v);

struct HardyEstimate {
    double value = 0.0;
    double lower = 0.0;  // largest gamma known to pass
    double upper = 0.0;  // smallest gamma known to fail
    bool at_bracket_edge = false;
    int bisections = 0;
};

HardyEstimate estimate_hardy_constant(const GridDomain& d, const SingularSet& e,
                                      double gamma_lo = 0.0, double gamma_hi = 4.0,
                                      double rel_tol = 1e-3);

}  // namespace hardylab
