#pragma once

// Random measure generators for the property batteries.

#include <random>

#include "hardylab/grid_domain.hpp"
#include "hardylab/measures.hpp"

namespace hardylab {

using Rng = std::mt19937_64;

/// Smooth random density plus up to `max_atoms` atoms. Nonnegative when `positive`.
InteriorMeasure random_interior(const GridDomain& d, Rng& rng, bool positive, int max_atoms = 3);
/// Random atoms on up to `max_atoms` active boundary nodes plus a uniform part.
BoundaryMeasure random_boundary(const GridDomain& d, Rng& rng, bool positive, int max_atoms = 3);
/// Interior atom at the node nearest to p.
int nearest_interior_node(const GridDomain& d, Point p);
int nearest_boundary_node(const GridDomain& d, Point p);

}  // namespace hardylab
