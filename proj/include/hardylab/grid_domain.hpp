#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hardylab {

enum class Shape { interval, square, disk };

Shape parse_shape(const std::string& s);
const char* shape_name(Shape s);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct GridDomain {
    Shape shape = Shape::interval;
    int dim = 1;
    int n_cells = 0;
    double h = 0.0;
    double inradius = 0.0;
    Point center;

    std::vector<Point> interior;
    std::vector<Point> boundary;
    std::vector<double> delta;            // exact distance to the analytic boundary
    std::vector<double> surface_weights;  // per boundary node
    std::vector<double> boundary_param;   // arc parameter (angle on the disk)
    std::vector<Point> boundary_foot;     // nearest point of the analytic boundary
    std::vector<char> boundary_active;    // false for square corners (no interior link)
    int reference_node = 0;

    // 2*dim links per interior node in the order (-x, +x, -y, +y).
    // Value >= 0 is an interior index, value < 0 encodes boundary node -(v+1).
    std::vector<std::int32_t> links;
    // Same links rewritten as indices into [interior | boundary] vectors.
    std::vector<std::int32_t> gather;

    std::size_t n_interior() const { return interior.size(); }
    std::size_t n_boundary() const { return boundary.size(); }
    int width() const { return 2 * dim; }
    double cell_volume() const { return dim == 1 ? h : h * h; }
    double perimeter() const;
};

GridDomain build_domain(Shape shape, int n_cells);

struct Strip {
    double beta = 0.0;
    std::vector<int> nodes;
    std::vector<double> weights;

    double total_weight() const;
};

Strip extract_strip(const GridDomain& d, double beta);

/// Usable strip levels [h, inradius/2].
double min_strip_beta(const GridDomain& d);
double max_strip_beta(const GridDomain& d);

struct Subdomain {
    double beta = 0.0;    // D = {delta > beta}; 0 for the full grid
    std::vector<int> nodes;
    std::vector<char> member;
    // Outer boundary of D: interior nodes of the grid outside D that touch D,
    // or (final level) the grid boundary nodes. Encoded like GridDomain::links.
    std::vector<std::int32_t> outer;
};

struct Exhaustion {
    std::vector<Subdomain> levels;
};

/// Levels 1..L-1 are {delta > beta_n} with beta_n geometric from inradius/2 down
/// to about 2h; level L is the whole grid, so its boundary is the grid boundary.
Exhaustion build_exhaustion(const GridDomain& d, int levels);

}  // namespace hardylab
