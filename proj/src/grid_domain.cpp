#include "hardylab/grid_domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "hardylab/error.hpp"

namespace hardylab {

Shape parse_shape(const std::string& s) {
    if (s == "interval") return Shape::interval;
    if (s == "square") return Shape::square;
    if (s == "disk") return Shape::disk;
    throw LabError(Stage::config, "unknown shape '" + s + "'");
}

const char* shape_name(Shape s) {
    switch (s) {
        case Shape::interval: return "interval";
        case Shape::square: return "square";
        case Shape::disk: return "disk";
    }
    return "?";
}

double GridDomain::perimeter() const {
    switch (shape) {
        case Shape::interval: return 2.0;
        case Shape::square: return 4.0;
        case Shape::disk: return 2.0 * std::numbers::pi;
    }
    return 0.0;
}

namespace {

void finish(GridDomain& d) {
    const auto ni = static_cast<std::int32_t>(d.n_interior());
    d.gather.resize(d.links.size());
    for (std::size_t k = 0; k < d.links.size(); ++k) {
        const std::int32_t v = d.links[k];
        d.gather[k] = v >= 0 ? v : ni + (-v - 1);
    }
    double best = 1e300;
    for (std::size_t i = 0; i < d.n_interior(); ++i) {
        const double dx = d.interior[i].x - d.center.x, dy = d.interior[i].y - d.center.y;
        const double r = dx * dx + dy * dy;
        if (r < best - 1e-14) {
            best = r;
            d.reference_node = static_cast<int>(i);
        }
    }
    // Corners of the square have no interior neighbour.
    d.boundary_active.assign(d.n_boundary(), 0);
    for (std::int32_t v : d.links)
        if (v < 0) d.boundary_active[-v - 1] = 1;
}

GridDomain make_interval(int n) {
    GridDomain d;
    d.shape = Shape::interval;
    d.dim = 1;
    d.n_cells = n;
    d.h = 1.0 / n;
    d.inradius = 0.5;
    d.center = {0.5, 0.0};
    for (int i = 1; i < n; ++i) {
        const double x = i * d.h;
        d.interior.push_back({x, 0.0});
        d.delta.push_back(std::min(x, 1.0 - x));
    }
    d.boundary = {{0.0, 0.0}, {1.0, 0.0}};
    d.boundary_foot = d.boundary;
    d.boundary_param = {0.0, 1.0};
    d.surface_weights = {1.0, 1.0};
    const int ni = n - 1;
    for (int i = 0; i < ni; ++i) {
        d.links.push_back(i == 0 ? -1 : i - 1);
        d.links.push_back(i == ni - 1 ? -2 : i + 1);
    }
    finish(d);
    return d;
}

GridDomain make_square(int n) {
    GridDomain d;
    d.shape = Shape::square;
    d.dim = 2;
    d.n_cells = n;
    d.h = 1.0 / n;
    d.inradius = 0.5;
    d.center = {0.5, 0.5};
    const int m = n - 1;
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            const double x = i * d.h, y = j * d.h;
            d.interior.push_back({x, y});
            d.delta.push_back(std::min({x, 1.0 - x, y, 1.0 - y}));
        }
    // Counterclockwise from the origin: bottom, right, top, left.
    for (int k = 0; k < n; ++k) d.boundary.push_back({k * d.h, 0.0});
    for (int k = 0; k < n; ++k) d.boundary.push_back({1.0, k * d.h});
    for (int k = 0; k < n; ++k) d.boundary.push_back({1.0 - k * d.h, 1.0});
    for (int k = 0; k < n; ++k) d.boundary.push_back({0.0, 1.0 - k * d.h});
    d.boundary_foot = d.boundary;
    for (int b = 0; b < 4 * n; ++b) {
        d.boundary_param.push_back(b * d.h);
        d.surface_weights.push_back(d.h);
    }
    auto bidx = [n](int i, int j) {
        if (j == 0) return i;
        if (i == n) return n + j;
        if (j == n) return 2 * n + (n - i);
        return 3 * n + (n - j);
    };
    auto at = [&](int i, int j) -> std::int32_t {
        if (i <= 0 || i >= n || j <= 0 || j >= n) return -(bidx(i, j) + 1);
        return (j - 1) * m + (i - 1);
    };
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            d.links.push_back(at(i - 1, j));
            d.links.push_back(at(i + 1, j));
            d.links.push_back(at(i, j - 1));
            d.links.push_back(at(i, j + 1));
        }
    finish(d);
    return d;
}

GridDomain make_disk(int n) {
    GridDomain d;
    d.shape = Shape::disk;
    d.dim = 2;
    d.n_cells = n;
    d.h = 2.0 / n;
    d.inradius = 1.0;
    d.center = {0.0, 0.0};
    const int side = n + 1;
    auto coord = [&](int i) { return -1.0 + i * d.h; };
    auto is_inside = [&](int i, int j) {
        if (i < 0 || j < 0 || i > n || j > n) return false;
        return 1.0 - std::hypot(coord(i), coord(j)) >= d.h - 1e-12;
    };
    std::vector<std::int32_t> id(side * side, -1);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (is_inside(i, j)) {
                id[j * side + i] = static_cast<std::int32_t>(d.interior.size());
                d.interior.push_back({coord(i), coord(j)});
                d.delta.push_back(1.0 - std::hypot(coord(i), coord(j)));
            }

    struct Cand {
        int i, j;
        double angle, r;
    };
    std::vector<Cand> cands;
    std::vector<char> seen(side * side, 0);
    const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (id[j * side + i] < 0) continue;
            for (int k = 0; k < 4; ++k) {
                const int a = i + di[k], b = j + dj[k];
                if (is_inside(a, b) || seen[b * side + a]) continue;
                seen[b * side + a] = 1;
                double ang = std::atan2(coord(b), coord(a));
                if (ang < 0) ang += 2.0 * std::numbers::pi;
                cands.push_back({a, b, ang, std::hypot(coord(a), coord(b))});
            }
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& p, const Cand& q) {
        if (p.angle != q.angle) return p.angle < q.angle;
        if (p.r != q.r) return p.r < q.r;
        return p.j * 100000 + p.i < q.j * 100000 + q.i;
    });
    std::vector<std::int32_t> bid(side * side, -1);
    for (std::size_t b = 0; b < cands.size(); ++b) {
        const auto& c = cands[b];
        bid[c.j * side + c.i] = static_cast<std::int32_t>(b);
        d.boundary.push_back({coord(c.i), coord(c.j)});
        d.boundary_param.push_back(c.angle);
        d.boundary_foot.push_back({std::cos(c.angle), std::sin(c.angle)});
    }
    const std::size_t nb = cands.size();
    d.surface_weights.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const double prev = b == 0 ? cands[nb - 1].angle - 2.0 * std::numbers::pi
                                   : cands[b - 1].angle;
        const double next = b + 1 == nb ? cands[0].angle + 2.0 * std::numbers::pi
                                        : cands[b + 1].angle;
        d.surface_weights[b] = 0.5 * (next - prev);
    }
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (id[j * side + i] < 0) continue;
            for (int k = 0; k < 4; ++k) {
                const int a = i + di[k], b = j + dj[k];
                const std::int32_t v = id[b * side + a];
                d.links.push_back(v >= 0 ? v : -(bid[b * side + a] + 1));
            }
        }
    finish(d);
    return d;
}

}  // namespace

GridDomain build_domain(Shape shape, int n_cells) {
    if (n_cells < 8)
        throw LabError(Stage::domain, "n_cells must be at least 8, got " + std::to_string(n_cells));
    if (shape != Shape::interval && n_cells % 2 != 0)
        throw LabError(Stage::domain, "2D grids need an even n_cells");
    switch (shape) {
        case Shape::interval: return make_interval(n_cells);
        case Shape::square: return make_square(n_cells);
        case Shape::disk: return make_disk(n_cells);
    }
    throw LabError(Stage::domain, "unreachable shape");
}

double Strip::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double min_strip_beta(const GridDomain& d) { return d.h; }
double max_strip_beta(const GridDomain& d) { return d.inradius / 2.0; }

Strip extract_strip(const GridDomain& d, double beta) {
    if (beta < d.h * (1.0 - 1e-12) || beta > max_strip_beta(d) * (1.0 + 1e-12))
        throw LabError(Stage::domain, "strip level " + std::to_string(beta) +
                                          " outside usable range [h, inradius/2]");
    const double dmin = *std::min_element(d.delta.begin(), d.delta.end());
    const double lo = std::max(beta - 0.5 * d.h, dmin);
    const double hi = beta + 0.5 * d.h;
    Strip s;
    s.beta = beta;
    const double w = d.cell_volume() / (hi - lo);
    for (std::size_t i = 0; i < d.n_interior(); ++i)
        if (d.delta[i] >= lo && d.delta[i] < hi) {
            s.nodes.push_back(static_cast<int>(i));
            s.weights.push_back(w);
        }
    if (s.nodes.empty())
        throw LabError(Stage::domain, "empty strip at beta = " + std::to_string(beta));
    return s;
}

Exhaustion build_exhaustion(const GridDomain& d, int levels) {
    if (levels < 2) throw LabError(Stage::domain, "exhaustion needs at least 2 levels");
    // Levels {delta > (m - 1/2) h} for distinct integers m from inradius/(2h) down to 3,
    // so consecutive levels differ by at least one layer of nodes.
    const int m_first = static_cast<int>(std::floor(d.inradius / (2.0 * d.h) + 1e-9));
    const int m_last = 3;
    std::vector<double> betas;
    int prev_m = std::numeric_limits<int>::max();
    for (int k = 0; k + 1 < levels; ++k) {
        const double t = levels == 2 ? 0.0 : static_cast<double>(k) / (levels - 2);
        const int m = static_cast<int>(std::lround(m_first * std::pow(double(m_last) / m_first, t)));
        if (m < m_last || m >= prev_m)
            throw LabError(Stage::domain, "grid too coarse for " + std::to_string(levels) +
                                              " exhaustion levels");
        prev_m = m;
        betas.push_back((m - 0.5) * d.h);
    }
    betas.push_back(0.0);

    const std::size_t ni = d.n_interior();
    const int w = d.width();
    Exhaustion ex;
    for (std::size_t lv = 0; lv < betas.size(); ++lv) {
        const double beta = betas[lv];
        Subdomain sd;
        sd.beta = beta;
        sd.member.assign(ni, 0);
        for (std::size_t i = 0; i < ni; ++i)
            if (beta == 0.0 || d.delta[i] > beta) {
                sd.member[i] = 1;
                sd.nodes.push_back(static_cast<int>(i));
            }
        if (sd.nodes.empty())
            throw LabError(Stage::domain, "empty exhaustion level at beta = " + std::to_string(beta));
        if (!sd.member[d.reference_node])
            throw LabError(Stage::domain, "reference node outside the first exhaustion level");
        for (int i : sd.nodes)
            for (int k = 0; k < w; ++k) {
                const std::int32_t v = d.links[i * w + k];
                if (v < 0 || !sd.member[v]) sd.outer.push_back(v);
            }
        std::sort(sd.outer.begin(), sd.outer.end());
        sd.outer.erase(std::unique(sd.outer.begin(), sd.outer.end()), sd.outer.end());
        if (!ex.levels.empty() && sd.nodes.size() <= ex.levels.back().nodes.size())
            throw LabError(Stage::domain, "exhaustion levels are not strictly increasing");
        if (lv + 1 < betas.size())
            for (std::int32_t v : sd.outer)
                if (v < 0) throw LabError(Stage::domain, "intermediate level touches the boundary");
        ex.levels.push_back(std::move(sd));
    }
    return ex;
}

}  // namespace hardylab
