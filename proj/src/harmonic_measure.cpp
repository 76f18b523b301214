#include "cauchy/harmonic_measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace cauchy {

IndicateField compute_indicate(const Grid2D& grid, const BoundaryPartition& partition, double tol,
                               SolverBackend backend, int exclusion_band) {
    if (!(partition.grid() == grid)) throw ValidationError("partition does not belong to the indicate grid");
    if (partition.gamma_sides().all()) {
        throw ValidationError("Gamma covers the whole boundary; tau == 1 is degenerate");
    }
    std::vector<double> data(partition.nodes().size(), 0.0);
    for (std::size_t p = 0; p < data.size(); ++p) data[p] = partition.gamma_mask()[p] ? 1.0 : 0.0;
    ScalarField tau = DirichletSolver(grid, tol, backend).solve(data);
    return IndicateField{std::move(tau), partition, exclusion_band};
}

namespace {

// Harmonic measure of the bottom side of the unit square at (s, t), with t
// the distance from that side.
double bottom_series(double s, double t, int terms) {
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int m = 0; m < terms; ++m) {
        const double k = 2.0 * m + 1.0;
        // sinh(k pi (1-t)) / sinh(k pi) without overflow.
        const double ratio = std::exp(-k * pi * t) * (-std::expm1(-2.0 * k * pi * (1.0 - t))) / (-std::expm1(-2.0 * k * pi));
        sum += 4.0 / (k * pi) * std::sin(k * pi * s) * ratio;
    }
    return sum;
}

}  // namespace

double rectangle_series_tau(double x, double y, SideSet sides, int terms) {
    if (terms < 50) throw ValidationError("rectangle_series_tau needs at least 50 terms");
    if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) {
        throw ValidationError("rectangle_series_tau requires a point in the open unit square");
    }
    double tau = 0.0;
    if (sides.contains(Side::bottom)) tau += bottom_series(x, y, terms);
    if (sides.contains(Side::top)) tau += bottom_series(x, 1.0 - y, terms);
    if (sides.contains(Side::left)) tau += bottom_series(y, x, terms);
    if (sides.contains(Side::right)) tau += bottom_series(y, 1.0 - x, terms);
    return tau;
}

double annulus_tau(double r, double big_r) {
    if (!(big_r > 1.0) || !(r >= 1.0 && r <= big_r)) {
        throw ValidationError("annulus_tau requires R > 1 and 1 <= r <= R");
    }
    return std::log(big_r / r) / std::log(big_r);
}

double two_constants_bound(double eps, double m, double tau) {
    if (!(eps > 0.0)) throw ValidationError("two_constants_bound requires eps > 0");
    if (eps > m) throw ValidationError("two_constants_bound requires eps <= M");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("two_constants_bound requires 0 <= tau <= 1");
    return std::pow(m, 1.0 - tau) * std::pow(eps, tau);
}

std::vector<bool> away_from_gamma_endpoints(const IndicateField& field) {
    const Grid2D& g = field.tau.grid();
    const BoundaryPartition& part = field.gamma;
    std::vector<Point2> ends;
    if (!part.gamma_closed()) {
        for (const auto& [b, e] : part.gamma_runs()) {
            for (std::size_t k : {b, e - 1}) {
                const BoundaryNode& nd = part.gamma_node(k);
                ends.push_back({g.x(nd.i), g.y(nd.j)});
            }
        }
    }
    const double limit = field.exclusion_band * g.h() * (1.0 - 1e-12);
    std::vector<bool> mask(g.size(), false);
    for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
            bool ok = true;
            for (const Point2& e : ends) {
                if (std::hypot(g.x(i) - e.x, g.y(j) - e.y) < limit) {
                    ok = false;
                    break;
                }
            }
            mask[g.index(i, j)] = ok;
        }
    }
    return mask;
}

std::size_t ReliableRegion::count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)); }

ReliableRegion reliable_region(const IndicateField& field, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0 + 1e-15)) {
        throw ValidationError("reliable_region threshold must lie in (0, 1]");
    }
    const auto tau = field.tau.values();
    ReliableRegion out;
    out.mask.resize(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k) out.mask[k] = tau[k] >= threshold;
    out.contour = extract_contour(field.tau, threshold);
    return out;
}

namespace {

struct Segment {
    std::size_t edge_a;
    std::size_t edge_b;
};

}  // namespace

LevelContour extract_contour(const ScalarField& field, double level) {
    const Grid2D& g = field.grid();
    const std::size_t nx = g.nx();
    LevelContour out;
    out.level = level;
    if (nx < 2 || g.ny() < 2) return out;

    // Edge ids: 2*node for the edge to the right, 2*node+1 for the edge upward.
    std::unordered_map<std::size_t, Point2> vertex;
    auto edge_point = [&](std::size_t id) {
        auto it = vertex.find(id);
        if (it != vertex.end()) return it->second;
        const std::size_t node = id / 2;
        const std::size_t i = node % nx;
        const std::size_t j = node / nx;
        const bool up = (id % 2) == 1;
        const std::size_t i2 = up ? i : i + 1;
        const std::size_t j2 = up ? j + 1 : j;
        const double va = field.at(i, j);
        const double vb = field.at(i2, j2);
        const double t = std::clamp((level - va) / (vb - va), 0.0, 1.0);
        Point2 p{g.x(i) + (up ? 0.0 : t * g.h()), g.y(j) + (up ? t * g.h() : 0.0)};
        vertex.emplace(id, p);
        return p;
    };

    std::vector<Segment> segs;
    for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double v00 = field.at(i, j);
            const double v10 = field.at(i + 1, j);
            const double v11 = field.at(i + 1, j + 1);
            const double v01 = field.at(i, j + 1);
            const int code = (v00 >= level ? 1 : 0) | (v10 >= level ? 2 : 0) | (v11 >= level ? 4 : 0) |
                             (v01 >= level ? 8 : 0);
            if (code == 0 || code == 15) continue;
            const std::array<std::size_t, 4> e{
                2 * g.index(i, j),            // bottom: 00-10
                2 * g.index(i + 1, j) + 1,    // right: 10-11
                2 * g.index(i, j + 1),        // top: 01-11
                2 * g.index(i, j) + 1,        // left: 00-01
            };
            const bool center_high = 0.25 * (v00 + v10 + v11 + v01) >= level;
            auto add = [&](int a, int b) { segs.push_back({e[static_cast<std::size_t>(a)], e[static_cast<std::size_t>(b)]}); };
            switch (code) {
                case 1: case 14: add(0, 3); break;
                case 2: case 13: add(0, 1); break;
                case 3: case 12: add(1, 3); break;
                case 4: case 11: add(1, 2); break;
                case 6: case 9: add(0, 2); break;
                case 7: case 8: add(2, 3); break;
                case 5:
                    if (center_high) { add(0, 1); add(2, 3); } else { add(0, 3); add(1, 2); }
                    break;
                case 10:
                    if (center_high) { add(0, 3); add(1, 2); } else { add(0, 1); add(2, 3); }
                    break;
                default: break;
            }
        }
    }

    std::unordered_map<std::size_t, std::vector<std::size_t>> by_edge;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        by_edge[segs[s].edge_a].push_back(s);
        by_edge[segs[s].edge_b].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);
    auto next_segment = [&](std::size_t edge, std::size_t from) -> std::size_t {
        for (std::size_t s : by_edge[edge]) {
            if (s != from && !used[s]) return s;
        }
        return segs.size();
    };
    auto other_end = [&](std::size_t s, std::size_t edge) { return segs[s].edge_a == edge ? segs[s].edge_b : segs[s].edge_a; };

    // Open chains start at edges touched once; remaining segments form loops.
    auto walk = [&](std::size_t s0, std::size_t start_edge) {
        std::vector<Point2> line{edge_point(start_edge)};
        std::size_t s = s0;
        std::size_t edge = start_edge;
        while (s < segs.size()) {
            used[s] = true;
            edge = other_end(s, edge);
            line.push_back(edge_point(edge));
            s = next_segment(edge, s);
        }
        out.polylines.push_back(std::move(line));
    };
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        for (std::size_t edge : {segs[s].edge_a, segs[s].edge_b}) {
            if (by_edge[edge].size() == 1) {
                walk(s, edge);
                break;
            }
        }
    }
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (!used[s]) walk(s, segs[s].edge_a);
    }
    return out;
}

double interpolate(const ScalarField& field, Point2 p) {
    const Grid2D& g = field.grid();
    const double fx = std::clamp((p.x - g.rect().x0) / g.h(), 0.0, static_cast<double>(g.nx() - 1));
    const double fy = std::clamp((p.y - g.rect().y0) / g.h(), 0.0, static_cast<double>(g.ny() - 1));
    const auto i = std::min(static_cast<std::size_t>(fx), g.nx() - 2);
    const auto j = std::min(static_cast<std::size_t>(fy), g.ny() - 2);
    const double tx = fx - static_cast<double>(i);
    const double ty = fy - static_cast<double>(j);
    return (1 - tx) * (1 - ty) * field.at(i, j) + tx * (1 - ty) * field.at(i + 1, j) + tx * ty * field.at(i + 1, j + 1) +
           (1 - tx) * ty * field.at(i, j + 1);
}

}  // namespace cauchy
