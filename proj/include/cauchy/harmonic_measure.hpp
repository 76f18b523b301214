#pragma once

#include <vector>

#include "cauchy/grid.hpp"
#include "cauchy/poisson_fdm.hpp"

namespace cauchy {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Discrete harmonic measure of Gamma: tau = 1 on Gamma nodes (endpoints
/// included), 0 on the rest of the boundary, discrete harmonic inside.
struct IndicateField {
    ScalarField tau;
    BoundaryPartition gamma;
    /// Node layers around Gamma endpoints excluded from oracle comparisons.
    int exclusion_band = 3;
};

IndicateField compute_indicate(const Grid2D& grid, const BoundaryPartition& partition, double tol = kDefaultSolverTol,
                               SolverBackend backend = SolverBackend::cg, int exclusion_band = 3);

/// Series value of the harmonic measure of `sides` on the unit square.
/// `terms` counts odd wavenumbers k = 1, 3, ..., 2*terms-1.
double rectangle_series_tau(double x, double y, SideSet sides, int terms = 200);

/// Harmonic measure of the inner circle of {1 <= |z| <= R} at radius r.
double annulus_tau(double r, double big_r);

/// Two-constants bound M^(1-tau) * eps^tau, for 0 < eps <= M.
double two_constants_bound(double eps, double m, double tau);

/// Mask of interior nodes at Euclidean distance >= band*h from every Gamma
/// endpoint. Used for comparisons away from the corner singularities.
std::vector<bool> away_from_gamma_endpoints(const IndicateField& field);

struct LevelContour {
    double level = 0.5;
    std::vector<std::vector<Point2>> polylines;
};

struct ReliableRegion {
    std::vector<bool> mask;  // tau >= threshold, per grid node
    LevelContour contour;
    [[nodiscard]] std::size_t count() const;
};

/// Nodes with tau >= threshold plus the tau = threshold contour.
ReliableRegion reliable_region(const IndicateField& field, double threshold = 0.5);

/// Marching squares with linear edge interpolation. Saddle cells are split
/// according to the cell-average value. Polylines are chained across cells;
/// closed loops repeat their first vertex at the end.
LevelContour extract_contour(const ScalarField& field, double level);

/// Bilinear interpolation of a field at a point inside its rectangle.
double interpolate(const ScalarField& field, Point2 p);

}  // namespace cauchy
