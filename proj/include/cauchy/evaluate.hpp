#pragma once

#include <optional>
#include <vector>

#include "cauchy/forward.hpp"
#include "cauchy/harmonic_measure.hpp"

namespace cauchy {

/// |u* - u0| at every node.
ScalarField pointwise_error(const ScalarField& u_star, const ExactSolution& exact);

/// Interior nodes at least `layers` nodes away from every side.
std::vector<bool> interior_mask(const Grid2D& grid, std::size_t layers);

/// Nodes of the fixed 5x5 probe lattice: points (x0 + a*W/6, y0 + b*H/6),
/// a, b = 1..5, snapped to the nearest node; ordered by b then a.
std::vector<std::pair<std::size_t, std::size_t>> probe_lattice(const Grid2D& grid);

struct EnvelopeProbe {
    Point2 point;
    double tau = 0.0;
    double err = 0.0;
    double bound = 0.0;  // c_fit * eps^tau
};

struct EnvelopeReport {
    double eps = 0.0;
    double c_fit = 0.0;
    double c_max = 0.0;
    std::size_t violations = 0;
    std::vector<Point2> violation_points;
    std::vector<EnvelopeProbe> probes;
    double m_used = 0.0;
};

/// c_fit = max |err| / eps^tau over interior nodes >= `layers` nodes from the
/// boundary. Violations are counted against c_max (c_fit when absent).
EnvelopeReport envelope_check(const ScalarField& err, const IndicateField& tau, double eps,
                              std::optional<double> c_max = std::nullopt, double m_used = 0.0,
                              std::size_t layers = 3);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares fit of log err against log eps.
RateFit rate_fit(const std::vector<std::pair<double, double>>& eps_err);

struct RegionStats {
    std::size_t count = 0;
    double median = 0.0;
    double max = 0.0;
};

struct ReliabilitySummary {
    double threshold = 0.5;
    RegionStats inside;
    std::optional<RegionStats> outside;
    /// outside.median / inside.median when both exist and inside.median > 0.
    std::optional<double> median_ratio;
};

/// Error statistics over nodes with tau >= threshold ("inside") and the
/// rest ("outside"), restricted to `mask` when given.
ReliabilitySummary reliability_summary(const ScalarField& err, const ScalarField& tau, double threshold,
                                       const std::vector<bool>* mask = nullptr);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

}  // namespace cauchy
