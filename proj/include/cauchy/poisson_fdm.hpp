#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cauchy/grid.hpp"

namespace cauchy {

/// Per-node values on a grid (row-major, see Grid2D).
class ScalarField {
public:
    ScalarField(Grid2D grid, std::vector<double> values);
    explicit ScalarField(Grid2D grid, double fill = 0.0);

    [[nodiscard]] const Grid2D& grid() const { return grid_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
    double& at(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }
    [[nodiscard]] double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }

    /// Restriction to a sub-grid sharing this grid's lattice.
    [[nodiscard]] ScalarField restrict_to(const Grid2D& sub) const;

    /// Samples f(x,y) at every node.
    static ScalarField sample(const Grid2D& grid, const std::function<double(double, double)>& f);

private:
    Grid2D grid_;
    std::vector<double> values_;
};

enum class SolverBackend { cg, direct };

SolverBackend parse_backend(std::string_view name);
std::string_view backend_name(SolverBackend b);

inline constexpr double kDefaultSolverTol = 1e-10;

/// Dirichlet solver for the 5-point discrete Laplace equation on one grid.
///
/// The stopping test is on the stencil residual |u_E+u_W+u_N+u_S-4u_P| in
/// max-norm, scaled by max(1, max|boundary data|). The direct backend
/// factors the interior matrix once and reuses it across solves.
class DirichletSolver {
public:
    DirichletSolver(Grid2D grid, double tol = kDefaultSolverTol, SolverBackend backend = SolverBackend::cg);
    ~DirichletSolver();
    DirichletSolver(DirichletSolver&&) noexcept;
    DirichletSolver& operator=(DirichletSolver&&) noexcept;

    [[nodiscard]] const Grid2D& grid() const { return grid_; }
    [[nodiscard]] double tol() const { return tol_; }
    [[nodiscard]] SolverBackend backend() const { return backend_; }

    /// `boundary_values` follows boundary_nodes(grid) traversal order.
    /// Safe to call concurrently.
    [[nodiscard]] ScalarField solve(std::span<const double> boundary_values) const;

private:
    [[nodiscard]] ScalarField solve_cg(ScalarField u, double threshold) const;
    [[nodiscard]] ScalarField solve_direct(ScalarField u) const;

    struct DirectFactor;
    Grid2D grid_;
    double tol_;
    SolverBackend backend_;
    std::vector<BoundaryNode> boundary_;
    std::unique_ptr<DirectFactor> factor_;
};

ScalarField solve_dirichlet(const Grid2D& grid, std::span<const double> boundary_values,
                            double tol = kDefaultSolverTol, SolverBackend backend = SolverBackend::cg);

/// Max over interior nodes of |u_E+u_W+u_N+u_S-4u_P| (the h^2-scaled
/// discrete Laplacian).
double laplacian_residual(const ScalarField& field);

/// Outward normal derivative at each Gamma node, by one-sided differences
/// into the grid: order 1 uses two points, order 2 uses three.
std::vector<double> normal_derivative(const ScalarField& field, const BoundaryPartition& partition, int order = 2);

/// Samples boundary values of f(x,y) in traversal order.
std::vector<double> boundary_samples(const Grid2D& grid, const std::function<double(double, double)>& f);

}  // namespace cauchy
