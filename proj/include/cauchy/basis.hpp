#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cauchy/grid.hpp"
#include "cauchy/poisson_fdm.hpp"

namespace cauchy {

enum class BasisKind { hat, indicator };
enum class RegMode { gram, diagonal };

BasisKind parse_basis_kind(std::string_view name);
std::string_view basis_kind_name(BasisKind k);
RegMode parse_reg_mode(std::string_view name);
std::string_view reg_mode_name(RegMode m);

/// Basis functions on the boundary of the enlarged grid.
///
/// hat: one function per boundary node of the enlarged grid (nodal value 1,
/// 0 at every other node; piecewise linear in arc length between nodes).
/// indicator: characteristic functions of contiguous arcs covering the
/// boundary; each side is cut into `arcs_per_side` pieces.
struct BoundaryBasis {
    Grid2D tilde_grid;
    Grid2D omega_grid;
    BasisKind kind = BasisKind::hat;
    /// support[i] lists traversal positions on the enlarged boundary where
    /// basis function i equals 1 (it vanishes at every other boundary node).
    std::vector<std::vector<std::size_t>> support;

    [[nodiscard]] std::size_t size() const { return support.size(); }
    /// Boundary data of function i in traversal order.
    [[nodiscard]] std::vector<double> boundary_data(std::size_t i) const;
};

/// `omega` must lie strictly inside `tilde` and both must share the lattice
/// of spacing h.
BoundaryBasis build_basis(const Rect& tilde, const Rect& omega, double h, BasisKind kind = BasisKind::hat,
                          std::size_t arcs_per_side = 1);

/// Omega padded by `cells` grid cells on each side.
Rect padded_rect(const Rect& omega, double h, std::size_t cells);

struct BaseSolutionSet {
    BoundaryBasis basis;
    std::vector<ScalarField> fields;  // on basis.tilde_grid
    double solver_tol = kDefaultSolverTol;
};

/// One Dirichlet solve per basis function. Runs on up to `threads` threads;
/// results do not depend on the thread count.
BaseSolutionSet compute_base_solutions(const BoundaryBasis& basis, double tol = kDefaultSolverTol,
                                       SolverBackend backend = SolverBackend::cg, unsigned threads = 1);

struct DiscreteNorms {
    double h1 = 0.0;
    double l2 = 0.0;
};

/// Tangential first-difference operator on Gamma: central differences inside
/// each run, one-sided at run ends, cyclic when Gamma is the whole boundary.
Eigen::MatrixXd tangential_difference(const BoundaryPartition& partition);

/// L2 = sqrt(sum sigma v^2); H1 = sqrt(L2^2 + sum sigma (D1 v)^2), with the
/// Gamma run weights of the partition.
DiscreteNorms discrete_norms(std::span<const double> values, const BoundaryPartition& partition);

/// Operator R with ||R v||^2 the discrete H2 norm of boundary values v on a
/// closed boundary: arc-length weighted squares of the values and of the
/// cyclic central first and second differences (corners included).
Eigen::MatrixXd closed_h2_operator(const Grid2D& grid);

struct DiscreteSystem {
    Eigen::MatrixXd a;           // m x n, w_i at Gamma nodes
    Eigen::MatrixXd b;           // m x n, outward normal derivatives at Gamma nodes
    Eigen::VectorXd sigma;       // m Gamma weights
    Eigen::MatrixXd d1;          // m x m tangential differences on Gamma
    RegMode reg_mode = RegMode::gram;
    /// gram: H2 operator applied to the base solutions on the Omega boundary
    /// (so reg = R^T R); diagonal: diag(C_k).
    Eigen::MatrixXd reg;
    Eigen::VectorXd c_diag;      // C_k = ||w_k||_{H2(dOmega)}
    int normal_order = 2;
    /// Stencil tolerance of the base solutions; 0 when exact.
    double solver_tol = 0.0;

    [[nodiscard]] std::size_t m() const { return static_cast<std::size_t>(a.rows()); }
    [[nodiscard]] std::size_t n() const { return static_cast<std::size_t>(a.cols()); }
    /// Gram matrix C = reg^T reg (n x n).
    [[nodiscard]] Eigen::MatrixXd gram() const { return reg.transpose() * reg; }
};

DiscreteSystem assemble_system(const BaseSolutionSet& set, const BoundaryPartition& omega_partition,
                               RegMode reg_mode = RegMode::gram, int normal_order = 2);

}  // namespace cauchy
