#include "cauchy/basis.hpp"

#include <cmath>
#include <optional>

#include "cauchy/parallel.hpp"

namespace cauchy {

BasisKind parse_basis_kind(std::string_view name) {
    if (name == "hat") return BasisKind::hat;
    if (name == "indicator") return BasisKind::indicator;
    throw ValidationError("unknown basis kind '" + std::string(name) + "' (expected hat or indicator)");
}

std::string_view basis_kind_name(BasisKind k) { return k == BasisKind::hat ? "hat" : "indicator"; }

RegMode parse_reg_mode(std::string_view name) {
    if (name == "gram") return RegMode::gram;
    if (name == "diagonal") return RegMode::diagonal;
    throw ValidationError("unknown reg_mode '" + std::string(name) + "' (expected gram or diagonal)");
}

std::string_view reg_mode_name(RegMode m) { return m == RegMode::gram ? "gram" : "diagonal"; }

std::vector<double> BoundaryBasis::boundary_data(std::size_t i) const {
    std::vector<double> data(boundary_nodes(tilde_grid).size(), 0.0);
    for (std::size_t p : support.at(i)) data[p] = 1.0;
    return data;
}

Rect padded_rect(const Rect& omega, double h, std::size_t cells) {
    const double p = h * static_cast<double>(cells);
    return Rect{omega.x0 - p, omega.y0 - p, omega.x1 + p, omega.y1 + p};
}

BoundaryBasis build_basis(const Rect& tilde, const Rect& omega, double h, BasisKind kind, std::size_t arcs_per_side) {
    if (!tilde.strictly_contains(omega)) {
        throw ValidationError("the enlarged domain must strictly contain the closure of Omega");
    }
    Grid2D tilde_grid = build_grid(tilde, h);
    Grid2D omega_grid = build_grid(omega, h);
    if (!tilde_grid.embedding_offset(omega_grid)) {
        throw ValidationError("Omega and the enlarged domain do not share a node lattice at spacing h");
    }
    BoundaryBasis basis{tilde_grid, omega_grid, kind, {}};
    const auto nodes = boundary_nodes(tilde_grid);
    if (kind == BasisKind::hat) {
        basis.support.reserve(nodes.size());
        for (std::size_t p = 0; p < nodes.size(); ++p) basis.support.push_back({p});
        return basis;
    }
    if (arcs_per_side == 0) throw ValidationError("indicator basis needs at least one arc per side");
    // Traversal visits each side label as one contiguous block.
    std::size_t begin = 0;
    while (begin < nodes.size()) {
        std::size_t end = begin;
        while (end < nodes.size() && nodes[end].side == nodes[begin].side) ++end;
        const std::size_t len = end - begin;
        if (len < arcs_per_side) throw ValidationError("more indicator arcs than nodes on a side");
        for (std::size_t a = 0; a < arcs_per_side; ++a) {
            const std::size_t lo = begin + a * len / arcs_per_side;
            const std::size_t hi = begin + (a + 1) * len / arcs_per_side;
            std::vector<std::size_t> arc;
            for (std::size_t p = lo; p < hi; ++p) arc.push_back(p);
            basis.support.push_back(std::move(arc));
        }
        begin = end;
    }
    return basis;
}

BaseSolutionSet compute_base_solutions(const BoundaryBasis& basis, double tol, SolverBackend backend, unsigned threads) {
    const DirichletSolver solver(basis.tilde_grid, tol, backend);
    std::vector<std::optional<ScalarField>> slots(basis.size());
    parallel_for(basis.size(), threads, [&](std::size_t i) {
        try {
            slots[i].emplace(solver.solve(basis.boundary_data(i)));
        } catch (const NumericalError& e) {
            throw NumericalError("base solution " + std::to_string(i) + ": " + e.what(), e.achieved());
        }
    });
    BaseSolutionSet set{basis, {}, tol};
    set.fields.reserve(slots.size());
    for (auto& s : slots) set.fields.push_back(std::move(*s));
    return set;
}

Eigen::MatrixXd tangential_difference(const BoundaryPartition& partition) {
    const auto m = static_cast<Eigen::Index>(partition.gamma_size());
    const double h = partition.grid().h();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    if (partition.gamma_closed()) {
        for (Eigen::Index k = 0; k < m; ++k) {
            d(k, (k + 1) % m) += 0.5 / h;
            d(k, (k + m - 1) % m) -= 0.5 / h;
        }
        return d;
    }
    for (const auto& [b0, e0] : partition.gamma_runs()) {
        const auto b = static_cast<Eigen::Index>(b0);
        const auto e = static_cast<Eigen::Index>(e0);
        if (e - b < 2) continue;
        d(b, b) = -1.0 / h;
        d(b, b + 1) = 1.0 / h;
        d(e - 1, e - 1) = 1.0 / h;
        d(e - 1, e - 2) = -1.0 / h;
        for (Eigen::Index k = b + 1; k + 1 < e; ++k) {
            d(k, k + 1) = 0.5 / h;
            d(k, k - 1) = -0.5 / h;
        }
    }
    return d;
}

DiscreteNorms discrete_norms(std::span<const double> values, const BoundaryPartition& partition) {
    if (values.size() != partition.gamma_size()) {
        throw ValidationError("discrete_norms: " + std::to_string(values.size()) + " values for " +
                              std::to_string(partition.gamma_size()) + " Gamma nodes");
    }
    const Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
    const Eigen::VectorXd dv = tangential_difference(partition) * v;
    const auto& w = partition.gamma_sigma();
    double l2 = 0.0;
    double d2 = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        l2 += w[k] * v[static_cast<Eigen::Index>(k)] * v[static_cast<Eigen::Index>(k)];
        d2 += w[k] * dv[static_cast<Eigen::Index>(k)] * dv[static_cast<Eigen::Index>(k)];
    }
    return {std::sqrt(l2 + d2), std::sqrt(l2)};
}

Eigen::MatrixXd closed_h2_operator(const Grid2D& grid) {
    const auto nb = static_cast<Eigen::Index>(boundary_nodes(grid).size());
    const double h = grid.h();
    const double sw = std::sqrt(h);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(3 * nb, nb);
    for (Eigen::Index k = 0; k < nb; ++k) {
        const Eigen::Index next = (k + 1) % nb;
        const Eigen::Index prev = (k + nb - 1) % nb;
        r(k, k) = sw;
        r(nb + k, next) += sw * 0.5 / h;
        r(nb + k, prev) -= sw * 0.5 / h;
        r(2 * nb + k, next) += sw / (h * h);
        r(2 * nb + k, k) -= 2.0 * sw / (h * h);
        r(2 * nb + k, prev) += sw / (h * h);
    }
    return r;
}

DiscreteSystem assemble_system(const BaseSolutionSet& set, const BoundaryPartition& omega_partition, RegMode reg_mode,
                               int normal_order) {
    const Grid2D& omega = omega_partition.grid();
    if (!(set.basis.omega_grid == omega) || !set.basis.tilde_grid.embedding_offset(omega)) {
        throw ValidationError("measurement grid is not aligned with the base-solution grid");
    }
    const auto m = static_cast<Eigen::Index>(omega_partition.gamma_size());
    const auto n = static_cast<Eigen::Index>(set.fields.size());
    const auto bnodes = boundary_nodes(omega);
    const auto nb = static_cast<Eigen::Index>(bnodes.size());

    DiscreteSystem sys;
    sys.reg_mode = reg_mode;
    sys.normal_order = normal_order;
    sys.solver_tol = set.solver_tol;
    sys.a.resize(m, n);
    sys.b.resize(m, n);
    Eigen::MatrixXd wb(nb, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const ScalarField w = set.fields[static_cast<std::size_t>(i)].restrict_to(omega);
        const auto dn = normal_derivative(w, omega_partition, normal_order);
        for (Eigen::Index j = 0; j < m; ++j) {
            sys.a(j, i) = w[omega_partition.gamma_node(static_cast<std::size_t>(j)).index];
            sys.b(j, i) = dn[static_cast<std::size_t>(j)];
        }
        for (Eigen::Index p = 0; p < nb; ++p) wb(p, i) = w[bnodes[static_cast<std::size_t>(p)].index];
    }
    sys.sigma = Eigen::Map<const Eigen::VectorXd>(omega_partition.gamma_sigma().data(), m);
    sys.d1 = tangential_difference(omega_partition);

    const Eigen::MatrixXd h2 = closed_h2_operator(omega) * wb;
    sys.c_diag = h2.colwise().norm().transpose();
    if (reg_mode == RegMode::gram) {
        sys.reg = h2;
    } else {
        sys.reg = sys.c_diag.asDiagonal();
    }
    return sys;
}

}  // namespace cauchy
