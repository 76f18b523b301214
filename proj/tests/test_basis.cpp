#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "cauchy/basis.hpp"

using namespace cauchy;

namespace {

const Rect kUnit{0.0, 0.0, 1.0, 1.0};

BaseSolutionSet hat_set(double h, std::size_t pad) {
    return compute_base_solutions(build_basis(padded_rect(kUnit, h, pad), kUnit, h), 1e-12);
}

}  // namespace

TEST_CASE("hat basis size follows the enlarged grid") {
    const double h = 1.0 / 64.0;
    CHECK(build_basis(padded_rect(kUnit, h, 1), kUnit, h).size() == 264);  // 67 nodes per side
    CHECK(build_basis(padded_rect(kUnit, h, 2), kUnit, h).size() == 272);
    CHECK(build_basis(padded_rect(kUnit, h, 4), kUnit, h).size() == 288);
    const BoundaryBasis b = build_basis(padded_rect(kUnit, h, 1), kUnit, h);
    CHECK(b.tilde_grid.nx() == 67);
    for (std::size_t i = 0; i < b.size(); ++i) {
        REQUIRE(b.support[i].size() == 1);
        CHECK(b.support[i][0] == i);
    }
}

TEST_CASE("indicator basis covers the boundary once") {
    const double h = 1.0 / 16.0;
    for (std::size_t arcs : {1u, 3u}) {
        const BoundaryBasis b = build_basis(padded_rect(kUnit, h, 2), kUnit, h, BasisKind::indicator, arcs);
        CHECK(b.size() == 4 * arcs);
        std::vector<double> sum(boundary_nodes(b.tilde_grid).size(), 0.0);
        for (std::size_t i = 0; i < b.size(); ++i) {
            const auto d = b.boundary_data(i);
            for (std::size_t p = 0; p < d.size(); ++p) sum[p] += d[p];
        }
        for (double s : sum) CHECK(s == 1.0);
    }
}

TEST_CASE("build_basis preconditions") {
    const double h = 1.0 / 16.0;
    CHECK_THROWS_AS(build_basis(kUnit, kUnit, h), ValidationError);
    CHECK_THROWS_AS(build_basis(Rect{-0.03, -0.03, 1.03, 1.03}, kUnit, h), ValidationError);
    CHECK_THROWS_AS(build_basis(padded_rect(kUnit, h, 1), kUnit, h, BasisKind::indicator, 0), ValidationError);
}

TEST_CASE("base solutions: partition of unity and maximum principle") {
    const double tol = 1e-12;
    const BaseSolutionSet set = hat_set(1.0 / 16.0, 2);
    const Grid2D& g = set.basis.tilde_grid;
    const double n = static_cast<double>(set.fields.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double s = 0.0;
        for (const auto& w : set.fields) {
            CHECK(w[k] >= -tol);
            CHECK(w[k] <= 1.0 + tol);
            s += w[k];
        }
        CHECK(std::abs(s - 1.0) <= n * tol);
    }
}

TEST_CASE("single arc over the whole boundary gives w = 1") {
    const double h = 1.0 / 8.0;
    BoundaryBasis b = build_basis(padded_rect(kUnit, h, 1), kUnit, h, BasisKind::indicator, 1);
    std::vector<std::size_t> all;
    for (const auto& arc : b.support) all.insert(all.end(), arc.begin(), arc.end());
    b.support = {all};
    const BaseSolutionSet set = compute_base_solutions(b, 1e-12);
    for (double v : set.fields[0].values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    const BoundaryPartition bottom = boundary_partition(build_grid(kUnit, h), SideSet{Side::bottom});
    const DiscreteSystem sys = assemble_system(set, bottom);
    CHECK(sys.a.rows() == 9);
    CHECK(sys.a.cols() == 1);
    for (Eigen::Index j = 0; j < sys.a.rows(); ++j) {
        CHECK(sys.a(j, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(sys.b(j, 0)) <= 1e-10 / h);
    }
}

TEST_CASE("assembled system for the n=264 setup") {
    const double h = 1.0 / 64.0;
    const BaseSolutionSet set = hat_set(h, 1);
    const BoundaryPartition bottom = boundary_partition(build_grid(kUnit, h), SideSet{Side::bottom});
    const DiscreteSystem sys = assemble_system(set, bottom, RegMode::gram);
    CHECK(sys.a.rows() == 65);
    CHECK(sys.a.cols() == 264);
    CHECK(sys.b.rows() == 65);
    CHECK(sys.reg.rows() == 3 * 256);
    for (Eigen::Index j = 0; j < sys.a.rows(); ++j) {
        CHECK(std::abs(sys.a.row(j).sum() - 1.0) <= 264 * 1e-12);
    }
    // Corner hats of the enlarged grid never reach Omega.
    std::size_t zero_cols = 0;
    for (Eigen::Index i = 0; i < sys.a.cols(); ++i) {
        if (sys.a.col(i).cwiseAbs().maxCoeff() == 0.0 && sys.reg.col(i).cwiseAbs().maxCoeff() == 0.0) ++zero_cols;
    }
    CHECK(zero_cols == 4);

    const Eigen::MatrixXd c = sys.gram();
    CHECK((c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * c.cwiseAbs().maxCoeff());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());

    const DiscreteSystem diag = assemble_system(set, bottom, RegMode::diagonal);
    for (Eigen::Index k = 0; k < diag.c_diag.size(); ++k) CHECK(diag.c_diag[k] >= 0.0);
    CHECK(diag.reg.isApprox(Eigen::MatrixXd(diag.c_diag.asDiagonal())));
}

TEST_CASE("assembly is linear in the basis data") {
    const double h = 1.0 / 16.0;
    BoundaryBasis b = build_basis(padded_rect(kUnit, h, 1), kUnit, h);
    const std::size_t i = 5, k = 23;
    b.support.push_back({i, k});
    const BaseSolutionSet set = compute_base_solutions(b, 1e-12);
    const BoundaryPartition p = boundary_partition(build_grid(kUnit, h), SideSet{Side::bottom, Side::left});
    const DiscreteSystem sys = assemble_system(set, p);
    const auto last = static_cast<Eigen::Index>(b.size() - 1);
    CHECK((sys.a.col(last) - sys.a.col(i) - sys.a.col(k)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((sys.b.col(last) - sys.b.col(i) - sys.b.col(k)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((sys.reg.col(last) - sys.reg.col(i) - sys.reg.col(k)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("assembly rejects misaligned grids") {
    const BaseSolutionSet set = hat_set(1.0 / 8.0, 1);
    const BoundaryPartition other = boundary_partition(build_grid(kUnit, 1.0 / 16.0), SideSet{Side::bottom});
    CHECK_THROWS_AS(assemble_system(set, other), ValidationError);
}

TEST_CASE("discrete norms") {
    const Grid2D g = build_grid(kUnit, 1.0 / 64.0);
    const BoundaryPartition bottom = boundary_partition(g, SideSet{Side::bottom});
    const std::vector<double> c(65, 3.0);
    const DiscreteNorms nc = discrete_norms(c, bottom);
    CHECK(nc.l2 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(nc.h1 == doctest::Approx(3.0).epsilon(1e-12));

    std::vector<double> s(65);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::sin(std::numbers::pi * g.x(bottom.gamma_node(k).i));
    const double h1sq = std::pow(discrete_norms(s, bottom).h1, 2);
    const double want = 0.5 + std::numbers::pi * std::numbers::pi / 2.0;
    CHECK(std::abs(h1sq - want) / want <= 1e-3);

    const DiscreteNorms z = discrete_norms(std::vector<double>(65, 0.0), bottom);
    CHECK(z.l2 == 0.0);
    CHECK(z.h1 == 0.0);
    CHECK_THROWS_AS(discrete_norms(std::vector<double>(64, 0.0), bottom), ValidationError);
}

TEST_CASE("tangential differences are exact on linear data along each run") {
    const Grid2D g = build_grid(kUnit, 1.0 / 8.0);
    const BoundaryPartition p = boundary_partition(g, SideSet{Side::bottom, Side::top});
    const Eigen::MatrixXd d = tangential_difference(p);
    Eigen::VectorXd v(static_cast<Eigen::Index>(p.gamma_size()));
    for (std::size_t k = 0; k < p.gamma_size(); ++k) v[static_cast<Eigen::Index>(k)] = 2.0 * g.x(p.gamma_node(k).i);
    const Eigen::VectorXd dv = d * v;
    // Traversal runs left-to-right along the bottom and right-to-left on top.
    for (std::size_t k = 0; k < p.gamma_size(); ++k) {
        const double want = p.gamma_node(k).j == 0 ? 2.0 : -2.0;
        CHECK(dv[static_cast<Eigen::Index>(k)] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("closed H2 operator on constants and on a smooth periodic profile") {
    const Grid2D g = build_grid(kUnit, 1.0 / 32.0);
    const Eigen::MatrixXd r = closed_h2_operator(g);
    const auto nb = static_cast<Eigen::Index>(boundary_nodes(g).size());
    const Eigen::VectorXd ones = Eigen::VectorXd::Constant(nb, 2.0);
    CHECK((r * ones).squaredNorm() == doctest::Approx(4.0 * 4.0).epsilon(1e-12));
    // sin(2 pi s / 4) in arc length s: norm^2 -> 2 * (1 + k^2 + k^4), k = pi/2.
    Eigen::VectorXd v(nb);
    const double h = g.h();
    for (Eigen::Index p = 0; p < nb; ++p) v[p] = std::sin(std::numbers::pi / 2.0 * h * static_cast<double>(p));
    const double k = std::numbers::pi / 2.0;
    CHECK((r * v).squaredNorm() == doctest::Approx(2.0 * (1 + k * k + k * k * k * k)).epsilon(2e-3));
}

TEST_CASE("projected boundary data converge as h halves") {
    // Harmonic on a fixed enlarged square; hat coefficients are its nodal values.
    auto u = [](double x, double y) { return std::exp(2.0 * x) * std::cos(2.0 * y); };
    std::vector<double> errs;
    for (double h : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
        const auto pad = static_cast<std::size_t>(std::lround(0.25 / h));
        const BaseSolutionSet set = hat_set(h, pad);
        const Grid2D omega = build_grid(kUnit, h);
        const BoundaryPartition p = boundary_partition(omega, SideSet{Side::bottom});
        const DiscreteSystem sys = assemble_system(set, p);
        const auto nodes = boundary_nodes(set.basis.tilde_grid);
        Eigen::VectorXd b(static_cast<Eigen::Index>(nodes.size()));
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            b[static_cast<Eigen::Index>(i)] = u(set.basis.tilde_grid.x(nodes[i].i), set.basis.tilde_grid.y(nodes[i].j));
        }
        const Eigen::VectorXd f = sys.a * b;
        std::vector<double> diff(p.gamma_size());
        for (std::size_t k = 0; k < diff.size(); ++k) {
            const auto& nd = p.gamma_node(k);
            diff[k] = f[static_cast<Eigen::Index>(k)] - u(omega.x(nd.i), omega.y(nd.j));
        }
        errs.push_back(discrete_norms(diff, p).h1);
    }
    for (std::size_t k = 1; k < errs.size(); ++k) {
        CHECK(errs[k] < errs[k - 1]);
        CHECK(std::log2(errs[k - 1] / errs[k]) >= 1.0);
    }
}
