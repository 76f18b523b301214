#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "cauchy/experiment.hpp"
#include "cauchy/tikhonov.hpp"

using namespace cauchy;

namespace {

const Rect kUnit{0.0, 0.0, 1.0, 1.0};

struct Small {
    Grid2D grid;
    BoundaryPartition part;
    BaseSolutionSet set;
    DiscreteSystem sys;
};

Small small_problem(double h, SideSet sides = SideSet{Side::bottom}, std::size_t pad = 1) {
    Grid2D g = build_grid(kUnit, h);
    BoundaryPartition p = boundary_partition(g, sides);
    BaseSolutionSet set = compute_base_solutions(build_basis(padded_rect(kUnit, h, pad), kUnit, h), 1e-12);
    DiscreteSystem sys = assemble_system(set, p);
    return {std::move(g), std::move(p), std::move(set), std::move(sys)};
}

DiscreteSystem ridge_system() {
    DiscreteSystem s;
    s.a = Eigen::MatrixXd::Ones(1, 1);
    s.b = Eigen::MatrixXd::Zero(1, 1);
    s.sigma = Eigen::VectorXd::Ones(1);
    s.d1 = Eigen::MatrixXd::Zero(1, 1);
    s.reg = Eigen::MatrixXd::Ones(1, 1);
    s.c_diag = Eigen::VectorXd::Ones(1);
    return s;
}

CauchyData scalar_data(double f) {
    CauchyData d;
    d.points = {Point2{0.0, 0.0}};
    d.f = {f};
    d.g = {0.0};
    return d;
}

}  // namespace

TEST_CASE("select_alpha") {
    CHECK(select_alpha(0.01, 1.0 / 64.0, AlphaRule::a_priori(1.0)) == doctest::Approx(3.4414e-4).epsilon(1e-4));
    CHECK(select_alpha(0.0, 0.1, AlphaRule::a_priori(2.0)) == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(select_alpha(0.5, 0.1, AlphaRule::fixed(3e-7)) == 3e-7);
    CHECK_THROWS_AS(select_alpha(0.01, 0.1, AlphaRule::fixed(0.0)), ValidationError);
    CHECK_THROWS_AS(select_alpha(0.01, 0.1, AlphaRule::a_priori(-1.0)), ValidationError);
    CHECK_THROWS_AS(select_alpha(-0.01, 0.1, AlphaRule::a_priori(1.0)), ValidationError);
    CHECK_THROWS_AS(select_alpha(0.01, 0.0, AlphaRule::a_priori(1.0)), ValidationError);
}

TEST_CASE("one-dimensional ridge closed form") {
    const DiscreteSystem s = ridge_system();
    const TikhonovConfig cfg;
    for (double alpha : {1e-3, 0.5, 1.0, 7.0}) {
        const Minimizer mz = minimize(s, scalar_data(1.0), cfg, alpha);
        CHECK(std::abs(mz.b[0] - 1.0 / (1.0 + alpha)) <= 1e-12);
        CHECK(std::abs(minimize(s, scalar_data(0.0), cfg, alpha).b[0]) <= 1e-12);
    }
    CHECK_THROWS_AS(minimize(s, scalar_data(1.0), cfg, -1.0), ValidationError);
    TikhonovConfig none;
    none.weight_f = 0.0;
    none.weight_g = 0.0;
    CHECK_THROWS_AS(minimize(s, scalar_data(1.0), none, 1.0), ValidationError);
    CauchyData longer = scalar_data(1.0);
    longer.f.push_back(1.0);
    CHECK_THROWS_AS(minimize(s, longer, cfg, 1.0), ValidationError);
}

TEST_CASE("zero data gives zero coefficients") {
    const Small s = small_problem(1.0 / 16.0);
    CauchyData zero = trace_cauchy(ExactSolution::constant(0.0), s.part);
    const Minimizer mz = minimize(s.sys, zero, TikhonovConfig{}, 1e-3);
    CHECK(mz.b.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(mz.inert.size() == 4);
}

TEST_CASE("noiseless constant data") {
    const Small s = small_problem(1.0 / 16.0);
    const CauchyData d = trace_cauchy(ExactSolution::constant(1.0), s.part);
    const double alpha = select_alpha(0.0, s.grid.h(), AlphaRule::a_priori(1.0));
    const ReconstructionResult r = reconstruct(s.set, s.sys, d, s.part, TikhonovConfig{}, alpha);
    // The constant 1 is representable (all coefficients 1); the minimizer can
    // only do better than it on the cost.
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.set.fields.size()));
    CHECK(cost(s.sys, d, TikhonovConfig{}, alpha, r.b) <= cost(s.sys, d, TikhonovConfig{}, alpha, ones) + 1e-14);
    CHECK(r.residual_f <= 2e-2);
    for (std::size_t i = 0; i < s.grid.nx(); ++i) CHECK(r.u_star.at(i, 0) == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("minimizer satisfies the normal equations") {
    const Small s = small_problem(1.0 / 16.0, SideSet{Side::bottom, Side::left});
    const CauchyData d = add_noise(trace_cauchy(ExactSolution::exp_cos(4, 0.2), s.part), s.part, 0.01, 4);
    const TikhonovConfig cfg;
    for (double alpha : {1e-6, 1e-3, 1e-1}) {
        const Minimizer mz = minimize(s.sys, d, cfg, alpha);
        const StackedSystem st = stack_system(s.sys, d, cfg, alpha);
        const double scale = st.matrix.norm() * (st.matrix.norm() * mz.b.norm() + st.rhs.norm());
        CHECK(cost_gradient(s.sys, d, cfg, alpha, mz.b).norm() <= 1e-10 * scale);
        // Perturbing the minimizer never lowers the cost.
        const double c0 = cost(s.sys, d, cfg, alpha, mz.b);
        for (Eigen::Index k : {Eigen::Index{3}, Eigen::Index{20}, Eigen::Index{40}}) {
            Eigen::VectorXd b = mz.b;
            b[k] += 1e-3;
            CHECK(cost(s.sys, d, cfg, alpha, b) >= c0);
        }
    }
}

TEST_CASE("regularization trades misfit for seminorm monotonically") {
    const Small s = small_problem(1.0 / 16.0);
    const CauchyData d = add_noise(trace_cauchy(ExactSolution::exp_cos(4, 0.2), s.part), s.part, 0.01, 2);
    const TikhonovConfig cfg;
    double prev_reg = std::numeric_limits<double>::infinity();
    double prev_misfit = 0.0;
    for (double alpha : {1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
        const Minimizer mz = minimize(s.sys, d, cfg, alpha);
        const double reg = (s.sys.reg * mz.b).norm();
        const double misfit = cost(s.sys, d, cfg, alpha, mz.b) - alpha * reg * reg;
        CHECK(reg <= prev_reg * (1 + 1e-9));
        CHECK(misfit >= prev_misfit * (1 - 1e-9));
        prev_reg = reg;
        prev_misfit = misfit;
    }
}

TEST_CASE("reported residuals are recomputable") {
    const Small s = small_problem(1.0 / 16.0);
    const CauchyData d = add_noise(trace_cauchy(ExactSolution::exp_cos(4, 0.2), s.part), s.part, 0.05, 8);
    const ReconstructionResult r = reconstruct(s.set, s.sys, d, s.part, TikhonovConfig{}, 1e-4);
    const auto m = static_cast<Eigen::Index>(d.f.size());
    const Eigen::VectorXd rf = s.sys.a * r.b - Eigen::Map<const Eigen::VectorXd>(d.f.data(), m);
    const Eigen::VectorXd rg = s.sys.b * r.b - Eigen::Map<const Eigen::VectorXd>(d.g.data(), m);
    const std::vector<double> vf(rf.data(), rf.data() + m), vg(rg.data(), rg.data() + m);
    CHECK(std::abs(r.residual_f - discrete_norms(vf, s.part).h1) <= 1e-10);
    CHECK(std::abs(r.residual_g - discrete_norms(vg, s.part).l2) <= 1e-10);
    CHECK(std::abs(r.reg_norm - (s.sys.reg * r.b).norm()) <= 1e-10 * (1 + r.reg_norm));
    CHECK(r.alpha_used == 1e-4);
    CHECK(r.condition_estimate >= 1.0);
}

TEST_CASE("reconstruct_field superposes base solutions") {
    const Small s = small_problem(1.0 / 8.0);
    const auto n = static_cast<Eigen::Index>(s.set.fields.size());
    const auto off = s.set.basis.tilde_grid.embedding_offset(s.grid);
    REQUIRE(off);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[9] = 2.0;
    const ScalarField u = reconstruct_field(e, s.set, s.grid);
    for (std::size_t j = 0; j < s.grid.ny(); ++j) {
        for (std::size_t i = 0; i < s.grid.nx(); ++i) {
            CHECK(u.at(i, j) == 2.0 * s.set.fields[9].at(off->first + i, off->second + j));
        }
    }
    const ScalarField one = reconstruct_field(Eigen::VectorXd::Ones(n), s.set, s.grid);
    for (double v : one.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(reconstruct_field(Eigen::VectorXd::Ones(n - 1), s.set, s.grid), ValidationError);
}

TEST_CASE("iterative and direct base solutions give the same minimizer") {
    // n = 4*(16+8) = 96 basis functions against 64 boundary nodes of Omega:
    // 32 directions are null up to the solver tolerance.
    const double h = 1.0 / 16.0;
    const BoundaryBasis basis = build_basis(padded_rect(kUnit, h, 4), kUnit, h);
    const Grid2D g = build_grid(kUnit, h);
    const BoundaryPartition p = boundary_partition(g, SideSet{Side::bottom});
    const CauchyData d = add_noise(trace_cauchy(ExactSolution::exp_cos(4, 0.2), p), p, 0.01, 1);
    std::vector<ReconstructionResult> rs;
    for (SolverBackend be : {SolverBackend::cg, SolverBackend::direct}) {
        const BaseSolutionSet set = compute_base_solutions(basis, 1e-10, be);
        rs.push_back(reconstruct(set, assemble_system(set, p), d, p, TikhonovConfig{}, 4e-3));
    }
    CHECK(rs[0].b.norm() <= 1e3);
    CHECK((rs[0].b - rs[1].b).norm() <= 1e-6 * rs[1].b.norm());
    CHECK(rs[0].reg_norm == doctest::Approx(rs[1].reg_norm).epsilon(1e-8));
    CHECK(rs[0].condition_estimate < 1e3);
}

TEST_CASE("unregularized rank-deficient system is rejected") {
    const Small s = small_problem(1.0 / 16.0);
    const CauchyData d = trace_cauchy(ExactSolution::exp_cos(4, 0.2), s.part);
    CHECK_THROWS_AS(minimize(s.sys, d, TikhonovConfig{}, 0.0), NumericalError);
}

TEST_CASE("noiseless residual decreases under refinement") {
    std::vector<double> res;
    for (double h : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
        const Small s = small_problem(h);
        const CauchyData d = trace_cauchy(ExactSolution::exp_cos(1, 0.2), s.part);
        const double alpha = select_alpha(0.0, h, AlphaRule::a_priori(1.0));
        res.push_back(reconstruct(s.set, s.sys, d, s.part, TikhonovConfig{}, alpha).residual_f);
    }
    CHECK(res[1] < res[0]);
    CHECK(res[2] < res[1]);
}

TEST_CASE("seminorm stays bounded as the noise shrinks") {
    const Small s = small_problem(1.0 / 32.0);
    const CauchyData clean = trace_cauchy(ExactSolution::exp_cos(1, 0.2), s.part);
    std::vector<double> reg;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const CauchyData d = add_noise(clean, s.part, eps, 1);
        const double alpha = select_alpha(eps, s.grid.h(), AlphaRule::a_priori(1.0));
        reg.push_back(reconstruct(s.set, s.sys, d, s.part, TikhonovConfig{}, alpha).reg_norm);
    }
    const double hi = *std::max_element(reg.begin(), reg.end());
    const double lo = *std::min_element(reg.begin(), reg.end());
    CHECK(hi / lo <= 10.0);
}

TEST_CASE("one-side preset reconstruction matches the stored field") {
    std::ifstream in(std::string(CAUCHY_TEST_DATA) + "/u_star_one_side.csv");
    REQUIRE(in);
    std::string line;
    std::getline(in, line);
    const RunReport rep = run_pipeline(preset("paper-sec5-one-side"));
    const ScalarField& u = rep.trial.result.u_star;
    const Grid2D& g = u.grid();
    std::size_t k = 0;
    double worst = 0.0;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string xs, ys, vs;
        std::getline(row, xs, ',');
        std::getline(row, ys, ',');
        std::getline(row, vs, ',');
        const auto [i, j] = g.nearest(std::stod(xs), std::stod(ys));
        REQUIRE(g.index(i, j) == k);
        worst = std::max(worst, std::abs(u.at(i, j) - std::stod(vs)));
        ++k;
    }
    CHECK(k == g.size());
    CHECK(worst <= 1e-9);
}
