#include "cauchy/tikhonov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cauchy {

double select_alpha(double eps, double h, const AlphaRule& rule) {
    if (!(eps >= 0.0)) throw ValidationError("select_alpha requires eps >= 0");
    if (!(h > 0.0)) throw ValidationError("select_alpha requires h > 0");
    const double alpha = rule.kind == AlphaRule::Kind::fixed ? rule.value : rule.value * (eps * eps + h * h);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("resolved regularization parameter must be positive");
    }
    return alpha;
}

namespace {

constexpr double kRankTolFactor = 1e3;

void check_shapes(const DiscreteSystem& sys, const CauchyData& data, const TikhonovConfig& cfg) {
    if (data.f.size() != sys.m() || data.g.size() != sys.m()) {
        throw ValidationError("Cauchy data length does not match the number of measurement nodes");
    }
    if (cfg.weight_f < 0.0 || cfg.weight_g < 0.0 || (cfg.weight_f == 0.0 && cfg.weight_g == 0.0)) {
        throw ValidationError("data weights must be nonnegative and not both zero");
    }
}

}  // namespace

StackedSystem stack_system(const DiscreteSystem& sys, const CauchyData& data, const TikhonovConfig& cfg, double alpha) {
    check_shapes(sys, data, cfg);
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be nonnegative");
    const Eigen::Index m = sys.a.rows();
    const Eigen::Index n = sys.a.cols();
    const Eigen::Index r = sys.reg.rows();
    const Eigen::VectorXd sw = sys.sigma.cwiseSqrt();
    const Eigen::Map<const Eigen::VectorXd> f(data.f.data(), m);
    const Eigen::Map<const Eigen::VectorXd> g(data.g.data(), m);
    const double wf = std::sqrt(cfg.weight_f);
    const double wg = std::sqrt(cfg.weight_g);
    const Eigen::MatrixXd d1a = sys.d1 * sys.a;

    StackedSystem out;
    out.matrix.resize(3 * m + r, n);
    out.rhs.resize(3 * m + r);
    out.matrix.topRows(m) = wf * sw.asDiagonal() * sys.a;
    out.matrix.middleRows(m, m) = wf * sw.asDiagonal() * d1a;
    out.matrix.middleRows(2 * m, m) = wg * sw.asDiagonal() * sys.b;
    out.matrix.bottomRows(r) = std::sqrt(alpha) * sys.reg;
    out.rhs.head(m) = wf * sw.cwiseProduct(f);
    out.rhs.segment(m, m) = wf * sw.cwiseProduct(sys.d1 * f);
    out.rhs.segment(2 * m, m) = wg * sw.cwiseProduct(g);
    out.rhs.tail(r).setZero();
    return out;
}

double cost(const DiscreteSystem& sys, const CauchyData& data, const TikhonovConfig& cfg, double alpha,
            const Eigen::VectorXd& b) {
    const StackedSystem st = stack_system(sys, data, cfg, alpha);
    return (st.matrix * b - st.rhs).squaredNorm();
}

Eigen::VectorXd cost_gradient(const DiscreteSystem& sys, const CauchyData& data, const TikhonovConfig& cfg,
                              double alpha, const Eigen::VectorXd& b) {
    const StackedSystem st = stack_system(sys, data, cfg, alpha);
    return 2.0 * st.matrix.transpose() * (st.matrix * b - st.rhs);
}

Minimizer minimize(const DiscreteSystem& sys, const CauchyData& data, const TikhonovConfig& cfg, double alpha) {
    const StackedSystem st = stack_system(sys, data, cfg, alpha);
    const Eigen::Index n = st.matrix.cols();

    Minimizer out;
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (st.matrix.col(i).cwiseAbs().maxCoeff() == 0.0) {
            out.inert.push_back(static_cast<std::size_t>(i));
        } else {
            active.push_back(i);
        }
    }
    const auto k = static_cast<Eigen::Index>(active.size());
    out.b = Eigen::VectorXd::Zero(n);
    if (k == 0) return out;

    Eigen::MatrixXd reduced(st.matrix.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) reduced.col(c) = st.matrix.col(active[static_cast<std::size_t>(c)]);

    // Only the Omega-boundary values of the base solutions enter the cost, so
    // with more basis functions than boundary nodes the coefficients are not
    // unique even for alpha > 0. The complete orthogonal decomposition
    // returns the minimum-norm minimizer; the field it produces is unique.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> qr(reduced.rows(), reduced.cols());
    // Iterative base solutions leave those combinations at the solver
    // tolerance instead of exactly zero; pivots that small are rank loss.
    qr.setThreshold(std::max(std::numeric_limits<double>::epsilon() * static_cast<double>(reduced.rows()),
                             kRankTolFactor * sys.solver_tol));
    qr.compute(reduced);
    const auto& rfac = qr.matrixT();
    const Eigen::Index rank = qr.rank();
    const double rmax = rank > 0 ? std::abs(rfac(0, 0)) : 0.0;
    const double rmin = rank > 0 ? std::abs(rfac(rank - 1, rank - 1)) : 0.0;
    out.condition_estimate = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
    out.rank = static_cast<std::size_t>(rank);
    if (alpha == 0.0 && rank < k) {
        std::ostringstream msg;
        msg << "unregularized least-squares system is rank deficient (rank " << rank << " of " << k
            << ", condition estimate " << out.condition_estimate << ")";
        throw NumericalError(msg.str(), out.condition_estimate);
    }
    const Eigen::VectorXd x = qr.solve(st.rhs);
    if (!x.allFinite()) throw NumericalError("least-squares solve produced non-finite values", out.condition_estimate);
    for (Eigen::Index c = 0; c < k; ++c) out.b[active[static_cast<std::size_t>(c)]] = x[c];
    return out;
}

ScalarField reconstruct_field(const Eigen::VectorXd& b, const BaseSolutionSet& set, const Grid2D& omega_grid) {
    if (static_cast<std::size_t>(b.size()) != set.fields.size()) {
        throw ValidationError("coefficient vector length does not match the basis size");
    }
    const auto off = set.basis.tilde_grid.embedding_offset(omega_grid);
    if (!off) throw ValidationError("Omega grid is not aligned with the base-solution grid");
    const auto [i0, j0] = *off;
    ScalarField u(omega_grid);
    for (std::size_t k = 0; k < set.fields.size(); ++k) {
        const double coef = b[static_cast<Eigen::Index>(k)];
        if (coef == 0.0) continue;
        const ScalarField& w = set.fields[k];
        for (std::size_t j = 0; j < omega_grid.ny(); ++j) {
            for (std::size_t i = 0; i < omega_grid.nx(); ++i) u.at(i, j) += coef * w.at(i0 + i, j0 + j);
        }
    }
    return u;
}

Residuals residuals(const DiscreteSystem& sys, const CauchyData& data, const BoundaryPartition& partition,
                    const Eigen::VectorXd& b) {
    const Eigen::Index m = sys.a.rows();
    const Eigen::Map<const Eigen::VectorXd> f(data.f.data(), m);
    const Eigen::Map<const Eigen::VectorXd> g(data.g.data(), m);
    const Eigen::VectorXd rf = sys.a * b - f;
    const Eigen::VectorXd rg = sys.b * b - g;
    Residuals out;
    out.f_h1 = discrete_norms(std::span<const double>(rf.data(), static_cast<std::size_t>(m)), partition).h1;
    out.g_l2 = discrete_norms(std::span<const double>(rg.data(), static_cast<std::size_t>(m)), partition).l2;
    out.reg_norm = (sys.reg * b).norm();
    return out;
}

ReconstructionResult reconstruct(const BaseSolutionSet& set, const DiscreteSystem& sys, const CauchyData& data,
                                 const BoundaryPartition& partition, const TikhonovConfig& cfg, double alpha) {
    Minimizer mz = minimize(sys, data, cfg, alpha);
    const Residuals res = residuals(sys, data, partition, mz.b);
    ScalarField u = reconstruct_field(mz.b, set, partition.grid());
    return ReconstructionResult{std::move(mz.b), std::move(u), res.f_h1, res.g_l2, res.reg_norm, alpha,
                                mz.condition_estimate};
}

}  // namespace cauchy
