#pragma once

#include <Eigen/Dense>

#include "cauchy/basis.hpp"
#include "cauchy/forward.hpp"

namespace cauchy {

struct AlphaRule {
    enum class Kind { a_priori, fixed };
    Kind kind = Kind::a_priori;
    /// Proportionality constant c (a_priori) or alpha itself (fixed).
    double value = 1.0;

    static AlphaRule a_priori(double c) { return {Kind::a_priori, c}; }
    static AlphaRule fixed(double alpha) { return {Kind::fixed, alpha}; }
};

struct TikhonovConfig {
    AlphaRule alpha_rule;
    RegMode reg_mode = RegMode::gram;
    double weight_f = 1.0;
    double weight_g = 1.0;
};

/// a_priori(c): alpha = c * (eps^2 + h^2); fixed: passthrough.
double select_alpha(double eps, double h, const AlphaRule& rule);

struct Minimizer {
    Eigen::VectorXd b;
    /// Ratio of extreme diagonal entries of the rank-revealing triangular
    /// factor, over its numerical rank.
    double condition_estimate = 0.0;
    std::size_t rank = 0;
    /// Basis indices whose stacked column is identically zero; their
    /// coefficient is fixed at 0.
    std::vector<std::size_t> inert;
};

/// Stacked weighted least-squares system M b ~ rhs whose squared residual
/// is the discrete cost functional.
struct StackedSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
};

StackedSystem stack_system(const DiscreteSystem& sys, const CauchyData& data, const TikhonovConfig& cfg, double alpha);

/// w_f ||A b - f||^2_{H1} + w_g ||B b - g||^2_{L2} + alpha ||reg b||^2.
double cost(const DiscreteSystem& sys, const CauchyData& data, const TikhonovConfig& cfg, double alpha,
            const Eigen::VectorXd& b);
Eigen::VectorXd cost_gradient(const DiscreteSystem& sys, const CauchyData& data, const TikhonovConfig& cfg,
                              double alpha, const Eigen::VectorXd& b);

/// Minimum-norm minimizer of the cost, by complete orthogonal decomposition
/// of the stacked system. Pivots below 1e3 * sys.solver_tol (relative) count
/// as rank loss. Throws NumericalError when alpha == 0 and the system is rank
/// deficient.
Minimizer minimize(const DiscreteSystem& sys, const CauchyData& data, const TikhonovConfig& cfg, double alpha);

/// sum_i b_i w_i restricted to the Omega grid.
ScalarField reconstruct_field(const Eigen::VectorXd& b, const BaseSolutionSet& set, const Grid2D& omega_grid);

struct Residuals {
    double f_h1 = 0.0;
    double g_l2 = 0.0;
    double reg_norm = 0.0;
};

Residuals residuals(const DiscreteSystem& sys, const CauchyData& data, const BoundaryPartition& partition,
                    const Eigen::VectorXd& b);

struct ReconstructionResult {
    Eigen::VectorXd b;
    ScalarField u_star;
    double residual_f = 0.0;
    double residual_g = 0.0;
    double reg_norm = 0.0;
    double alpha_used = 0.0;
    double condition_estimate = 0.0;
};

/// minimize + reconstruct_field + residuals.
ReconstructionResult reconstruct(const BaseSolutionSet& set, const DiscreteSystem& sys, const CauchyData& data,
                                 const BoundaryPartition& partition, const TikhonovConfig& cfg, double alpha);

}  // namespace cauchy
