#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cauchy/grid.hpp"
#include "cauchy/harmonic_measure.hpp"

namespace cauchy {

/// splitmix64, used to expand a 64-bit seed into generator state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 with state seeded by four splitmix64 outputs.
/// Uniform doubles are (next() >> 11) * 2^-53 in [0, 1).
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);
    std::uint64_t next();
    double uniform();
    /// Box-Muller, cosine branch only; consumes two uniforms per draw.
    double gaussian();

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Closed-form harmonic ground truth.
class ExactSolution {
public:
    enum class Kind { exp_cos, harmonic_poly, constant };

    /// e^{a x} cos(a (y + shift))
    static ExactSolution exp_cos(double a, double shift);
    /// Re sum_k c_k z^k with z = x + i y
    static ExactSolution harmonic_poly(std::vector<std::complex<double>> coeffs);
    static ExactSolution constant(double c);
    /// Parses "exp_cos(4,0.2)", "harmonic_poly(0,0,1)" (real coefficients,
    /// lowest degree first) or "constant(1)".
    static ExactSolution parse(const std::string& text);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double value(double x, double y) const;
    /// (du/dx, du/dy)
    [[nodiscard]] std::array<double, 2> gradient(double x, double y) const;
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] ScalarField sample(const Grid2D& grid) const;

private:
    Kind kind_ = Kind::constant;
    double a_ = 0.0;
    double shift_ = 0.0;
    double c_ = 0.0;
    std::vector<std::complex<double>> coeffs_;
};

enum class NoiseModel { uniform, gaussian };

NoiseModel parse_noise_model(std::string_view name);
std::string_view noise_model_name(NoiseModel m);

/// Dirichlet trace f and outward normal derivative g sampled at Gamma nodes.
struct CauchyData {
    std::vector<Point2> points;
    std::vector<double> f;
    std::vector<double> g;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
    NoiseModel model = NoiseModel::uniform;
    /// Discrete ||f - f_clean||_{H1(Gamma)} + ||g - g_clean||_{L2(Gamma)}.
    double realized_eps = 0.0;
};

/// Exact Cauchy data; g is differentiated analytically.
CauchyData trace_cauchy(const ExactSolution& exact, const BoundaryPartition& partition);

/// f_j += level * ||f||_inf * xi_j, then g_j += level * ||g||_inf * eta_j,
/// with xi, eta i.i.d. uniform on [-1,1] or standard normal, all f draws
/// taken before any g draw from one Xoshiro256(seed) stream.
CauchyData add_noise(const CauchyData& data, const BoundaryPartition& partition, double level, std::uint64_t seed,
                     NoiseModel model = NoiseModel::uniform);

}  // namespace cauchy
