#include "cauchy/forward.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cauchy/basis.hpp"

namespace cauchy {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
}

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t Xoshiro256::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256::gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ExactSolution ExactSolution::exp_cos(double a, double shift) {
    ExactSolution s;
    s.kind_ = Kind::exp_cos;
    s.a_ = a;
    s.shift_ = shift;
    return s;
}

ExactSolution ExactSolution::harmonic_poly(std::vector<std::complex<double>> coeffs) {
    if (coeffs.empty()) throw ValidationError("harmonic_poly needs at least one coefficient");
    ExactSolution s;
    s.kind_ = Kind::harmonic_poly;
    s.coeffs_ = std::move(coeffs);
    return s;
}

ExactSolution ExactSolution::constant(double c) {
    ExactSolution s;
    s.kind_ = Kind::constant;
    s.c_ = c;
    return s;
}

ExactSolution ExactSolution::parse(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw ValidationError("malformed exact solution '" + text + "'");
    }
    const std::string name = text.substr(0, open);
    std::vector<double> args;
    std::stringstream ss(text.substr(open + 1, close - open - 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            args.push_back(std::stod(tok, &used));
            if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError("bad number '" + tok + "' in exact solution '" + text + "'");
        }
    }
    if (name == "exp_cos" && args.size() == 2) return exp_cos(args[0], args[1]);
    if (name == "constant" && args.size() == 1) return constant(args[0]);
    if (name == "harmonic_poly" && !args.empty()) {
        return harmonic_poly(std::vector<std::complex<double>>(args.begin(), args.end()));
    }
    throw ValidationError("unknown exact solution '" + text + "'");
}

double ExactSolution::value(double x, double y) const {
    switch (kind_) {
        case Kind::exp_cos: return std::exp(a_ * x) * std::cos(a_ * (y + shift_));
        case Kind::constant: return c_;
        case Kind::harmonic_poly: {
            const std::complex<double> z(x, y);
            std::complex<double> acc = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
            return acc.real();
        }
    }
    return 0.0;
}

std::array<double, 2> ExactSolution::gradient(double x, double y) const {
    switch (kind_) {
        case Kind::exp_cos: {
            const double e = std::exp(a_ * x);
            return {a_ * e * std::cos(a_ * (y + shift_)), -a_ * e * std::sin(a_ * (y + shift_))};
        }
        case Kind::constant: return {0.0, 0.0};
        case Kind::harmonic_poly: {
            // p'(z) = u_x - i u_y
            const std::complex<double> z(x, y);
            std::complex<double> acc = 0.0;
            for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) acc = acc * z + static_cast<double>(k) * coeffs_[k];
            return {acc.real(), -acc.imag()};
        }
    }
    return {0.0, 0.0};
}

std::string ExactSolution::to_string() const {
    auto num = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    std::string out;
    switch (kind_) {
        case Kind::exp_cos: out = "exp_cos(" + num(a_) + "," + num(shift_) + ")"; break;
        case Kind::constant: out = "constant(" + num(c_) + ")"; break;
        case Kind::harmonic_poly:
            out = "harmonic_poly(";
            for (std::size_t k = 0; k < coeffs_.size(); ++k) {
                if (k) out += ",";
                out += num(coeffs_[k].real());
                if (coeffs_[k].imag() != 0.0) out += (coeffs_[k].imag() > 0 ? "+" : "") + num(coeffs_[k].imag()) + "i";
            }
            out += ")";
            break;
    }
    return out;
}

ScalarField ExactSolution::sample(const Grid2D& grid) const {
    return ScalarField::sample(grid, [this](double x, double y) { return value(x, y); });
}

NoiseModel parse_noise_model(std::string_view name) {
    if (name == "uniform") return NoiseModel::uniform;
    if (name == "gaussian") return NoiseModel::gaussian;
    throw ValidationError("unknown noise model '" + std::string(name) + "' (expected uniform or gaussian)");
}

std::string_view noise_model_name(NoiseModel m) { return m == NoiseModel::uniform ? "uniform" : "gaussian"; }

CauchyData trace_cauchy(const ExactSolution& exact, const BoundaryPartition& partition) {
    const Grid2D& g = partition.grid();
    CauchyData out;
    for (std::size_t k = 0; k < partition.gamma_size(); ++k) {
        const BoundaryNode& nd = partition.gamma_node(k);
        const double x = g.x(nd.i);
        const double y = g.y(nd.j);
        const auto grad = exact.gradient(x, y);
        double dn = 0.0;
        switch (partition.gamma_normal_side()[k]) {
            case Side::bottom: dn = -grad[1]; break;
            case Side::top: dn = grad[1]; break;
            case Side::left: dn = -grad[0]; break;
            case Side::right: dn = grad[0]; break;
        }
        out.points.push_back({x, y});
        out.f.push_back(exact.value(x, y));
        out.g.push_back(dn);
    }
    return out;
}

CauchyData add_noise(const CauchyData& data, const BoundaryPartition& partition, double level, std::uint64_t seed,
                     NoiseModel model) {
    if (!(level >= 0.0) || !std::isfinite(level)) throw ValidationError("noise level must be nonnegative");
    if (data.f.size() != data.g.size() || data.f.size() != partition.gamma_size()) {
        throw ValidationError("Cauchy data does not match the partition");
    }
    CauchyData out = data;
    out.noise_level = level;
    out.seed = seed;
    out.model = model;
    if (level == 0.0) {
        out.realized_eps = data.realized_eps;
        return out;
    }
    auto sup = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    Xoshiro256 rng(seed);
    auto draw = [&] { return model == NoiseModel::uniform ? 2.0 * rng.uniform() - 1.0 : rng.gaussian(); };
    const double fscale = level * sup(data.f);
    const double gscale = level * sup(data.g);
    for (double& v : out.f) v += fscale * draw();
    for (double& v : out.g) v += gscale * draw();

    std::vector<double> df(out.f.size()), dg(out.g.size());
    for (std::size_t k = 0; k < df.size(); ++k) {
        df[k] = out.f[k] - data.f[k];
        dg[k] = out.g[k] - data.g[k];
    }
    out.realized_eps = data.realized_eps + discrete_norms(df, partition).h1 + discrete_norms(dg, partition).l2;
    return out;
}

}  // namespace cauchy
