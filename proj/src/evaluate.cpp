#include "cauchy/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cauchy {

ScalarField pointwise_error(const ScalarField& u_star, const ExactSolution& exact) {
    const Grid2D& g = u_star.grid();
    ScalarField out(g);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) out.at(i, j) = std::abs(u_star.at(i, j) - exact.value(g.x(i), g.y(j)));
    }
    return out;
}

std::vector<bool> interior_mask(const Grid2D& g, std::size_t layers) {
    std::vector<bool> mask(g.size(), false);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            mask[g.index(i, j)] = i >= layers && j >= layers && i + layers < g.nx() && j + layers < g.ny();
        }
    }
    return mask;
}

std::vector<std::pair<std::size_t, std::size_t>> probe_lattice(const Grid2D& g) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const Rect& r = g.rect();
    for (int b = 1; b <= 5; ++b) {
        for (int a = 1; a <= 5; ++a) out.push_back(g.nearest(r.x0 + a * r.width() / 6.0, r.y0 + b * r.height() / 6.0));
    }
    return out;
}

EnvelopeReport envelope_check(const ScalarField& err, const IndicateField& tau, double eps, std::optional<double> c_max,
                              double m_used, std::size_t layers) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("envelope_check requires 0 < eps < 1");
    const Grid2D& g = err.grid();
    if (!(g == tau.tau.grid())) throw ValidationError("error and tau fields live on different grids");

    const auto mask = interior_mask(g, layers);
    EnvelopeReport rep;
    rep.eps = eps;
    rep.m_used = m_used;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!mask[k]) continue;
        rep.c_fit = std::max(rep.c_fit, err[k] / std::pow(eps, tau.tau[k]));
    }
    rep.c_max = c_max.value_or(rep.c_fit);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            if (!mask[k]) continue;
            if (err[k] > rep.c_max * std::pow(eps, tau.tau[k]) * (1.0 + 1e-12)) {
                ++rep.violations;
                rep.violation_points.push_back({g.x(i), g.y(j)});
            }
        }
    }
    for (const auto& [i, j] : probe_lattice(g)) {
        const std::size_t k = g.index(i, j);
        rep.probes.push_back({{g.x(i), g.y(j)}, tau.tau[k], err[k], rep.c_fit * std::pow(eps, tau.tau[k])});
    }
    return rep;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& eps_err) {
    if (eps_err.size() < 3) throw ValidationError("rate_fit needs at least 3 noise levels");
    double lo = eps_err.front().first;
    double hi = lo;
    for (const auto& [e, r] : eps_err) {
        if (!(e > 0.0) || !(r > 0.0)) throw ValidationError("rate_fit needs positive eps and errors");
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (hi / lo < 100.0 * (1.0 - 1e-9)) throw ValidationError("rate_fit noise levels must span at least 2 decades");
    const auto n = static_cast<double>(eps_err.size());
    double sx = 0, sy = 0;
    for (const auto& [e, r] : eps_err) {
        sx += std::log(e);
        sy += std::log(r);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& [e, r] : eps_err) {
        sxx += (std::log(e) - mx) * (std::log(e) - mx);
        sxy += (std::log(e) - mx) * (std::log(r) - my);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

ReliabilitySummary reliability_summary(const ScalarField& err, const ScalarField& tau, double threshold,
                                       const std::vector<bool>* mask) {
    if (!(err.grid() == tau.grid())) throw ValidationError("error and tau fields live on different grids");
    std::vector<double> in, out;
    for (std::size_t k = 0; k < err.grid().size(); ++k) {
        if (mask && !(*mask)[k]) continue;
        (tau[k] >= threshold ? in : out).push_back(err[k]);
    }
    auto stats = [](const std::vector<double>& v) {
        RegionStats s;
        s.count = v.size();
        s.median = median(v);
        s.max = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
        return s;
    };
    ReliabilitySummary rep;
    rep.threshold = threshold;
    rep.inside = stats(in);
    if (!out.empty()) {
        rep.outside = stats(out);
        if (rep.inside.count > 0 && rep.inside.median > 0.0) rep.median_ratio = rep.outside->median / rep.inside.median;
    }
    return rep;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t s = 0; s < idx.size();) {
        std::size_t e = s;
        while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[s]]) ++e;
        const double avg = 0.5 * static_cast<double>(s + e) + 1.0;
        for (std::size_t k = s; k <= e; ++k) r[idx[k]] = avg;
        s = e + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("spearman needs two equal-length samples (n >= 2)");
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        sxy += (rx[k] - mx) * (ry[k] - my);
        sxx += (rx[k] - mx) * (rx[k] - mx);
        syy += (ry[k] - my) * (ry[k] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace cauchy
