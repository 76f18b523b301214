#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cauchy/harmonic_measure.hpp"

using namespace cauchy;

namespace {

const Rect kUnit{0.0, 0.0, 1.0, 1.0};

// Direct sine/sinh partial sum for the bottom side in long double; sinh(k*pi)
// stays finite there for every k used below.
long double bottom_series_ld(long double x, long double y, int terms) {
    const long double pi = 3.141592653589793238462643383279502884L;
    long double s = 0.0L;
    for (int n = 0; n < terms; ++n) {
        const long double k = 2.0L * n + 1.0L;
        s += 4.0L / (k * pi) * std::sin(k * pi * x) * std::sinh(k * pi * (1.0L - y)) / std::sinh(k * pi);
    }
    return s;
}

IndicateField tau_for(const Grid2D& g, SideSet s) { return compute_indicate(g, boundary_partition(g, s)); }

}  // namespace

TEST_CASE("indicate function at the centre of the unit square") {
    const Grid2D g = build_grid(kUnit, 1.0 / 64.0);
    CHECK(tau_for(g, SideSet{Side::bottom}).tau.at(32, 32) == doctest::Approx(0.25).epsilon(2e-3 / 0.25));
    CHECK(std::abs(tau_for(g, SideSet{Side::bottom, Side::top}).tau.at(32, 32) - 0.5) <= 2e-3);
    CHECK(std::abs(tau_for(g, SideSet{Side::bottom, Side::top, Side::left}).tau.at(32, 32) - 0.75) <= 2e-3);
}

TEST_CASE("indicate field invariants") {
    const Grid2D g = build_grid(kUnit, 1.0 / 32.0);
    const IndicateField f = tau_for(g, SideSet{Side::bottom, Side::left});
    const auto& p = f.gamma;
    for (std::size_t pos = 0; pos < p.nodes().size(); ++pos) {
        const auto& nd = p.nodes()[pos];
        CHECK(f.tau[nd.index] == (p.gamma_mask()[pos] ? 1.0 : 0.0));
    }
    for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
            CHECK(f.tau.at(i, j) > 0.0);
            CHECK(f.tau.at(i, j) < 1.0);
        }
    }
}

TEST_CASE("whole-boundary Gamma is rejected") {
    const Grid2D g = build_grid(kUnit, 0.25);
    const auto all = SideSet{Side::bottom, Side::right, Side::top, Side::left};
    CHECK_THROWS_AS(compute_indicate(g, boundary_partition(g, all)), ValidationError);
}

TEST_CASE("additivity, complement and monotonicity") {
    const Grid2D g = build_grid(kUnit, 1.0 / 32.0);
    const double tol = kDefaultSolverTol;
    const IndicateField b = tau_for(g, SideSet{Side::bottom});
    const IndicateField t = tau_for(g, SideSet{Side::top});
    const IndicateField bt = tau_for(g, SideSet{Side::bottom, Side::top});
    const IndicateField rl = tau_for(g, SideSet{Side::right, Side::left});
    for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
            CHECK(std::abs(bt.tau.at(i, j) - b.tau.at(i, j) - t.tau.at(i, j)) <= 2 * tol);
            CHECK(std::abs(rl.tau.at(i, j) - (1.0 - bt.tau.at(i, j))) <= 2 * tol);
            CHECK(bt.tau.at(i, j) >= b.tau.at(i, j) - tol);
        }
    }
}

TEST_CASE("series oracle values") {
    CHECK(std::abs(rectangle_series_tau(0.5, 0.5, SideSet{Side::bottom}, 200) - 0.25) <= 1e-9);
    CHECK(std::abs(rectangle_series_tau(0.5, 0.5, SideSet{Side::bottom, Side::top, Side::left}, 200) - 0.75) <= 1e-9);
    // 40-digit partial sum, 400 odd terms.
    CHECK(std::abs(rectangle_series_tau(0.5, 0.25, SideSet{Side::bottom}, 400) - 0.5405292182595098750) <= 1e-13);
    CHECK(std::abs(rectangle_series_tau(0.3, 0.7, SideSet{Side::bottom}, 400) - 0.0972464607976844632) <= 1e-13);
    const double a = rectangle_series_tau(0.5, 0.25, SideSet{Side::bottom}, 400);
    const double b = rectangle_series_tau(0.5, 0.25, SideSet{Side::bottom}, 800);
    CHECK(std::abs(a - b) < 1e-12);
    CHECK_THROWS_AS(rectangle_series_tau(0.5, 0.0, SideSet{Side::bottom}), ValidationError);
    CHECK_THROWS_AS(rectangle_series_tau(0.5, 0.5, SideSet{Side::bottom}, 10), ValidationError);
}

TEST_CASE("series oracle agrees with a long double partial sum and side symmetry") {
    for (double x : {0.1, 0.35, 0.5, 0.8}) {
        for (double y : {0.05, 0.3, 0.6, 0.9}) {
            const double ref = static_cast<double>(bottom_series_ld(x, y, 200));
            CHECK(rectangle_series_tau(x, y, SideSet{Side::bottom}, 200) == doctest::Approx(ref).epsilon(1e-12));
            CHECK(rectangle_series_tau(x, y, SideSet{Side::top}, 200) ==
                  doctest::Approx(static_cast<double>(bottom_series_ld(x, 1.0 - y, 200))).epsilon(1e-12));
            CHECK(rectangle_series_tau(x, y, SideSet{Side::left}, 200) ==
                  doctest::Approx(static_cast<double>(bottom_series_ld(y, x, 200))).epsilon(1e-12));
        }
    }
    // The four sides sum to one.
    const SideSet all_but_right{Side::bottom, Side::top, Side::left};
    const double s = rectangle_series_tau(0.3, 0.4, all_but_right, 200) + rectangle_series_tau(0.3, 0.4, SideSet{Side::right}, 200);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("FDM indicate function matches the series away from Gamma endpoints") {
    const Grid2D g = build_grid(kUnit, 1.0 / 64.0);
    for (SideSet sides : {SideSet{Side::bottom}, SideSet{Side::bottom, Side::left}, SideSet{Side::bottom, Side::top}}) {
        const IndicateField f = tau_for(g, sides);
        const auto mask = away_from_gamma_endpoints(f);
        double worst = 0.0;
        for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
            for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
                if (!mask[g.index(i, j)]) continue;
                worst = std::max(worst, std::abs(f.tau.at(i, j) - rectangle_series_tau(g.x(i), g.y(j), sides, 200)));
            }
        }
        CHECK(worst <= 5e-3);
    }
    const IndicateField f = tau_for(g, SideSet{Side::bottom});
    CHECK(std::abs(f.tau.at(32, 16) - rectangle_series_tau(0.5, 0.25, SideSet{Side::bottom})) <= 5e-3);
}

TEST_CASE("annulus harmonic measure") {
    CHECK(annulus_tau(1.0, 3.0) == 1.0);
    CHECK(annulus_tau(3.0, 3.0) == 0.0);
    CHECK(annulus_tau(std::sqrt(5.0), 5.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(annulus_tau(0.5, 2.0), ValidationError);
    CHECK_THROWS_AS(annulus_tau(1.0, 1.0), ValidationError);
}

TEST_CASE("two-constants bound") {
    CHECK(two_constants_bound(2.0, 2.0, 0.3) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(two_constants_bound(0.1, 5.0, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(two_constants_bound(0.1, 5.0, 0.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS(two_constants_bound(3.0, 2.0, 0.5), ValidationError);
}

TEST_CASE("two-constants bound is attained by eps z^n on the annulus") {
    const int n = 3;
    const double big_r = 2.0, r = 1.5, eps = 1e-2;
    const long double w = static_cast<long double>(eps) * std::pow(static_cast<long double>(r), n);
    const long double m = static_cast<long double>(eps) * std::pow(static_cast<long double>(big_r), n);
    const long double tau_ld = std::log(static_cast<long double>(big_r) / r) / std::log(static_cast<long double>(big_r));
    const long double bound_ld = std::pow(m, 1.0L - tau_ld) * std::pow(static_cast<long double>(eps), tau_ld);
    CHECK(std::abs(static_cast<double>((w - bound_ld) / w)) <= 1e-15);
    const double bound = two_constants_bound(eps, static_cast<double>(m), annulus_tau(r, big_r));
    CHECK(std::abs(static_cast<double>((bound - w) / w)) <= 1e-12);
}

TEST_CASE("reliable region") {
    const Grid2D g = build_grid(kUnit, 1.0 / 32.0);
    const IndicateField one = tau_for(g, SideSet{Side::bottom});
    const IndicateField two = tau_for(g, SideSet{Side::bottom, Side::top});
    const ReliableRegion r1 = reliable_region(one, 0.5);
    CHECK(reliable_region(two, 0.5).count() > r1.count());

    // threshold 1 keeps exactly the Gamma nodes.
    const ReliableRegion top = reliable_region(one, 1.0);
    CHECK(top.count() == one.gamma.gamma_size());

    // Tiny threshold keeps everything except the non-Gamma boundary.
    const ReliableRegion low = reliable_region(one, 1e-300);
    CHECK(low.count() == g.size() - (one.gamma.nodes().size() - one.gamma.gamma_size()));

    // Raising the threshold shrinks the region.
    const ReliableRegion r2 = reliable_region(one, 0.7);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (r2.mask[k]) CHECK(r1.mask[k]);
    }
    CHECK_THROWS_AS(reliable_region(one, 0.0), ValidationError);
}

TEST_CASE("contour vertices lie on the level set") {
    const Grid2D g = build_grid(kUnit, 1.0 / 32.0);
    const IndicateField f = tau_for(g, SideSet{Side::bottom});
    const LevelContour c = extract_contour(f.tau, 0.5);
    REQUIRE(c.polylines.size() == 1);
    CHECK(c.polylines[0].size() > 10);
    for (const auto& p : c.polylines[0]) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= 1.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y <= 1.0);
        CHECK(std::abs(interpolate(f.tau, p) - 0.5) <= 1e-6);
    }
    // The open curve runs from the left side to the right side near the bottom.
    const auto& line = c.polylines[0];
    const double xa = std::min(line.front().x, line.back().x);
    const double xb = std::max(line.front().x, line.back().x);
    CHECK(xa == doctest::Approx(0.0));
    CHECK(xb == doctest::Approx(1.0));
}

TEST_CASE("closed contour of a radial bump") {
    const Grid2D g = build_grid(kUnit, 1.0 / 32.0);
    const ScalarField bump =
        ScalarField::sample(g, [](double x, double y) { return std::exp(-10.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5))); });
    const LevelContour c = extract_contour(bump, 0.5);
    REQUIRE(c.polylines.size() == 1);
    const auto& loop = c.polylines[0];
    CHECK(loop.front().x == loop.back().x);
    CHECK(loop.front().y == loop.back().y);
    const double r = std::sqrt(std::log(2.0) / 10.0);
    for (const auto& p : loop) CHECK(std::hypot(p.x - 0.5, p.y - 0.5) == doctest::Approx(r).epsilon(0.02));
}

TEST_CASE("bilinear interpolation reproduces bilinear fields") {
    const Grid2D g = build_grid(kUnit, 0.25);
    const ScalarField f = ScalarField::sample(g, [](double x, double y) { return 1.0 + 2.0 * x - y + 3.0 * x * y; });
    for (Point2 p : {Point2{0.1, 0.2}, Point2{0.6, 0.95}, Point2{1.0, 1.0}, Point2{0.0, 0.0}}) {
        CHECK(interpolate(f, p) == doctest::Approx(1.0 + 2.0 * p.x - p.y + 3.0 * p.x * p.y).epsilon(1e-14));
    }
}
