#include "cauchy/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cauchy {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string shortest_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string field_csv(const ScalarField& field) {
    const Grid2D& g = field.grid();
    std::string s = "x,y,value\n";
    s.reserve(g.size() * 64);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            s += format_double(g.x(i));
            s += ',';
            s += format_double(g.y(j));
            s += ',';
            s += format_double(field.at(i, j));
            s += '\n';
        }
    }
    return s;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::string s;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) s += ',';
            s += format_double(m(r, c));
        }
        s += '\n';
    }
    return s;
}

std::string contour_json(const LevelContour& contour) {
    std::string s = "[";
    for (std::size_t p = 0; p < contour.polylines.size(); ++p) {
        s += p ? ",\n [" : "\n [";
        const auto& line = contour.polylines[p];
        for (std::size_t k = 0; k < line.size(); ++k) {
            if (k) s += ',';
            s += '[' + shortest_double(line[k].x) + ',' + shortest_double(line[k].y) + ']';
        }
        s += ']';
    }
    s += contour.polylines.empty() ? "]\n" : "\n]\n";
    return s;
}

namespace {

// Diverging blue-yellow-red ramp, interpolated linearly in RGB.
constexpr std::array<std::array<double, 3>, 5> kStops{{
    {44, 123, 182},
    {171, 217, 233},
    {255, 255, 191},
    {253, 174, 97},
    {215, 25, 28},
}};

std::string hex_colour(std::array<unsigned char, 3> c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::array<unsigned char, 3> colormap(double t) {
    if (!std::isfinite(t)) t = 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * static_cast<double>(kStops.size() - 1);
    const auto k = std::min(static_cast<std::size_t>(pos), kStops.size() - 2);
    const double w = pos - static_cast<double>(k);
    std::array<unsigned char, 3> out{};
    for (std::size_t c = 0; c < 3; ++c) {
        const double v = (1.0 - w) * kStops[k][c] + w * kStops[k + 1][c];
        out[c] = static_cast<unsigned char>(std::lround(v));
    }
    return out;
}

std::string heatmap_svg(const ScalarField& field, const std::string& title, const std::vector<LevelContour>& overlays) {
    constexpr double kSize = 512.0;
    const Grid2D& g = field.grid();
    const Rect& r = g.rect();
    const auto vals = field.values();
    const auto [lo_it, hi_it] = std::minmax_element(vals.begin(), vals.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double span = hi > lo ? hi - lo : 1.0;
    const double sx = kSize / r.width();
    const double sy = kSize / r.height();
    auto px = [&](double x) { return (x - r.x0) * sx; };
    auto py = [&](double y) { return kSize - (y - r.y0) * sy; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" viewBox=\"0 0 512 512\">\n";
    s << "<title>" << title << " min=" << format_double(lo) << " max=" << format_double(hi) << "</title>\n";
    s << "<g shape-rendering=\"crispEdges\">\n";
    const double cw = g.h() * sx;
    const double ch = g.h() * sy;
    for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
            const double v =
                0.25 * (field.at(i, j) + field.at(i + 1, j) + field.at(i, j + 1) + field.at(i + 1, j + 1));
            s << "<rect x=\"" << fixed3(px(g.x(i))) << "\" y=\"" << fixed3(py(g.y(j + 1))) << "\" width=\""
              << fixed3(cw) << "\" height=\"" << fixed3(ch) << "\" fill=\"" << hex_colour(colormap((v - lo) / span))
              << "\"/>\n";
        }
    }
    s << "</g>\n";
    for (const auto& c : overlays) {
        for (const auto& line : c.polylines) {
            s << "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"2\" points=\"";
            for (std::size_t k = 0; k < line.size(); ++k) {
                if (k) s << ' ';
                s << fixed3(px(line[k].x)) << ',' << fixed3(py(line[k].y));
            }
            s << "\"/>\n";
        }
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace cauchy
