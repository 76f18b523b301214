#include "cauchy/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cauchy {

bool Rect::strictly_contains(const Rect& inner) const {
    return x0 < inner.x0 && y0 < inner.y0 && inner.x1 < x1 && inner.y1 < y1;
}

Rect make_rect(double x0, double y0, double x1, double y1) {
    if (!(x0 < x1) || !(y0 < y1)) {
        std::ostringstream msg;
        msg << "invalid rectangle (" << x0 << "," << y0 << ")-(" << x1 << "," << y1
            << "): need x0 < x1 and y0 < y1";
        throw ValidationError(msg.str());
    }
    return Rect{x0, y0, x1, y1};
}

std::string_view side_name(Side s) {
    switch (s) {
        case Side::bottom: return "bottom";
        case Side::right: return "right";
        case Side::top: return "top";
        case Side::left: return "left";
    }
    return "?";
}

Side parse_side(std::string_view name) {
    for (Side s : kAllSides) {
        if (side_name(s) == name) return s;
    }
    throw ValidationError("unknown side '" + std::string(name) + "' (expected bottom, right, top or left)");
}

SideSet::SideSet(std::initializer_list<Side> sides) {
    for (Side s : sides) insert(s);
}

std::size_t SideSet::size() const {
    std::size_t n = 0;
    for (Side s : kAllSides) n += contains(s) ? 1 : 0;
    return n;
}

std::vector<Side> SideSet::sides() const {
    std::vector<Side> out;
    for (Side s : kAllSides) {
        if (contains(s)) out.push_back(s);
    }
    return out;
}

SideSet SideSet::united(SideSet other) const {
    SideSet out = *this;
    out.bits_ |= other.bits_;
    return out;
}

SideSet SideSet::complement() const {
    SideSet out;
    out.bits_ = static_cast<std::uint8_t>(~bits_ & 0xF);
    return out;
}

std::string SideSet::to_string() const {
    std::string out;
    for (Side s : sides()) {
        if (!out.empty()) out += ',';
        out += side_name(s);
    }
    return out;
}

SideSet SideSet::parse(std::string_view text) {
    SideSet out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view token = text.substr(start, end - start);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        if (!token.empty()) out.insert(parse_side(token));
        start = end + 1;
    }
    return out;
}

Grid2D::Grid2D(Rect rect, double h, std::size_t nx, std::size_t ny) : rect_(rect), h_(h), nx_(nx), ny_(ny) {}

std::pair<std::size_t, std::size_t> Grid2D::nearest(double px, double py) const {
    auto snap = [this](double v, double origin, std::size_t n) {
        const double r = std::round((v - origin) / h_);
        return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n - 1)));
    };
    return {snap(px, rect_.x0, nx_), snap(py, rect_.y0, ny_)};
}

std::optional<std::pair<std::size_t, std::size_t>> Grid2D::embedding_offset(const Grid2D& inner) const {
    if (std::abs(inner.h_ - h_) > 1e-12 * h_) return std::nullopt;
    const double ox = (inner.rect_.x0 - rect_.x0) / h_;
    const double oy = (inner.rect_.y0 - rect_.y0) / h_;
    const double rx = std::round(ox);
    const double ry = std::round(oy);
    if (std::abs(ox - rx) > 1e-9 || std::abs(oy - ry) > 1e-9 || rx < 0 || ry < 0) return std::nullopt;
    const auto i0 = static_cast<std::size_t>(rx);
    const auto j0 = static_cast<std::size_t>(ry);
    if (i0 + inner.nx_ > nx_ || j0 + inner.ny_ > ny_) return std::nullopt;
    return std::make_pair(i0, j0);
}

namespace {

std::size_t intervals(double length, double h, const char* axis) {
    const double q = length / h;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q)) {
        std::ostringstream msg;
        msg << "grid spacing h=" << h << " does not divide the " << axis << "-extent " << length;
        throw ValidationError(msg.str());
    }
    return static_cast<std::size_t>(r);
}

}  // namespace

Grid2D build_grid(const Rect& rect, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("grid spacing h must be positive and finite");
    make_rect(rect.x0, rect.y0, rect.x1, rect.y1);
    const std::size_t nxi = intervals(rect.width(), h, "x");
    const std::size_t nyi = intervals(rect.height(), h, "y");
    return Grid2D(rect, h, nxi + 1, nyi + 1);
}

std::vector<BoundaryNode> boundary_nodes(const Grid2D& g) {
    const std::size_t nx = g.nx();
    const std::size_t ny = g.ny();
    std::vector<BoundaryNode> out;
    out.reserve(2 * (nx - 1) + 2 * (ny - 1));
    auto push = [&](std::size_t i, std::size_t j, Side s) { out.push_back({i, j, g.index(i, j), s}); };
    for (std::size_t i = 0; i < nx; ++i) push(i, 0, Side::bottom);
    for (std::size_t j = 1; j + 1 < ny; ++j) push(nx - 1, j, Side::right);
    for (std::size_t k = 0; k < nx; ++k) push(nx - 1 - k, ny - 1, Side::top);
    for (std::size_t k = 1; k + 1 < ny; ++k) push(0, ny - 1 - k, Side::left);
    return out;
}

namespace {

// Sides a boundary node lies on (one for edge nodes, two for corners).
std::vector<Side> sides_of(const Grid2D& g, std::size_t i, std::size_t j) {
    std::vector<Side> out;
    if (j == 0) out.push_back(Side::bottom);
    if (i + 1 == g.nx()) out.push_back(Side::right);
    if (j + 1 == g.ny()) out.push_back(Side::top);
    if (i == 0) out.push_back(Side::left);
    return out;
}

}  // namespace

BoundaryPartition::BoundaryPartition(const Grid2D& grid, SideSet gamma_sides)
    : grid_(grid), gamma_sides_(gamma_sides) {
    if (gamma_sides.empty()) throw ValidationError("Gamma must be a nonempty open subset of the boundary");
    if (grid.nx() < 2 || grid.ny() < 2) throw ValidationError("grid too small for a boundary partition");

    nodes_ = boundary_nodes(grid);
    const std::size_t nb = nodes_.size();
    const double h = grid.h();

    sigma_.assign(nb, h);
    gamma_mask_.assign(nb, false);
    position_.assign(grid.size(), npos);
    std::vector<Side> normal(nb, Side::bottom);
    for (std::size_t p = 0; p < nb; ++p) {
        const auto& nd = nodes_[p];
        position_[nd.index] = p;
        // A node is in Gamma if any side it lies on is flagged. Normal
        // tie-break: prefer the node's own label (bottom/top at corners).
        for (Side s : sides_of(grid, nd.i, nd.j)) {
            if (gamma_sides.contains(s)) {
                if (!gamma_mask_[p] || s == nd.side) normal[p] = s;
                gamma_mask_[p] = true;
            }
        }
    }

    if (gamma_sides.all()) {
        for (std::size_t p = 0; p < nb; ++p) gamma_pos_.push_back(p);
        runs_.emplace_back(0, nb);
    } else {
        // Rotate the traversal so it starts just after a non-Gamma node;
        // runs then never wrap around the end of the sequence.
        std::size_t start = 0;
        while (gamma_mask_[start]) ++start;
        for (std::size_t k = 1; k <= nb; ++k) {
            const std::size_t p = (start + k) % nb;
            if (!gamma_mask_[p]) continue;
            const std::size_t prev = (p + nb - 1) % nb;
            if (!gamma_mask_[prev] || runs_.empty()) runs_.emplace_back(gamma_pos_.size(), gamma_pos_.size());
            gamma_pos_.push_back(p);
            runs_.back().second = gamma_pos_.size();
        }
    }

    gamma_sigma_.assign(gamma_pos_.size(), h);
    if (!gamma_sides.all()) {
        for (const auto& [b, e] : runs_) {
            gamma_sigma_[b] = 0.5 * h;
            gamma_sigma_[e - 1] = 0.5 * h;
        }
    }
    gamma_normal_.reserve(gamma_pos_.size());
    for (std::size_t p : gamma_pos_) gamma_normal_.push_back(normal[p]);
}

BoundaryPartition boundary_partition(const Grid2D& grid, SideSet gamma_sides) {
    return BoundaryPartition(grid, gamma_sides);
}

}  // namespace cauchy
