#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cauchy/errors.hpp"

namespace cauchy {

/// Axis-aligned rectangle [x0,x1]x[y0,y1].
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;

    [[nodiscard]] double width() const { return x1 - x0; }
    [[nodiscard]] double height() const { return y1 - y0; }
    /// True if `inner` closure lies in the open interior of *this.
    [[nodiscard]] bool strictly_contains(const Rect& inner) const;
    bool operator==(const Rect&) const = default;
};

Rect make_rect(double x0, double y0, double x1, double y1);

/// Rectangle sides, in counterclockwise traversal order starting at (x0,y0).
enum class Side : std::uint8_t { bottom = 0, right = 1, top = 2, left = 3 };

inline constexpr std::array<Side, 4> kAllSides{Side::bottom, Side::right, Side::top, Side::left};

std::string_view side_name(Side s);
Side parse_side(std::string_view name);

/// Small set of sides stored as a bitmask.
class SideSet {
public:
    SideSet() = default;
    SideSet(std::initializer_list<Side> sides);

    void insert(Side s) { bits_ |= bit(s); }
    [[nodiscard]] bool contains(Side s) const { return (bits_ & bit(s)) != 0; }
    [[nodiscard]] bool empty() const { return bits_ == 0; }
    [[nodiscard]] bool all() const { return bits_ == 0xF; }
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::vector<Side> sides() const;
    [[nodiscard]] SideSet united(SideSet other) const;
    [[nodiscard]] SideSet complement() const;
    [[nodiscard]] bool disjoint(SideSet other) const { return (bits_ & other.bits_) == 0; }
    /// Comma-separated names in traversal order, e.g. "bottom,top".
    [[nodiscard]] std::string to_string() const;
    static SideSet parse(std::string_view text);

    bool operator==(const SideSet&) const = default;

private:
    static std::uint8_t bit(Side s) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s)); }
    std::uint8_t bits_ = 0;
};

/// Uniform node-centered grid. Node (i,j) sits at (x0 + i*h, y0 + j*h) and
/// has linear index j*nx + i (row-major by j, then i).
class Grid2D {
public:
    Grid2D(Rect rect, double h, std::size_t nx, std::size_t ny);

    [[nodiscard]] const Rect& rect() const { return rect_; }
    [[nodiscard]] double h() const { return h_; }
    [[nodiscard]] std::size_t nx() const { return nx_; }
    [[nodiscard]] std::size_t ny() const { return ny_; }
    [[nodiscard]] std::size_t size() const { return nx_ * ny_; }

    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }
    [[nodiscard]] double x(std::size_t i) const { return rect_.x0 + static_cast<double>(i) * h_; }
    [[nodiscard]] double y(std::size_t j) const { return rect_.y0 + static_cast<double>(j) * h_; }
    [[nodiscard]] bool is_boundary(std::size_t i, std::size_t j) const {
        return i == 0 || j == 0 || i + 1 == nx_ || j + 1 == ny_;
    }
    /// Nearest node (i,j) to a point, clamped to the grid.
    [[nodiscard]] std::pair<std::size_t, std::size_t> nearest(double px, double py) const;

    /// Offset (in nodes) of `inner`'s origin within this grid, if `inner`
    /// shares spacing and node lattice and is fully covered.
    [[nodiscard]] std::optional<std::pair<std::size_t, std::size_t>> embedding_offset(const Grid2D& inner) const;

    bool operator==(const Grid2D& o) const {
        return rect_ == o.rect_ && h_ == o.h_ && nx_ == o.nx_ && ny_ == o.ny_;
    }

private:
    Rect rect_;
    double h_;
    std::size_t nx_;
    std::size_t ny_;
};

/// Builds the grid; h must divide both side lengths (1e-9 relative).
Grid2D build_grid(const Rect& rect, double h);

/// One node of the boundary traversal.
struct BoundaryNode {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t index = 0;  // grid linear index
    Side side = Side::bottom;  // corners belong to bottom/top
};

/// Ordered boundary of a grid (counterclockwise from (x0,y0)) together with
/// the measurement subset Gamma.
///
/// Corner nodes are labelled with the bottom or top side. Gamma is a union
/// of whole sides including their endpoint nodes. Gamma nodes are grouped in
/// runs of consecutive traversal positions; `gamma_sigma` holds trapezoid
/// arc-length weights along those runs (half weight at run ends), so that the
/// weights of a single unit-length side sum to 1.
class BoundaryPartition {
public:
    BoundaryPartition(const Grid2D& grid, SideSet gamma_sides);

    [[nodiscard]] const Grid2D& grid() const { return grid_; }
    [[nodiscard]] SideSet gamma_sides() const { return gamma_sides_; }

    /// Full boundary, traversal order.
    [[nodiscard]] const std::vector<BoundaryNode>& nodes() const { return nodes_; }
    /// Trapezoid arc-length weights over the full closed boundary.
    [[nodiscard]] const std::vector<double>& sigma() const { return sigma_; }
    [[nodiscard]] const std::vector<bool>& gamma_mask() const { return gamma_mask_; }

    /// Number of Gamma nodes (m).
    [[nodiscard]] std::size_t gamma_size() const { return gamma_pos_.size(); }
    /// Traversal positions of Gamma nodes, run by run.
    [[nodiscard]] const std::vector<std::size_t>& gamma_positions() const { return gamma_pos_; }
    /// Half-open ranges [begin,end) into gamma_positions(), one per run.
    [[nodiscard]] const std::vector<std::pair<std::size_t, std::size_t>>& gamma_runs() const { return runs_; }
    /// True when Gamma is the whole closed boundary (a single cyclic run).
    [[nodiscard]] bool gamma_closed() const { return gamma_sides_.all(); }
    [[nodiscard]] const std::vector<double>& gamma_sigma() const { return gamma_sigma_; }
    /// Side whose outward normal is used at each Gamma node.
    [[nodiscard]] const std::vector<Side>& gamma_normal_side() const { return gamma_normal_; }
    [[nodiscard]] const BoundaryNode& gamma_node(std::size_t k) const { return nodes_[gamma_pos_[k]]; }

    /// Traversal position of each grid node, or npos if interior.
    [[nodiscard]] std::size_t position_of(std::size_t grid_index) const { return position_[grid_index]; }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    Grid2D grid_;
    SideSet gamma_sides_;
    std::vector<BoundaryNode> nodes_;
    std::vector<double> sigma_;
    std::vector<bool> gamma_mask_;
    std::vector<std::size_t> gamma_pos_;
    std::vector<std::pair<std::size_t, std::size_t>> runs_;
    std::vector<double> gamma_sigma_;
    std::vector<Side> gamma_normal_;
    std::vector<std::size_t> position_;
};

BoundaryPartition boundary_partition(const Grid2D& grid, SideSet gamma_sides);

/// Ordered boundary traversal without any Gamma selection.
std::vector<BoundaryNode> boundary_nodes(const Grid2D& grid);

}  // namespace cauchy
