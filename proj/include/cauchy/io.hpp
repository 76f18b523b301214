#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchy/harmonic_measure.hpp"
#include "cauchy/poisson_fdm.hpp"

namespace cauchy {

/// printf("%.17g"): round-trips every double.
std::string format_double(double v);

/// Shortest text that parses back to the same double.
std::string shortest_double(double v);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

/// CSV with header `x,y,value`, one row per node in grid order.
std::string field_csv(const ScalarField& field);

/// Row-major matrix CSV without header; the shape goes in a JSON sidecar.
std::string matrix_csv(const Eigen::MatrixXd& m);

/// JSON array of polylines, each an array of [x,y] pairs.
std::string contour_json(const LevelContour& contour);

/// Colour for a value already normalized to [0,1]; see README for the stops.
std::array<unsigned char, 3> colormap(double t);

/// 512x512 heatmap of the field with optional contour polylines drawn on top.
std::string heatmap_svg(const ScalarField& field, const std::string& title,
                        const std::vector<LevelContour>& overlays = {});

}  // namespace cauchy
