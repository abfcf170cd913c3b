#ifndef SLICEGS_SEG_SMRF_HPP
#define SLICEGS_SEG_SMRF_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "slicegs/types.hpp"

namespace slicegs::smrf {

struct CellIndex {
    std::size_t cx{0};
    std::size_t cy{0};
};

/// Minimum-elevation raster over the xy bounding box of a cloud. Cells are
/// row-major with cy as the row.
struct SmrfGrid {
    double cell_size{1.0};
    double origin_x{0.0};
    double origin_y{0.0};
    std::size_t width{0};
    std::size_t height{0};
    std::vector<double> min_z;
    std::vector<std::uint8_t> occupied;
    std::vector<std::uint8_t> inpainted;

    [[nodiscard]] std::size_t cell(std::size_t cx, std::size_t cy) const noexcept { return cy * width + cx; }
    [[nodiscard]] std::size_t cell_count() const noexcept { return width * height; }
    /// Cell containing (x, y), or nothing outside the grid.
    [[nodiscard]] std::optional<CellIndex> locate(double x, double y) const noexcept;
};

/// Rasterizes per-cell minimum z and fills empty cells from the nearest occupied cell
/// (cell-center distance, ties to the lower elevation). Throws InvalidArgument for an
/// empty cloud or a non-positive cell size.
SmrfGrid rasterize_min_surface(const PointCloud& cloud, double cell_size);

/// Morphological erosion / dilation with a disk of `radius` cells (cells whose center
/// lies within `radius` of the origin cell). Out-of-grid cells are ignored.
std::vector<double> erode_disk(const std::vector<double>& surface, std::size_t width, std::size_t height,
                               std::size_t radius);
std::vector<double> dilate_disk(const std::vector<double>& surface, std::size_t width, std::size_t height,
                                std::size_t radius);
std::vector<double> open_disk(const std::vector<double>& surface, std::size_t width, std::size_t height,
                              std::size_t radius);

struct OpeningResult {
    /// 1 where the progressive opening flagged the cell as an object.
    std::vector<std::uint8_t> non_ground;
    /// Original minimum surface on unflagged cells, final opened surface on flagged ones.
    std::vector<double> bare_earth;
};

/// For w = 1..max_window_radius: open the current surface with a disk of radius w and
/// flag cells where (current - opened) > slope * w * cell_size; the opened surface
/// becomes the current one.
OpeningResult progressive_open(const SmrfGrid& grid, std::size_t max_window_radius, double slope);

/// Max gradient magnitude of the surface at a cell, forward differences with the
/// neighbor index clamped at the grid border.
double local_slope(const std::vector<double>& surface, std::size_t width, std::size_t height, double cell_size,
                   std::size_t cx, std::size_t cy);

struct ClassifyResult {
    GroundMask mask;
    std::size_t outside{0}; ///< points outside the grid, left non-ground
};

/// Ground iff |z - bare_earth(cell)| <= elevation_threshold + elevation_scale * slope(cell) * cell_size.
ClassifyResult classify_points(const PointCloud& cloud, const SmrfGrid& grid, const std::vector<double>& bare_earth,
                               double elevation_threshold, double elevation_scale);

struct SmrfParams {
    double cell_size{0.5};
    std::size_t max_window_radius{18};
    double slope{0.15};
    double elevation_threshold{0.5};
    double elevation_scale{1.25};
};

/// Rasterize, open progressively, classify.
GroundMask segment(const PointCloud& cloud, const SmrfParams& params);

} // namespace slicegs::smrf

#endif // SLICEGS_SEG_SMRF_HPP
