#include "slicegs/seg_smrf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace slicegs::smrf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Largest h with h^2 + dy^2 <= r^2.
std::size_t half_width(std::size_t radius, std::size_t dy)
{
    const std::size_t rem = radius * radius - dy * dy;
    auto h = static_cast<std::size_t>(std::sqrt(static_cast<double>(rem)));
    while ((h + 1) * (h + 1) <= rem) {
        ++h;
    }
    while (h * h > rem) {
        --h;
    }
    return h;
}

/// Sliding-window extreme over [x - h, x + h] on one row (van Herk / Gil-Werman).
template <typename Op>
void sliding_extreme(const double* row, std::size_t width, std::size_t h, double identity, Op op, double* out,
                     std::vector<double>& padded, std::vector<double>& prefix, std::vector<double>& suffix)
{
    const std::size_t window = 2 * h + 1;
    const std::size_t n = width + 2 * h;
    const std::size_t blocks = (n + window - 1) / window;
    const std::size_t total = blocks * window;
    padded.assign(total, identity);
    std::copy(row, row + width, padded.begin() + static_cast<std::ptrdiff_t>(h));
    prefix.resize(total);
    suffix.resize(total);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t s = b * window;
        prefix[s] = padded[s];
        for (std::size_t i = 1; i < window; ++i) {
            prefix[s + i] = op(prefix[s + i - 1], padded[s + i]);
        }
        suffix[s + window - 1] = padded[s + window - 1];
        for (std::size_t i = window - 1; i-- > 0;) {
            suffix[s + i] = op(suffix[s + i + 1], padded[s + i]);
        }
    }
    // Output x covers padded[x, x + window - 1].
    for (std::size_t x = 0; x < width; ++x) {
        out[x] = op(suffix[x], prefix[x + window - 1]);
    }
}

template <typename Op>
std::vector<double> disk_filter(const std::vector<double>& src, std::size_t width, std::size_t height,
                                std::size_t radius, double identity, Op op)
{
    if (src.size() != width * height) {
        throw DimensionMismatch("surface has " + std::to_string(src.size()) + " cells, expected " +
                                std::to_string(width * height));
    }
    if (radius == 0 || src.empty()) {
        return src;
    }
    // Row extremes for each distinct half width the disk needs.
    std::vector<std::size_t> hw(radius + 1);
    for (std::size_t dy = 0; dy <= radius; ++dy) {
        hw[dy] = half_width(radius, dy);
    }
    std::vector<std::vector<double>> row_ext(radius + 1);
    std::vector<double> padded;
    std::vector<double> prefix;
    std::vector<double> suffix;
    for (std::size_t dy = 0; dy <= radius; ++dy) {
        const std::size_t h = hw[dy];
        if (!row_ext[h].empty()) {
            continue;
        }
        row_ext[h].resize(src.size());
        for (std::size_t y = 0; y < height; ++y) {
            sliding_extreme(src.data() + y * width, width, h, identity, op, row_ext[h].data() + y * width, padded,
                            prefix, suffix);
        }
    }

    std::vector<double> out(src.size(), identity);
    for (std::size_t y = 0; y < height; ++y) {
        double* dst = out.data() + y * width;
        const std::size_t y_lo = y >= radius ? y - radius : 0;
        const std::size_t y_hi = std::min(height - 1, y + radius);
        for (std::size_t yy = y_lo; yy <= y_hi; ++yy) {
            const std::size_t dy = yy > y ? yy - y : y - yy;
            const double* ext = row_ext[hw[dy]].data() + yy * width;
            for (std::size_t x = 0; x < width; ++x) {
                dst[x] = op(dst[x], ext[x]);
            }
        }
    }
    return out;
}

void inpaint_nearest(SmrfGrid& grid)
{
    const std::size_t w = grid.width;
    const std::size_t h = grid.height;
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    // Per column: vertical distance to the nearest occupied cell and the lowest
    // elevation among occupied cells at that distance.
    std::vector<std::size_t> col_dist(w * h, kNone);
    std::vector<double> col_elev(w * h, kInf);
    for (std::size_t cx = 0; cx < w; ++cx) {
        std::size_t last = kNone;
        for (std::size_t cy = 0; cy < h; ++cy) {
            const std::size_t c = grid.cell(cx, cy);
            if (grid.occupied[c]) {
                last = cy;
            }
            if (last != kNone) {
                col_dist[c] = cy - last;
                col_elev[c] = grid.min_z[grid.cell(cx, last)];
            }
        }
        last = kNone;
        for (std::size_t cy = h; cy-- > 0;) {
            const std::size_t c = grid.cell(cx, cy);
            if (grid.occupied[c]) {
                last = cy;
            }
            if (last == kNone) {
                continue;
            }
            const std::size_t d = last - cy;
            const double e = grid.min_z[grid.cell(cx, last)];
            if (d < col_dist[c]) {
                col_dist[c] = d;
                col_elev[c] = e;
            } else if (d == col_dist[c]) {
                col_elev[c] = std::min(col_elev[c], e);
            }
        }
    }

    std::vector<double> filled = grid.min_z;
    for (std::size_t cy = 0; cy < h; ++cy) {
        for (std::size_t cx = 0; cx < w; ++cx) {
            const std::size_t c = grid.cell(cx, cy);
            if (grid.occupied[c]) {
                continue;
            }
            std::size_t best = kNone;
            double elev = kInf;
            auto consider = [&](std::size_t x, std::size_t dx) {
                const std::size_t d = col_dist[grid.cell(x, cy)];
                if (d == kNone) {
                    return;
                }
                const std::size_t d2 = dx * dx + d * d;
                const double e = col_elev[grid.cell(x, cy)];
                if (d2 < best || (d2 == best && e < elev)) {
                    best = d2;
                    elev = e;
                }
            };
            for (std::size_t dx = 0; dx < w; ++dx) {
                if (best != kNone && dx * dx > best) {
                    break;
                }
                if (dx <= cx) {
                    consider(cx - dx, dx);
                }
                if (dx > 0 && cx + dx < w) {
                    consider(cx + dx, dx);
                }
            }
            filled[c] = elev;
            grid.inpainted[c] = 1;
        }
    }
    grid.min_z = std::move(filled);
}

} // namespace

std::optional<CellIndex> SmrfGrid::locate(double x, double y) const noexcept
{
    const double fx = std::floor((x - origin_x) / cell_size);
    const double fy = std::floor((y - origin_y) / cell_size);
    if (!(fx >= 0.0) || !(fy >= 0.0) || fx >= static_cast<double>(width) || fy >= static_cast<double>(height)) {
        return std::nullopt;
    }
    return CellIndex{static_cast<std::size_t>(fx), static_cast<std::size_t>(fy)};
}

SmrfGrid rasterize_min_surface(const PointCloud& cloud, double cell_size)
{
    if (cloud.empty()) {
        throw InvalidArgument("cannot rasterize an empty cloud");
    }
    if (!(cell_size > 0.0)) {
        throw InvalidArgument("SMRF cell size must be positive");
    }
    double min_x = kInf;
    double min_y = kInf;
    double max_x = -kInf;
    double max_y = -kInf;
    for (const Point& p : cloud.points) {
        min_x = std::min(min_x, double(p.x));
        min_y = std::min(min_y, double(p.y));
        max_x = std::max(max_x, double(p.x));
        max_y = std::max(max_y, double(p.y));
    }

    SmrfGrid grid;
    grid.cell_size = cell_size;
    grid.origin_x = min_x;
    grid.origin_y = min_y;
    grid.width = static_cast<std::size_t>(std::floor((max_x - min_x) / cell_size)) + 1;
    grid.height = static_cast<std::size_t>(std::floor((max_y - min_y) / cell_size)) + 1;
    grid.min_z.assign(grid.cell_count(), kInf);
    grid.occupied.assign(grid.cell_count(), 0);
    grid.inpainted.assign(grid.cell_count(), 0);

    for (const Point& p : cloud.points) {
        const auto idx = grid.locate(p.x, p.y);
        // The bounding box contains every point by construction.
        const std::size_t c = grid.cell(idx->cx, idx->cy);
        grid.min_z[c] = std::min(grid.min_z[c], double(p.z));
        grid.occupied[c] = 1;
    }
    inpaint_nearest(grid);
    return grid;
}

std::vector<double> erode_disk(const std::vector<double>& surface, std::size_t width, std::size_t height,
                               std::size_t radius)
{
    return disk_filter(surface, width, height, radius, kInf, [](double a, double b) { return std::min(a, b); });
}

std::vector<double> dilate_disk(const std::vector<double>& surface, std::size_t width, std::size_t height,
                                std::size_t radius)
{
    return disk_filter(surface, width, height, radius, -kInf, [](double a, double b) { return std::max(a, b); });
}

std::vector<double> open_disk(const std::vector<double>& surface, std::size_t width, std::size_t height,
                              std::size_t radius)
{
    return dilate_disk(erode_disk(surface, width, height, radius), width, height, radius);
}

OpeningResult progressive_open(const SmrfGrid& grid, std::size_t max_window_radius, double slope)
{
    if (max_window_radius < 1) {
        throw InvalidArgument("SMRF max window radius must be at least 1");
    }
    if (!(slope >= 0.0)) {
        throw InvalidArgument("SMRF slope must be non-negative");
    }
    OpeningResult result;
    result.non_ground.assign(grid.cell_count(), 0);
    std::vector<double> current = grid.min_z;
    for (std::size_t w = 1; w <= max_window_radius; ++w) {
        std::vector<double> opened = open_disk(current, grid.width, grid.height, w);
        const double threshold = slope * static_cast<double>(w) * grid.cell_size;
        for (std::size_t c = 0; c < current.size(); ++c) {
            if (current[c] - opened[c] > threshold) {
                result.non_ground[c] = 1;
            }
        }
        current = std::move(opened);
    }
    result.bare_earth = grid.min_z;
    for (std::size_t c = 0; c < current.size(); ++c) {
        if (result.non_ground[c]) {
            result.bare_earth[c] = current[c];
        }
    }
    return result;
}

double local_slope(const std::vector<double>& surface, std::size_t width, std::size_t height, double cell_size,
                   std::size_t cx, std::size_t cy)
{
    const std::size_t nx = std::min(cx + 1, width - 1);
    const std::size_t ny = std::min(cy + 1, height - 1);
    const double here = surface[cy * width + cx];
    const double gx = (surface[cy * width + nx] - here) / cell_size;
    const double gy = (surface[ny * width + cx] - here) / cell_size;
    return std::hypot(gx, gy);
}

ClassifyResult classify_points(const PointCloud& cloud, const SmrfGrid& grid, const std::vector<double>& bare_earth,
                               double elevation_threshold, double elevation_scale)
{
    if (!(elevation_threshold >= 0.0) || !(elevation_scale >= 0.0)) {
        throw InvalidArgument("SMRF elevation threshold and scale must be non-negative");
    }
    if (bare_earth.size() != grid.cell_count()) {
        throw DimensionMismatch("bare-earth surface does not match the grid");
    }
    ClassifyResult result;
    result.mask.assign(cloud.size(), 0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point& p = cloud[i];
        const auto idx = grid.locate(p.x, p.y);
        if (!idx) {
            ++result.outside;
            continue;
        }
        const double surface = bare_earth[grid.cell(idx->cx, idx->cy)];
        const double slope = local_slope(bare_earth, grid.width, grid.height, grid.cell_size, idx->cx, idx->cy);
        const double limit = elevation_threshold + elevation_scale * slope * grid.cell_size;
        if (std::abs(double(p.z) - surface) <= limit) {
            result.mask[i] = 1;
        }
    }
    return result;
}

GroundMask segment(const PointCloud& cloud, const SmrfParams& params)
{
    const SmrfGrid grid = rasterize_min_surface(cloud, params.cell_size);
    const OpeningResult opening = progressive_open(grid, params.max_window_radius, params.slope);
    return classify_points(cloud, grid, opening.bare_earth, params.elevation_threshold, params.elevation_scale).mask;
}

} // namespace slicegs::smrf
