#include "slicegs/range_image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slicegs {

namespace {

RangeImage blank_image(std::size_t rows, std::size_t cols)
{
    RangeImage img;
    img.rows = rows;
    img.cols = cols;
    const std::size_t n = rows * cols;
    img.range.assign(n, 0.0f);
    img.x.assign(n, 0.0f);
    img.y.assign(n, 0.0f);
    img.z.assign(n, 0.0f);
    img.point_index.assign(n, RangeImage::kEmpty);
    return img;
}

double norm3(const Point& p) noexcept
{
    const double x = p.x;
    const double y = p.y;
    const double z = p.z;
    return std::sqrt(x * x + y * y + z * z);
}

template <typename Cells>
RangeImage image_from_cells(std::size_t rows, std::size_t cols, const Cells& cells)
{
    RangeImage img = blank_image(rows, cols);
    std::int32_t next = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const ssl::SslRecord& rec = cells[i];
        if (!rec.valid) {
            continue;
        }
        img.x[i] = rec.x;
        img.y[i] = rec.y;
        img.z[i] = rec.z;
        img.range[i] = static_cast<float>(norm3({rec.x, rec.y, rec.z, 0.0f}));
        img.point_index[i] = next++;
    }
    img.source_point_count = static_cast<std::size_t>(next);
    return img;
}

} // namespace

std::size_t RangeImage::occupied_count() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(point_index.begin(), point_index.end(), [](std::int32_t i) { return i != kEmpty; }));
}

std::size_t azimuth_column(double azimuth, std::size_t cols) noexcept
{
    const double t = (azimuth + std::numbers::pi) / (2.0 * std::numbers::pi);
    auto col = static_cast<std::ptrdiff_t>(std::floor(t * static_cast<double>(cols)));
    // atan2 returns +pi for (-x, +0); +pi and -pi are the same direction.
    if (col >= static_cast<std::ptrdiff_t>(cols)) {
        col -= static_cast<std::ptrdiff_t>(cols);
    }
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(col, 0, static_cast<std::ptrdiff_t>(cols) - 1));
}

std::optional<PixelBin> spherical_bin(const Point& p, const ProjectionConfig& cfg) noexcept
{
    const double x = p.x;
    const double y = p.y;
    const double z = p.z;
    const double elevation = std::atan2(z, std::sqrt(x * x + y * y));
    if (elevation > cfg.fov_up || elevation < cfg.fov_down) {
        return std::nullopt;
    }
    const double t = (cfg.fov_up - elevation) / (cfg.fov_up - cfg.fov_down);
    const auto row = std::min(static_cast<std::size_t>(std::floor(t * static_cast<double>(cfg.rows))), cfg.rows - 1);
    return PixelBin{row, azimuth_column(std::atan2(y, x), cfg.cols)};
}

RangeImage project_spherical(const PointCloud& cloud, const ProjectionConfig& cfg, ProjectionStats* stats)
{
    if (cfg.rows == 0 || cfg.cols == 0) {
        throw InvalidArgument("range image needs at least one row and one column");
    }
    if (!(cfg.fov_up > cfg.fov_down) || !std::isfinite(cfg.fov_up) || !std::isfinite(cfg.fov_down)) {
        throw InvalidArgument("vertical span must satisfy fov_up > fov_down");
    }

    RangeImage img = blank_image(cfg.rows, cfg.cols);
    img.azimuth_span = {-std::numbers::pi, std::numbers::pi};
    img.vertical_span = {cfg.fov_up, cfg.fov_down};
    img.source_point_count = cloud.size();

    ProjectionStats local;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point& p = cloud[i];
        const double r = norm3(p);
        if (r <= 0.0) {
            ++local.zero_range;
            continue;
        }
        const auto bin = spherical_bin(p, cfg);
        if (!bin) {
            ++local.out_of_span;
            continue;
        }
        const std::size_t px = img.pixel(bin->row, bin->col);
        const auto range = static_cast<float>(r);
        if (img.point_index[px] != RangeImage::kEmpty) {
            ++local.collisions;
            // Strict comparison keeps the earlier point on equal range.
            if (!(range < img.range[px])) {
                continue;
            }
        }
        img.range[px] = range;
        img.x[px] = p.x;
        img.y[px] = p.y;
        img.z[px] = p.z;
        img.point_index[px] = static_cast<std::int32_t>(i);
    }
    local.projected = img.occupied_count();
    if (stats) {
        *stats = local;
    }
    return img;
}

RangeImage image_from_ssl(const ssl::SslFrame& frame)
{
    return image_from_cells(frame.rows(), frame.cols(), frame.cells());
}

RangeImage image_from_grid(const ssl::OrganizedGrid& grid)
{
    return image_from_cells(grid.rows, grid.cols, grid.cells);
}

std::size_t SliceSpec::slice_of_column(std::size_t col) const noexcept
{
    const auto it = std::upper_bound(intervals.begin(), intervals.end(), col,
                                     [](std::size_t c, const ColumnInterval& iv) { return c < iv.end; });
    return static_cast<std::size_t>(it - intervals.begin());
}

SliceSpec make_slice_spec(std::size_t cols, std::size_t slice_count)
{
    if (slice_count < 1 || slice_count > cols) {
        throw InvalidArgument("slice count " + std::to_string(slice_count) + " must be in 1.." +
                              std::to_string(cols));
    }
    SliceSpec spec;
    spec.slice_count = slice_count;
    const std::size_t base = cols / slice_count;
    const std::size_t wide = cols % slice_count;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < slice_count; ++k) {
        const std::size_t width = base + (k < wide ? 1 : 0);
        spec.intervals.push_back({begin, begin + width});
        begin += width;
    }
    return spec;
}

std::vector<RangeImageView> slice_columns(const RangeImage& image, const SliceSpec& spec)
{
    if (spec.intervals.empty() || spec.intervals.back().end != image.cols) {
        throw DimensionMismatch("slice spec does not cover the image's " + std::to_string(image.cols) + " columns");
    }
    std::vector<RangeImageView> views;
    views.reserve(spec.intervals.size());
    for (const ColumnInterval& iv : spec.intervals) {
        views.emplace_back(image, iv);
    }
    return views;
}

GroundMask merge_masks(const std::vector<PixelMask>& slice_masks, const RangeImage& image, const SliceSpec& spec)
{
    if (slice_masks.size() != spec.intervals.size()) {
        throw DimensionMismatch("got " + std::to_string(slice_masks.size()) + " slice masks for " +
                                std::to_string(spec.intervals.size()) + " slices");
    }
    for (std::size_t k = 0; k < slice_masks.size(); ++k) {
        const PixelMask& m = slice_masks[k];
        if (m.rows != image.rows || m.cols != spec.intervals[k].width() || m.flags.size() != m.rows * m.cols) {
            throw DimensionMismatch("mask of slice " + std::to_string(k) + " is " + std::to_string(m.rows) + "x" +
                                    std::to_string(m.cols) + ", slice is " + std::to_string(image.rows) + "x" +
                                    std::to_string(spec.intervals[k].width()));
        }
    }

    GroundMask mask(image.source_point_count, 0);
    for (std::size_t k = 0; k < slice_masks.size(); ++k) {
        const ColumnInterval iv = spec.intervals[k];
        const PixelMask& m = slice_masks[k];
        for (std::size_t r = 0; r < image.rows; ++r) {
            for (std::size_t c = 0; c < iv.width(); ++c) {
                const std::int32_t idx = image.point_index[image.pixel(r, iv.begin + c)];
                if (idx != RangeImage::kEmpty && m.at(r, c) != 0) {
                    mask.at(static_cast<std::size_t>(idx)) = 1;
                }
            }
        }
    }
    return mask;
}

} // namespace slicegs
