#ifndef SLICEGS_RANGE_IMAGE_HPP
#define SLICEGS_RANGE_IMAGE_HPP

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "slicegs/ssl_frame.hpp"
#include "slicegs/types.hpp"

namespace slicegs {

inline constexpr double deg2rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

/// Spherical projection geometry. Defaults match the HDL-64E behind SemanticKITTI.
struct ProjectionConfig {
    std::size_t rows{64};
    std::size_t cols{1024};
    double fov_up{deg2rad(2.0)};     ///< elevation of the top edge (radians)
    double fov_down{deg2rad(-24.8)}; ///< elevation of the bottom edge (radians)
};

struct AngularSpan {
    double start{0.0};
    double end{0.0};
};

/// Organized image of a scan. Pixels are row-major; row 0 is the highest elevation.
struct RangeImage {
    static constexpr std::int32_t kEmpty = -1;

    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<float> range; ///< meters, 0 = empty
    std::vector<float> x;
    std::vector<float> y;
    std::vector<float> z;
    std::vector<std::int32_t> point_index; ///< source point per pixel or kEmpty
    AngularSpan azimuth_span;              ///< [start, end) radians across columns
    AngularSpan vertical_span;             ///< [top, bottom] radians across rows
    /// Size of the cloud the image was built from; merged masks have this length.
    std::size_t source_point_count{0};

    [[nodiscard]] std::size_t pixel(std::size_t row, std::size_t col) const noexcept { return row * cols + col; }
    [[nodiscard]] bool occupied(std::size_t row, std::size_t col) const noexcept
    {
        return point_index[pixel(row, col)] != kEmpty;
    }
    [[nodiscard]] std::size_t occupied_count() const noexcept;
};

/// What happened to the input points during projection.
struct ProjectionStats {
    std::size_t projected{0};
    std::size_t out_of_span{0};
    std::size_t collisions{0}; ///< points displaced by a nearer point in the same bin
    std::size_t zero_range{0};
};

struct PixelBin {
    std::size_t row{0};
    std::size_t col{0};
};

/// Bin of a point under `cfg`, or nothing when its elevation is outside the vertical span.
/// Azimuth atan2(y, x) in [-pi, pi) maps linearly onto [0, cols).
std::optional<PixelBin> spherical_bin(const Point& p, const ProjectionConfig& cfg) noexcept;

/// Column for an azimuth in radians; also used to assign unprojected points to slices.
std::size_t azimuth_column(double azimuth, std::size_t cols) noexcept;

/// Projects a cloud; the nearest point wins a contested bin (ties keep the lower index).
/// Throws InvalidArgument for zero rows/cols or an empty vertical span.
RangeImage project_spherical(const PointCloud& cloud, const ProjectionConfig& cfg = {},
                             ProjectionStats* stats = nullptr);

/// Uses the organized SSL grid directly; point_index refers to ssl_to_point_cloud order.
RangeImage image_from_ssl(const ssl::SslFrame& frame);

/// Same for a grid read back from an organized dump.
RangeImage image_from_grid(const ssl::OrganizedGrid& grid);

struct ColumnInterval {
    std::size_t begin{0};
    std::size_t end{0};
    [[nodiscard]] std::size_t width() const noexcept { return end - begin; }
    [[nodiscard]] bool contains(std::size_t c) const noexcept { return c >= begin && c < end; }
    friend bool operator==(const ColumnInterval&, const ColumnInterval&) = default;
};

/// K contiguous column bands partitioning [0, cols); the first cols % K bands are one wider.
struct SliceSpec {
    std::size_t slice_count{1};
    std::vector<ColumnInterval> intervals;

    [[nodiscard]] std::size_t slice_of_column(std::size_t col) const noexcept;
};

/// Throws InvalidArgument unless 1 <= K <= cols.
SliceSpec make_slice_spec(std::size_t cols, std::size_t slice_count);

/// Read-only window onto a column band of a parent image. Local column 0 is the
/// band's first column; point indices are the parent's.
class RangeImageView {
  public:
    RangeImageView(const RangeImage& image) noexcept // NOLINT(google-explicit-constructor)
        : image_(&image), columns_{0, image.cols}
    {
    }
    RangeImageView(const RangeImage& image, ColumnInterval columns) noexcept : image_(&image), columns_(columns) {}

    [[nodiscard]] std::size_t rows() const noexcept { return image_->rows; }
    [[nodiscard]] std::size_t cols() const noexcept { return columns_.width(); }
    [[nodiscard]] ColumnInterval columns() const noexcept { return columns_; }
    [[nodiscard]] const RangeImage& parent() const noexcept { return *image_; }

    [[nodiscard]] std::size_t parent_pixel(std::size_t row, std::size_t col) const noexcept
    {
        return image_->pixel(row, columns_.begin + col);
    }
    [[nodiscard]] bool occupied(std::size_t row, std::size_t col) const noexcept
    {
        return image_->point_index[parent_pixel(row, col)] != RangeImage::kEmpty;
    }
    [[nodiscard]] float range(std::size_t row, std::size_t col) const noexcept
    {
        return image_->range[parent_pixel(row, col)];
    }
    [[nodiscard]] float x(std::size_t row, std::size_t col) const noexcept { return image_->x[parent_pixel(row, col)]; }
    [[nodiscard]] float y(std::size_t row, std::size_t col) const noexcept { return image_->y[parent_pixel(row, col)]; }
    [[nodiscard]] float z(std::size_t row, std::size_t col) const noexcept { return image_->z[parent_pixel(row, col)]; }
    [[nodiscard]] std::int32_t point_index(std::size_t row, std::size_t col) const noexcept
    {
        return image_->point_index[parent_pixel(row, col)];
    }

  private:
    const RangeImage* image_;
    ColumnInterval columns_;
};

/// Views over the bands of `spec`. Throws DimensionMismatch when the spec does not cover the image.
std::vector<RangeImageView> slice_columns(const RangeImage& image, const SliceSpec& spec);

/// Per-pixel flags for one view (rows x view cols, row-major).
struct PixelMask {
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<std::uint8_t> flags;

    PixelMask() = default;
    PixelMask(std::size_t r, std::size_t c) : rows(r), cols(c), flags(r * c, 0) {}
    [[nodiscard]] std::uint8_t at(std::size_t r, std::size_t c) const { return flags[r * cols + c]; }
    std::uint8_t& at(std::size_t r, std::size_t c) { return flags[r * cols + c]; }
    friend bool operator==(const PixelMask&, const PixelMask&) = default;
};

/// Projects per-slice pixel masks back to a per-point mask of length
/// image.source_point_count. Points without a pixel stay non-ground.
/// Throws DimensionMismatch when a mask does not match its slice.
GroundMask merge_masks(const std::vector<PixelMask>& slice_masks, const RangeImage& image, const SliceSpec& spec);

} // namespace slicegs

#endif // SLICEGS_RANGE_IMAGE_HPP
