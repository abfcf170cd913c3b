#ifndef SLICEGS_SSL_FRAME_HPP
#define SLICEGS_SSL_FRAME_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "slicegs/types.hpp"

namespace slicegs::ssl {

// Fixed geometry of the MEMS solid-state sensor frame: five subframes of
// 126 rows x 125 columns, emitted back to back as one 78,750-record column.
inline constexpr std::size_t kRows = 126;
inline constexpr std::size_t kSubframeCols = 125;
inline constexpr std::size_t kSubframes = 5;
inline constexpr std::size_t kCols = kSubframeCols * kSubframes;      // 625
inline constexpr std::size_t kSubframeRecords = kRows * kSubframeCols; // 15,750
inline constexpr std::size_t kRecords = kSubframeRecords * kSubframes; // 78,750

struct SslRecord {
    float x{0.0f};
    float y{0.0f};
    float z{0.0f};
    bool valid{false};

    friend bool operator==(const SslRecord&, const SslRecord&) = default;
};

/// Records in sensor emission order.
struct SslRawFrame {
    std::vector<SslRecord> records;
};

/// Which 0-based rows of each subframe arrive reversed.
enum class ZigzagParity { Even, Odd };

ZigzagParity parse_parity(const std::string& text);
const char* to_string(ZigzagParity parity);

/// Raw record index that lands in cell (row, col) of the organized frame.
std::size_t record_index_for_cell(std::size_t row, std::size_t col, ZigzagParity parity) noexcept;

class SubframeView;

/// Organized 126 x 625 frame. Cells are row-major; column c belongs to subframe c / 125.
class SslFrame {
  public:
    SslFrame() = default;

    [[nodiscard]] std::size_t rows() const noexcept { return kRows; }
    [[nodiscard]] std::size_t cols() const noexcept { return kCols; }
    [[nodiscard]] std::size_t subframe_count() const noexcept { return kSubframes; }
    [[nodiscard]] std::size_t subframe_width() const noexcept { return kSubframeCols; }

    [[nodiscard]] const SslRecord& at(std::size_t row, std::size_t col) const { return cells_[row * kCols + col]; }
    /// Raw record index stored in cell (row, col).
    [[nodiscard]] std::uint32_t record_index(std::size_t row, std::size_t col) const
    {
        return index_map_[row * kCols + col];
    }
    [[nodiscard]] const std::vector<SslRecord>& cells() const noexcept { return cells_; }
    [[nodiscard]] const std::vector<std::uint32_t>& index_map() const noexcept { return index_map_; }
    [[nodiscard]] std::size_t valid_count() const noexcept;

    /// Read-only view of columns [125 i, 125 (i + 1)). Throws InvalidArgument for i > 4.
    [[nodiscard]] SubframeView subframe(std::size_t i) const;

  private:
    friend SslFrame decode_ssl_frame(const SslRawFrame& raw, ZigzagParity parity);
    friend SslFrame make_frame_from_cells(std::vector<SslRecord> cells, std::vector<std::uint32_t> index_map);

    std::vector<SslRecord> cells_;
    std::vector<std::uint32_t> index_map_;
};

class SubframeView {
  public:
    SubframeView(const SslFrame& frame, std::size_t index) noexcept : frame_(&frame), index_(index) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }
    [[nodiscard]] std::size_t rows() const noexcept { return kRows; }
    [[nodiscard]] std::size_t cols() const noexcept { return kSubframeCols; }
    [[nodiscard]] std::size_t first_column() const noexcept { return index_ * kSubframeCols; }
    [[nodiscard]] std::size_t end_column() const noexcept { return (index_ + 1) * kSubframeCols; }
    [[nodiscard]] const SslRecord& at(std::size_t row, std::size_t col) const
    {
        return frame_->at(row, first_column() + col);
    }
    [[nodiscard]] std::uint32_t record_index(std::size_t row, std::size_t col) const
    {
        return frame_->record_index(row, first_column() + col);
    }

  private:
    const SslFrame* frame_;
    std::size_t index_;
};

/// Splits the raw column into five subframes, fills each 126 x 125 block row-major,
/// reverses the rows selected by `parity` and concatenates the blocks left to right.
/// Throws FormatError unless the frame has exactly 78,750 records.
SslFrame decode_ssl_frame(const SslRawFrame& raw, ZigzagParity parity = ZigzagParity::Even);

/// Inverse of decode_ssl_frame: rebuilds the emission order through the index map.
SslRawFrame encode_ssl_frame(const SslFrame& frame);

/// Builds a frame from organized cells (used when reading the organized dump).
SslFrame make_frame_from_cells(std::vector<SslRecord> cells, std::vector<std::uint32_t> index_map);

struct SslPointCloud {
    PointCloud cloud;
    /// pixel_of_point[i] = row-major cell index of point i
    std::vector<std::uint32_t> pixel_of_point;
};

/// Emits valid cells in row-major order.
SslPointCloud ssl_to_point_cloud(const SslFrame& frame);

// File forms. `.sslraw` holds 78,750 little-endian float32 triples, an all-zero triple
// marking an invalid return. The CSV fixture form has one `x,y,z,valid` line per record.
SslRawFrame read_sslraw(const std::filesystem::path& path);
void write_sslraw(const std::filesystem::path& path, const SslRawFrame& raw);
SslRawFrame read_ssl_csv(const std::filesystem::path& path);
void write_ssl_csv(const std::filesystem::path& path, const SslRawFrame& raw);
/// Dispatches on extension: .csv is the fixture form, anything else is .sslraw.
SslRawFrame read_ssl_capture(const std::filesystem::path& path);

// Organized frame dump: uint32 rows, uint32 cols, rows*cols float32 xyz triples
// (row-major), then rows*cols validity bytes. All little-endian.
void write_organized_frame(const std::filesystem::path& path, const SslFrame& frame);

struct OrganizedGrid {
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<SslRecord> cells;
};
OrganizedGrid read_organized_frame(const std::filesystem::path& path);

struct AxisStats {
    float min{0.0f};
    float max{0.0f};
};

struct SubframeStats {
    std::size_t records{0};
    std::size_t valid{0};
    AxisStats x;
    AxisStats y;
    AxisStats z;
};

/// Per-subframe record/valid counts and coordinate extents over valid cells.
std::array<SubframeStats, kSubframes> subframe_stats(const SslFrame& frame);

} // namespace slicegs::ssl

#endif // SLICEGS_SSL_FRAME_HPP
