#ifndef SLICEGS_KITTI_IO_HPP
#define SLICEGS_KITTI_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slicegs/types.hpp"

namespace slicegs::kitti {

/// SemanticKITTI class ids merged into the binary ground class.
using GroundClassSet = std::set<std::uint16_t>;

/// road, parking, sidewalk, other-ground
GroundClassSet default_ground_classes();
/// default set plus lane-marking (60) and terrain (72)
GroundClassSet extended_ground_classes();
/// Resolves "default" / "extended"; throws InvalidArgument otherwise.
GroundClassSet ground_classes_by_name(const std::string& name);

struct LoadedScan {
    PointCloud cloud;
    /// File-order indices of records dropped for non-finite coordinates, ascending.
    std::vector<std::size_t> dropped;
    /// Number of records in the file (cloud.size() + dropped.size()).
    std::size_t record_count{0};
};

/// Reads a velodyne .bin scan (little-endian float32 x, y, z, intensity per record).
/// Throws IoError when the file cannot be read and FormatError when the size is not
/// a multiple of 16 bytes.
LoadedScan load_velodyne_bin(const std::filesystem::path& path);

void save_velodyne_bin(const std::filesystem::path& path, const PointCloud& cloud);

/// Reads a .label file; flag[i] = (label[i] & 0xFFFF) in ground_classes.
GroundTruthMask load_labels(const std::filesystem::path& path, const GroundClassSet& ground_classes);

/// Raw uint32 labels, for tooling that needs the full semantic id.
std::vector<std::uint32_t> load_raw_labels(const std::filesystem::path& path);
void save_raw_labels(const std::filesystem::path& path, const std::vector<std::uint32_t>& labels);

/// Removes the entries listed in `dropped` (ascending) so a mask stays aligned
/// with a cloud whose non-finite points were dropped at load time.
GroundTruthMask drop_indices(const GroundTruthMask& mask, const std::vector<std::size_t>& dropped);

/// Inverse of drop_indices for predictions: re-expands a mask to file order,
/// writing 0 at dropped positions.
GroundMask expand_to_records(const GroundMask& mask, const std::vector<std::size_t>& dropped,
                             std::size_t record_count);

/// Inclusive frame interval, e.g. "0..49".
struct FrameRange {
    std::size_t first{0};
    std::size_t last{0};

    /// Parses "a..b" or a single frame number "a".
    static FrameRange parse(const std::string& text);
    [[nodiscard]] bool contains(std::size_t frame) const noexcept { return frame >= first && frame <= last; }
};

struct FramePaths {
    std::size_t frame{0};
    std::filesystem::path scan;
    std::filesystem::path labels;
};

/// Enumerates `sequences/<sequence>/velodyne/*.bin` paired with
/// `sequences/<sequence>/labels/*.label`, ascending by frame number.
/// Throws IoError for a missing directory or a scan without a label file.
std::vector<FramePaths> list_sequence(const std::filesystem::path& root, const std::string& sequence,
                                      std::optional<FrameRange> frame_range = std::nullopt);

/// Scan-only enumeration for runs that need no labels.
std::vector<FramePaths> list_scans(const std::filesystem::path& root, const std::string& sequence,
                                   std::optional<FrameRange> frame_range = std::nullopt);

/// Normalizes a sequence id to the two-digit directory name ("0" -> "00").
std::string sequence_dir_name(const std::string& sequence);

} // namespace slicegs::kitti

#endif // SLICEGS_KITTI_IO_HPP
