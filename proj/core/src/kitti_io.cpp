#include "slicegs/kitti_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

namespace slicegs::kitti {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "binary loaders assume a little-endian host");

namespace {

std::vector<char> read_all(const fs::path& path)
{
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw IoError("cannot open file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        throw IoError("cannot open file: " + path.string());
    }
    const auto size = static_cast<std::size_t>(in.tellg());
    std::vector<char> bytes(size);
    in.seekg(0);
    if (size > 0 && !in.read(bytes.data(), static_cast<std::streamsize>(size))) {
        throw IoError("short read: " + path.string());
    }
    return bytes;
}

void write_all(const fs::path& path, const void* data, std::size_t size)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write file: " + path.string());
    }
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

std::optional<std::size_t> frame_number(const fs::path& file)
{
    const std::string stem = file.stem().string();
    if (stem.empty() || !std::all_of(stem.begin(), stem.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(std::stoull(stem));
}

std::map<std::size_t, fs::path> scan_dir(const fs::path& dir, const std::string& extension)
{
    std::map<std::size_t, fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != extension) {
            continue;
        }
        if (auto frame = frame_number(entry.path())) {
            files.emplace(*frame, entry.path());
        }
    }
    return files;
}

fs::path sequence_root(const fs::path& root, const std::string& sequence)
{
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw IoError("dataset root is not a directory: " + root.string());
    }
    fs::path seq = root / "sequences" / sequence_dir_name(sequence);
    if (!fs::is_directory(seq / "velodyne", ec)) {
        throw IoError("missing velodyne directory: " + (seq / "velodyne").string());
    }
    return seq;
}

} // namespace

GroundClassSet default_ground_classes()
{
    return {40, 44, 48, 49};
}

GroundClassSet extended_ground_classes()
{
    return {40, 44, 48, 49, 60, 72};
}

GroundClassSet ground_classes_by_name(const std::string& name)
{
    if (name == "default") {
        return default_ground_classes();
    }
    if (name == "extended") {
        return extended_ground_classes();
    }
    throw InvalidArgument("unknown ground class preset '" + name + "' (expected default|extended)");
}

LoadedScan load_velodyne_bin(const fs::path& path)
{
    const std::vector<char> bytes = read_all(path);
    constexpr std::size_t kRecord = 4 * sizeof(float);
    if (bytes.size() % kRecord != 0) {
        throw FormatError("malformed scan " + path.string() + ": " + std::to_string(bytes.size()) +
                          " bytes is not a multiple of 16");
    }

    LoadedScan scan;
    scan.record_count = bytes.size() / kRecord;
    scan.cloud.points.reserve(scan.record_count);
    for (std::size_t i = 0; i < scan.record_count; ++i) {
        float v[4];
        std::memcpy(v, bytes.data() + i * kRecord, kRecord);
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2]) || !std::isfinite(v[3])) {
            scan.dropped.push_back(i);
            continue;
        }
        scan.cloud.points.push_back({v[0], v[1], v[2], v[3]});
    }
    return scan;
}

void save_velodyne_bin(const fs::path& path, const PointCloud& cloud)
{
    std::vector<float> buffer;
    buffer.reserve(cloud.size() * 4);
    for (const Point& p : cloud.points) {
        buffer.insert(buffer.end(), {p.x, p.y, p.z, p.intensity});
    }
    write_all(path, buffer.data(), buffer.size() * sizeof(float));
}

std::vector<std::uint32_t> load_raw_labels(const fs::path& path)
{
    const std::vector<char> bytes = read_all(path);
    if (bytes.size() % sizeof(std::uint32_t) != 0) {
        throw FormatError("malformed label file " + path.string() + ": " + std::to_string(bytes.size()) +
                          " bytes is not a multiple of 4");
    }
    std::vector<std::uint32_t> labels(bytes.size() / sizeof(std::uint32_t));
    if (!labels.empty()) {
        std::memcpy(labels.data(), bytes.data(), bytes.size());
    }
    return labels;
}

void save_raw_labels(const fs::path& path, const std::vector<std::uint32_t>& labels)
{
    write_all(path, labels.data(), labels.size() * sizeof(std::uint32_t));
}

GroundTruthMask load_labels(const fs::path& path, const GroundClassSet& ground_classes)
{
    const auto labels = load_raw_labels(path);
    GroundTruthMask mask(labels.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto semantic = static_cast<std::uint16_t>(labels[i] & 0xFFFFu);
        mask[i] = ground_classes.contains(semantic) ? 1 : 0;
    }
    return mask;
}

GroundTruthMask drop_indices(const GroundTruthMask& mask, const std::vector<std::size_t>& dropped)
{
    if (dropped.empty()) {
        return mask;
    }
    GroundTruthMask out;
    out.reserve(mask.size() - std::min(mask.size(), dropped.size()));
    std::size_t next = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (next < dropped.size() && dropped[next] == i) {
            ++next;
            continue;
        }
        out.push_back(mask[i]);
    }
    return out;
}

GroundMask expand_to_records(const GroundMask& mask, const std::vector<std::size_t>& dropped,
                             std::size_t record_count)
{
    if (mask.size() + dropped.size() != record_count) {
        throw DimensionMismatch("mask of " + std::to_string(mask.size()) + " points plus " +
                                std::to_string(dropped.size()) + " dropped does not cover " +
                                std::to_string(record_count) + " records");
    }
    GroundMask out(record_count, 0);
    std::size_t next_drop = 0;
    std::size_t src = 0;
    for (std::size_t i = 0; i < record_count; ++i) {
        if (next_drop < dropped.size() && dropped[next_drop] == i) {
            ++next_drop;
            continue;
        }
        out[i] = mask[src++];
    }
    return out;
}

FrameRange FrameRange::parse(const std::string& text)
{
    auto parse_number = [&](const std::string& s) -> std::size_t {
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw InvalidArgument("invalid frame range '" + text + "' (expected a..b)");
        }
        return static_cast<std::size_t>(std::stoull(s));
    };
    const auto dots = text.find("..");
    FrameRange range;
    if (dots == std::string::npos) {
        range.first = range.last = parse_number(text);
    } else {
        range.first = parse_number(text.substr(0, dots));
        range.last = parse_number(text.substr(dots + 2));
    }
    if (range.last < range.first) {
        throw InvalidArgument("invalid frame range '" + text + "': end precedes start");
    }
    return range;
}

std::string sequence_dir_name(const std::string& sequence)
{
    if (sequence.size() == 1 && sequence[0] >= '0' && sequence[0] <= '9') {
        return "0" + sequence;
    }
    return sequence;
}

std::vector<FramePaths> list_scans(const fs::path& root, const std::string& sequence,
                                   std::optional<FrameRange> frame_range)
{
    const fs::path seq = sequence_root(root, sequence);
    std::vector<FramePaths> pairs;
    for (const auto& [frame, scan] : scan_dir(seq / "velodyne", ".bin")) {
        if (frame_range && !frame_range->contains(frame)) {
            continue;
        }
        pairs.push_back({frame, scan, {}});
    }
    return pairs;
}

std::vector<FramePaths> list_sequence(const fs::path& root, const std::string& sequence,
                                      std::optional<FrameRange> frame_range)
{
    const fs::path seq = sequence_root(root, sequence);
    std::error_code ec;
    if (!fs::is_directory(seq / "labels", ec)) {
        throw IoError("missing labels directory: " + (seq / "labels").string());
    }
    const auto labels = scan_dir(seq / "labels", ".label");

    std::vector<FramePaths> pairs = list_scans(root, sequence, frame_range);
    for (FramePaths& p : pairs) {
        auto it = labels.find(p.frame);
        if (it == labels.end()) {
            throw IoError("scan " + p.scan.string() + " has no matching label file");
        }
        p.labels = it->second;
    }
    return pairs;
}

} // namespace slicegs::kitti
