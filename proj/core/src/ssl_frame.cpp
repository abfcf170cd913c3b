#include "slicegs/ssl_frame.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace slicegs::ssl {

namespace fs = std::filesystem;

namespace {

void require_record_count(std::size_t n)
{
    if (n != kRecords) {
        throw FormatError("SSL frame must hold exactly " + std::to_string(kRecords) + " records, got " +
                          std::to_string(n));
    }
}

bool is_reversed_row(std::size_t row, ZigzagParity parity) noexcept
{
    return (row % 2 == 0) == (parity == ZigzagParity::Even);
}

float parse_float(std::string_view field, std::size_t line)
{
    // std::from_chars for float is unavailable on older libstdc++.
    std::string tmp(field);
    char* end = nullptr;
    const float v = std::strtof(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
        throw FormatError("bad number '" + tmp + "' on CSV line " + std::to_string(line));
    }
    return v;
}

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

} // namespace

ZigzagParity parse_parity(const std::string& text)
{
    if (text == "even") {
        return ZigzagParity::Even;
    }
    if (text == "odd") {
        return ZigzagParity::Odd;
    }
    throw InvalidArgument("zig-zag parity must be 'even' or 'odd', got '" + text + "'");
}

const char* to_string(ZigzagParity parity)
{
    return parity == ZigzagParity::Even ? "even" : "odd";
}

std::size_t record_index_for_cell(std::size_t row, std::size_t col, ZigzagParity parity) noexcept
{
    const std::size_t sub = col / kSubframeCols;
    const std::size_t local = col % kSubframeCols;
    const std::size_t offset = is_reversed_row(row, parity) ? kSubframeCols - 1 - local : local;
    return sub * kSubframeRecords + row * kSubframeCols + offset;
}

std::size_t SslFrame::valid_count() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](const SslRecord& r) { return r.valid; }));
}

SubframeView SslFrame::subframe(std::size_t i) const
{
    if (i >= kSubframes) {
        throw InvalidArgument("subframe index " + std::to_string(i) + " out of range 0..4");
    }
    return SubframeView(*this, i);
}

SslFrame decode_ssl_frame(const SslRawFrame& raw, ZigzagParity parity)
{
    require_record_count(raw.records.size());
    SslFrame frame;
    frame.cells_.resize(kRows * kCols);
    frame.index_map_.resize(kRows * kCols);
    for (std::size_t r = 0; r < kRows; ++r) {
        for (std::size_t c = 0; c < kCols; ++c) {
            const std::size_t src = record_index_for_cell(r, c, parity);
            frame.cells_[r * kCols + c] = raw.records[src];
            frame.index_map_[r * kCols + c] = static_cast<std::uint32_t>(src);
        }
    }
    return frame;
}

SslRawFrame encode_ssl_frame(const SslFrame& frame)
{
    SslRawFrame raw;
    raw.records.resize(frame.cells().size());
    for (std::size_t cell = 0; cell < frame.cells().size(); ++cell) {
        raw.records.at(frame.index_map()[cell]) = frame.cells()[cell];
    }
    return raw;
}

SslFrame make_frame_from_cells(std::vector<SslRecord> cells, std::vector<std::uint32_t> index_map)
{
    require_record_count(cells.size());
    require_record_count(index_map.size());
    SslFrame frame;
    frame.cells_ = std::move(cells);
    frame.index_map_ = std::move(index_map);
    return frame;
}

SslPointCloud ssl_to_point_cloud(const SslFrame& frame)
{
    SslPointCloud out;
    const auto& cells = frame.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i].valid) {
            continue;
        }
        out.cloud.points.push_back({cells[i].x, cells[i].y, cells[i].z, 0.0f});
        out.pixel_of_point.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

SslRawFrame read_sslraw(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        throw IoError("cannot open file: " + path.string());
    }
    const auto size = static_cast<std::size_t>(in.tellg());
    constexpr std::size_t kRecordBytes = 3 * sizeof(float);
    if (size % kRecordBytes != 0) {
        throw FormatError("truncated .sslraw file " + path.string() + ": " + std::to_string(size) +
                          " bytes is not a multiple of 12");
    }
    require_record_count(size / kRecordBytes);
    std::vector<float> buffer(size / sizeof(float));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(size));
    if (!in) {
        throw IoError("short read: " + path.string());
    }

    SslRawFrame raw;
    raw.records.resize(kRecords);
    for (std::size_t i = 0; i < kRecords; ++i) {
        const float x = buffer[3 * i];
        const float y = buffer[3 * i + 1];
        const float z = buffer[3 * i + 2];
        const bool finite = std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
        const bool valid = finite && !(x == 0.0f && y == 0.0f && z == 0.0f);
        raw.records[i] = valid ? SslRecord{x, y, z, true} : SslRecord{};
    }
    return raw;
}

void write_sslraw(const fs::path& path, const SslRawFrame& raw)
{
    require_record_count(raw.records.size());
    std::vector<float> buffer;
    buffer.reserve(raw.records.size() * 3);
    for (const SslRecord& r : raw.records) {
        if (r.valid) {
            buffer.insert(buffer.end(), {r.x, r.y, r.z});
        } else {
            buffer.insert(buffer.end(), {0.0f, 0.0f, 0.0f});
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write file: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * sizeof(float)));
}

SslRawFrame read_ssl_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open file: " + path.string());
    }
    SslRawFrame raw;
    raw.records.reserve(kRecords);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line_no == 1 && line.rfind("x,", 0) == 0) {
            continue; // header
        }
        std::string_view rest(line);
        std::array<std::string_view, 4> fields;
        for (std::size_t f = 0; f < 4; ++f) {
            const auto comma = rest.find(',');
            if ((comma == std::string_view::npos) != (f == 3)) {
                throw FormatError("expected 4 fields on CSV line " + std::to_string(line_no));
            }
            fields[f] = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        SslRecord rec{parse_float(fields[0], line_no), parse_float(fields[1], line_no),
                      parse_float(fields[2], line_no), false};
        int valid = 0;
        const auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), valid);
        if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size() || (valid != 0 && valid != 1)) {
            throw FormatError("validity must be 0 or 1 on CSV line " + std::to_string(line_no));
        }
        rec.valid = valid == 1;
        raw.records.push_back(rec);
    }
    require_record_count(raw.records.size());
    return raw;
}

void write_ssl_csv(const fs::path& path, const SslRawFrame& raw)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write file: " + path.string());
    }
    out.precision(std::numeric_limits<float>::max_digits10);
    for (const SslRecord& r : raw.records) {
        out << r.x << ',' << r.y << ',' << r.z << ',' << (r.valid ? 1 : 0) << '\n';
    }
}

SslRawFrame read_ssl_capture(const fs::path& path)
{
    if (path.extension() == ".csv") {
        return read_ssl_csv(path);
    }
    return read_sslraw(path);
}

void write_organized_frame(const fs::path& path, const SslFrame& frame)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write file: " + path.string());
    }
    const std::uint32_t dims[2] = {static_cast<std::uint32_t>(frame.rows()), static_cast<std::uint32_t>(frame.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    std::vector<float> xyz;
    std::vector<std::uint8_t> valid;
    xyz.reserve(frame.cells().size() * 3);
    valid.reserve(frame.cells().size());
    for (const SslRecord& r : frame.cells()) {
        xyz.insert(xyz.end(), {r.x, r.y, r.z});
        valid.push_back(r.valid ? 1 : 0);
    }
    out.write(reinterpret_cast<const char*>(xyz.data()), static_cast<std::streamsize>(xyz.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(valid.data()), static_cast<std::streamsize>(valid.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

OrganizedGrid read_organized_frame(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        throw IoError("cannot open file: " + path.string());
    }
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::uint32_t dims[2] = {0, 0};
    if (size < sizeof(dims) || !in.read(reinterpret_cast<char*>(dims), sizeof(dims))) {
        throw FormatError("organized frame too short: " + path.string());
    }
    OrganizedGrid grid;
    grid.rows = dims[0];
    grid.cols = dims[1];
    const std::size_t n = grid.rows * grid.cols;
    if (size != sizeof(dims) + n * (3 * sizeof(float) + 1)) {
        throw FormatError("organized frame size does not match its " + std::to_string(grid.rows) + "x" +
                          std::to_string(grid.cols) + " header: " + path.string());
    }
    std::vector<float> xyz(n * 3);
    std::vector<std::uint8_t> valid(n);
    in.read(reinterpret_cast<char*>(xyz.data()), static_cast<std::streamsize>(xyz.size() * sizeof(float)));
    in.read(reinterpret_cast<char*>(valid.data()), static_cast<std::streamsize>(valid.size()));
    if (!in) {
        throw IoError("short read: " + path.string());
    }
    grid.cells.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid.cells[i] = {xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2], valid[i] != 0};
    }
    return grid;
}

std::array<SubframeStats, kSubframes> subframe_stats(const SslFrame& frame)
{
    std::array<SubframeStats, kSubframes> stats{};
    for (std::size_t s = 0; s < kSubframes; ++s) {
        const SubframeView view = frame.subframe(s);
        SubframeStats& st = stats[s];
        st.records = view.rows() * view.cols();
        bool first = true;
        for (std::size_t r = 0; r < view.rows(); ++r) {
            for (std::size_t c = 0; c < view.cols(); ++c) {
                const SslRecord& rec = view.at(r, c);
                if (!rec.valid) {
                    continue;
                }
                ++st.valid;
                if (first) {
                    st.x = {rec.x, rec.x};
                    st.y = {rec.y, rec.y};
                    st.z = {rec.z, rec.z};
                    first = false;
                    continue;
                }
                st.x = {std::min(st.x.min, rec.x), std::max(st.x.max, rec.x)};
                st.y = {std::min(st.y.min, rec.y), std::max(st.y.max, rec.y)};
                st.z = {std::min(st.z.min, rec.z), std::max(st.z.max, rec.z)};
            }
        }
    }
    return stats;
}

} // namespace slicegs::ssl
