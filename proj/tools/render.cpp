#include "render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace slicegs::cli {

namespace {
constexpr double kFarGray = 48.0;
}

RgbImage render_range_image(const RangeImage& image, const std::vector<std::uint8_t>& ground)
{
    const std::size_t pixels = image.rows * image.cols;
    if (!ground.empty() && ground.size() != pixels) {
        throw DimensionMismatch("overlay has " + std::to_string(ground.size()) + " entries, image has " +
                                std::to_string(pixels) + " pixels");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t px = 0; px < pixels; ++px) {
        if (image.point_index[px] != RangeImage::kEmpty && image.range[px] > 0.0f) {
            const double inv = 1.0 / image.range[px];
            lo = std::min(lo, inv);
            hi = std::max(hi, inv);
        }
    }

    RgbImage out{image.cols, image.rows, std::vector<std::uint8_t>(pixels * 3, 0)};
    for (std::size_t px = 0; px < pixels; ++px) {
        if (image.point_index[px] == RangeImage::kEmpty || !(image.range[px] > 0.0f)) {
            continue;
        }
        std::uint8_t* dst = &out.rgb[px * 3];
        if (!ground.empty() && ground[px]) {
            dst[0] = 255;
            continue;
        }
        const double inv = 1.0 / image.range[px];
        const double t = hi > lo ? (inv - lo) / (hi - lo) : 1.0;
        const auto g = static_cast<std::uint8_t>(std::lround(kFarGray + t * (255.0 - kFarGray)));
        dst[0] = dst[1] = dst[2] = g;
    }
    return out;
}

void write_ppm(std::ostream& out, const RgbImage& image)
{
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_ppm(out, image);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

} // namespace slicegs::cli
