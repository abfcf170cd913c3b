#ifndef SLICEGS_TOOLS_RENDER_HPP
#define SLICEGS_TOOLS_RENDER_HPP

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

#include "slicegs/range_image.hpp"

namespace slicegs::cli {

/// cols x rows RGB image, row-major, 3 bytes per pixel.
struct RgbImage {
    std::size_t width{0};
    std::size_t height{0};
    std::vector<std::uint8_t> rgb;
};

/// Gray level from inverse range normalized over the occupied pixels (nearest = 255,
/// farthest = 48), ground pixels red, empty pixels black. `ground` holds one flag per
/// pixel of `image` or is empty for no overlay; any other length is a DimensionMismatch.
RgbImage render_range_image(const RangeImage& image, const std::vector<std::uint8_t>& ground);

/// Binary P6 pixmap.
void write_ppm(std::ostream& out, const RgbImage& image);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

} // namespace slicegs::cli

#endif // SLICEGS_TOOLS_RENDER_HPP
