#ifndef SLICEGS_SEG_DEPTH_HPP
#define SLICEGS_SEG_DEPTH_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "slicegs/range_image.hpp"

namespace slicegs::depth {

/// Per-pixel inclination between vertically adjacent returns, radians in [0, pi/2].
struct AngleImage {
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<double> angle;
    std::vector<std::uint8_t> valid;

    AngleImage() = default;
    AngleImage(std::size_t r, std::size_t c) : rows(r), cols(c), angle(r * c, 0.0), valid(r * c, 0) {}

    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return angle[r * cols + c]; }
    [[nodiscard]] bool is_valid(std::size_t r, std::size_t c) const { return valid[r * cols + c] != 0; }
    void set(std::size_t r, std::size_t c, double a)
    {
        angle[r * cols + c] = a;
        valid[r * cols + c] = 1;
    }
};

struct DepthParams {
    double seed_threshold{deg2rad(5.0)};
    double propagation_threshold{deg2rad(5.0)};
    std::size_t smoothing_window{5};
    std::size_t smoothing_order{2};
    bool smoothing{true};
    /// z of the virtual ground point under the sensor that the lowest return in each column is paired with.
    double virtual_ground_z{-1.73};
};

/// Walks each column bottom-up pairing consecutive occupied pixels A (lower) and B (upper):
/// angle(B) = atan2(|z_B - z_A|, |d_B - d_A|) with d the horizontal distance. The lowest
/// occupied pixel pairs with (d = 0, z = virtual_ground_z). Empty pixels stay invalid.
AngleImage compute_angle_image(const RangeImageView& image, double virtual_ground_z = -1.73);

/// Savitzky-Golay smoothing down each column. Each valid angle becomes the value at
/// offset 0 of the least-squares polynomial fitted to the valid samples inside the
/// window; when fewer than order + 1 samples are available the order drops to
/// samples - 1, and with fewer than 2 samples the value passes through.
/// Throws InvalidArgument unless window is odd, 3 <= window <= 63, and 1 <= order < window.
AngleImage savitzky_golay_smooth(const AngleImage& angles, std::size_t window, std::size_t order);

/// Seeds are each column's lowest valid pixel with angle < seed_threshold. Labels grow
/// over 4-connected valid pixels while |a(n) - a(cur)| < propagation_threshold and
/// a(n) < seed_threshold + propagation_threshold. Throws InvalidArgument for
/// non-positive thresholds.
PixelMask bfs_ground_label(const AngleImage& angles, double seed_threshold, double propagation_threshold);

/// Angle image, optional smoothing, then BFS labeling on one view.
PixelMask segment(const RangeImageView& image, const DepthParams& params);

} // namespace slicegs::depth

#endif // SLICEGS_SEG_DEPTH_HPP
