#ifndef SLICEGS_TYPES_HPP
#define SLICEGS_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicegs {

/// One LiDAR return in sensor coordinates (meters). Intensity is unitless in [0, 1].
struct Point {
    float x{0.0f};
    float y{0.0f};
    float z{0.0f};
    float intensity{0.0f};

    friend bool operator==(const Point&, const Point&) = default;
};

/// Ordered scan. A point's original index is its position in `points`;
/// every mask produced downstream indexes into this order.
struct PointCloud {
    std::vector<Point> points;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] bool empty() const noexcept { return points.empty(); }
    const Point& operator[](std::size_t i) const { return points[i]; }
};

/// Per-point ground flags (1 = ground) aligned with PointCloud order.
/// Bytes rather than vector<bool> so workers can write disjoint ranges.
using GroundMask = std::vector<std::uint8_t>;

/// Ground truth flags share the representation of predictions.
using GroundTruthMask = std::vector<std::uint8_t>;

// Error taxonomy. InvalidArgument is a usage/config problem; the rest are
// runtime failures on otherwise valid requests.

class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace slicegs

#endif // SLICEGS_TYPES_HPP
