#ifndef SLICEGS_SEG_RANSAC_HPP
#define SLICEGS_SEG_RANSAC_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "slicegs/range_image.hpp"
#include "slicegs/types.hpp"

namespace slicegs::ransac {

struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};
};

/// Plane {p : normal . p + offset = 0} with a unit normal and normal.z >= 0.
struct PlaneModel {
    Vec3 normal{0.0, 0.0, 1.0};
    double offset{0.0};

    [[nodiscard]] double signed_distance(const Point& p) const noexcept
    {
        return normal.x * p.x + normal.y * p.y + normal.z * p.z + offset;
    }
};

class DegenerateSample : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Plane through three points. Throws DegenerateSample when they are collinear or
/// coincident (cross product norm <= 1e-12).
PlaneModel fit_plane_3pts(const Point& p1, const Point& p2, const Point& p3);

/// Non-throwing variant used inside the sampling loop.
std::optional<PlaneModel> try_fit_plane_3pts(const Point& p1, const Point& p2, const Point& p3) noexcept;

struct InlierResult {
    std::size_t count{0};
    GroundMask mask;
};

/// Point i is an inlier iff |normal . p_i + offset| <= dist_threshold.
InlierResult count_inliers(const PointCloud& cloud, const PlaneModel& plane, double dist_threshold);

struct RansacParams {
    std::size_t iterations{200};
    double dist_threshold{0.2};
    double max_normal_tilt{deg2rad(15.0)};
    std::uint64_t seed{42};
};

/// Three distinct indices in [0, n) for round `iteration`, a pure function of
/// (seed, iteration) so runs are reproducible and schedule independent.
std::array<std::size_t, 3> sample_triple(std::uint64_t seed, std::size_t iteration, std::size_t n) noexcept;

/// Angle between the plane normal and +z.
double normal_tilt(const PlaneModel& plane) noexcept;

struct RansacResult {
    GroundMask mask;
    std::optional<PlaneModel> model;
    std::size_t inliers{0};
};

/// Keeps the accepted model (tilt <= max_normal_tilt) with the most inliers; the
/// first one found wins ties. With no accepted model the mask is all false.
/// Throws InvalidArgument for fewer than 3 points or zero iterations.
RansacResult fit_ground(const PointCloud& cloud, const RansacParams& params);

/// Mask-only convenience wrapper around fit_ground.
GroundMask segment(const PointCloud& cloud, const RansacParams& params);

} // namespace slicegs::ransac

#endif // SLICEGS_SEG_RANSAC_HPP
