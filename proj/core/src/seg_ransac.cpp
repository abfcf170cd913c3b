#include "slicegs/seg_ransac.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slicegs::ransac {

namespace {

constexpr double kDegenerateCross = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::optional<PlaneModel> try_fit_plane_3pts(const Point& p1, const Point& p2, const Point& p3) noexcept
{
    const double ux = double(p2.x) - p1.x;
    const double uy = double(p2.y) - p1.y;
    const double uz = double(p2.z) - p1.z;
    const double vx = double(p3.x) - p1.x;
    const double vy = double(p3.y) - p1.y;
    const double vz = double(p3.z) - p1.z;
    double nx = uy * vz - uz * vy;
    double ny = uz * vx - ux * vz;
    double nz = ux * vy - uy * vx;
    const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (!(len > kDegenerateCross)) {
        return std::nullopt;
    }
    nx /= len;
    ny /= len;
    nz /= len;
    if (nz < 0.0) {
        nx = -nx;
        ny = -ny;
        nz = -nz;
    }
    PlaneModel plane;
    plane.normal = {nx, ny, nz};
    plane.offset = -(nx * p1.x + ny * p1.y + nz * p1.z);
    return plane;
}

PlaneModel fit_plane_3pts(const Point& p1, const Point& p2, const Point& p3)
{
    if (auto plane = try_fit_plane_3pts(p1, p2, p3)) {
        return *plane;
    }
    throw DegenerateSample("cannot fit a plane through collinear or coincident points");
}

InlierResult count_inliers(const PointCloud& cloud, const PlaneModel& plane, double dist_threshold)
{
    InlierResult result;
    result.mask.assign(cloud.size(), 0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (std::abs(plane.signed_distance(cloud[i])) <= dist_threshold) {
            result.mask[i] = 1;
            ++result.count;
        }
    }
    return result;
}

std::array<std::size_t, 3> sample_triple(std::uint64_t seed, std::size_t iteration, std::size_t n) noexcept
{
    const std::uint64_t base = splitmix64(seed) ^ (static_cast<std::uint64_t>(iteration) * 0xD1B54A32D192ED03ull);
    const std::uint64_t h0 = splitmix64(base);
    const std::uint64_t h1 = splitmix64(h0);
    const std::uint64_t h2 = splitmix64(h1);

    const std::size_t a = h0 % n;
    std::size_t b = h1 % (n - 1);
    if (b >= a) {
        ++b;
    }
    std::size_t c = h2 % (n - 2);
    const std::size_t lo = std::min(a, b);
    const std::size_t hi = std::max(a, b);
    if (c >= lo) {
        ++c;
    }
    if (c >= hi) {
        ++c;
    }
    return {a, b, c};
}

double normal_tilt(const PlaneModel& plane) noexcept
{
    return std::acos(std::clamp(plane.normal.z, -1.0, 1.0));
}

RansacResult fit_ground(const PointCloud& cloud, const RansacParams& params)
{
    if (cloud.size() < 3) {
        throw InvalidArgument("RANSAC needs at least 3 points, got " + std::to_string(cloud.size()));
    }
    if (params.iterations < 1) {
        throw InvalidArgument("RANSAC needs at least one iteration");
    }
    if (!(params.dist_threshold > 0.0)) {
        throw InvalidArgument("RANSAC distance threshold must be positive");
    }

    RansacResult best;
    for (std::size_t it = 0; it < params.iterations; ++it) {
        const auto [i, j, k] = sample_triple(params.seed, it, cloud.size());
        const auto plane = try_fit_plane_3pts(cloud[i], cloud[j], cloud[k]);
        if (!plane || normal_tilt(*plane) > params.max_normal_tilt) {
            continue;
        }
        std::size_t count = 0;
        for (const Point& p : cloud.points) {
            count += std::abs(plane->signed_distance(p)) <= params.dist_threshold ? 1 : 0;
        }
        if (!best.model || count > best.inliers) {
            best.model = *plane;
            best.inliers = count;
        }
    }
    if (best.model) {
        best.mask = count_inliers(cloud, *best.model, params.dist_threshold).mask;
    } else {
        best.mask.assign(cloud.size(), 0);
    }
    return best;
}

GroundMask segment(const PointCloud& cloud, const RansacParams& params)
{
    return fit_ground(cloud, params).mask;
}

} // namespace slicegs::ransac
