#include "slicegs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "slicegs/kitti_io.hpp"

namespace slicegs::synth {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBlock = 30.0;       // street block length along x
constexpr double kRoadHalf = 4.0;     // road half width
constexpr double kParkingWidth = 2.5;
constexpr double kSidewalkWidth = 3.0;
constexpr double kCurb = 0.15;
constexpr double kCrossStreetEvery = 4; // blocks
constexpr double kSceneStart = -200.0;
constexpr double kSceneEnd = 600.0;

std::uint64_t mix(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Uniform [0, 1) from (seed, a, b, c).
double unit_hash(std::uint64_t seed, std::int64_t a, std::int64_t b, std::int64_t c = 0)
{
    std::uint64_t h = mix(seed);
    h = mix(h ^ static_cast<std::uint64_t>(a));
    h = mix(h ^ static_cast<std::uint64_t>(b));
    h = mix(h ^ static_cast<std::uint64_t>(c));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double base_height(double x)
{
    return 0.35 * std::sin(x / 45.0) + 0.15 * std::sin(x / 17.0 + 1.3);
}

std::int64_t block_of(double x)
{
    return static_cast<std::int64_t>(std::floor(x / kBlock));
}

bool cross_street_block(std::int64_t block)
{
    return block % static_cast<std::int64_t>(kCrossStreetEvery) == 0;
}

/// Whether the side (0 = +y, 1 = -y) of a block has a parking strip.
bool has_parking(std::uint64_t seed, std::int64_t block, int side)
{
    return unit_hash(seed, block, side, 1) < 0.55;
}

/// 0 = lawn, 1 = lawn with building behind.
bool has_building(std::uint64_t seed, std::int64_t block, int side)
{
    return unit_hash(seed, block, side, 2) < 0.6;
}

double sidewalk_start(std::uint64_t seed, std::int64_t block, int side)
{
    return kRoadHalf + (has_parking(seed, block, side) ? kParkingWidth : 0.0);
}

std::optional<double> ray_box(const Vec3& o, const Vec3& d, const Box& b)
{
    double t0 = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    const double os[3] = {o.x, o.y, o.z};
    const double ds[3] = {d.x, d.y, d.z};
    const double lo[3] = {b.min.x, b.min.y, b.min.z};
    const double hi[3] = {b.max.x, b.max.y, b.max.z};
    for (int a = 0; a < 3; ++a) {
        if (std::abs(ds[a]) < 1e-12) {
            if (os[a] < lo[a] || os[a] > hi[a]) {
                return std::nullopt;
            }
            continue;
        }
        double ta = (lo[a] - os[a]) / ds[a];
        double tb = (hi[a] - os[a]) / ds[a];
        if (ta > tb) {
            std::swap(ta, tb);
        }
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) {
            return std::nullopt;
        }
    }
    if (t0 <= 1e-6) {
        return std::nullopt;
    }
    return t0;
}

std::optional<double> ray_cylinder(const Vec3& o, const Vec3& d, const Cylinder& c)
{
    const double ox = o.x - c.cx;
    const double oy = o.y - c.cy;
    const double a = d.x * d.x + d.y * d.y;
    if (a < 1e-12) {
        return std::nullopt;
    }
    const double b = 2.0 * (ox * d.x + oy * d.y);
    const double cc = ox * ox + oy * oy - c.radius * c.radius;
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double t = (-b - std::sqrt(disc)) / (2.0 * a);
    if (t <= 1e-6) {
        return std::nullopt;
    }
    const double z = o.z + t * d.z;
    if (z < c.z0 || z > c.z1) {
        return std::nullopt;
    }
    return t;
}

std::optional<double> ray_sphere(const Vec3& o, const Vec3& d, const Sphere& s)
{
    const double ox = o.x - s.center.x;
    const double oy = o.y - s.center.y;
    const double oz = o.z - s.center.z;
    const double b = ox * d.x + oy * d.y + oz * d.z;
    const double c = ox * ox + oy * oy + oz * oz - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double t = -b - std::sqrt(disc);
    if (t <= 1e-6) {
        return std::nullopt;
    }
    return t;
}

void add_car(Scene& scene, double x, double y, double yaw_len)
{
    const double z = base_height(x);
    scene.boxes.push_back({{x - yaw_len / 2, y - 0.9, z + 0.25}, {x + yaw_len / 2, y + 0.9, z + 1.5}, label::kCar});
}

Vec3 direction(double azimuth, double elevation)
{
    return {std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth), std::sin(elevation)};
}

} // namespace

Scene Scene::flat(double z)
{
    Scene s;
    s.flat_ = true;
    s.flat_z_ = z;
    return s;
}

Scene Scene::street(std::uint64_t seed)
{
    Scene s;
    s.seed_ = seed;
    for (auto block = block_of(kSceneStart); block <= block_of(kSceneEnd); ++block) {
        const double bx = static_cast<double>(block) * kBlock;
        const bool cross = cross_street_block(block);
        for (int side = 0; side < 2; ++side) {
            const double sign = side == 0 ? 1.0 : -1.0;
            const double walk = sidewalk_start(seed, block, side);
            const double lawn = walk + kSidewalkWidth;
            const double x_lo = cross ? bx + 10.0 : bx;

            if (has_parking(seed, block, side)) {
                const int cars = static_cast<int>(unit_hash(seed, block, side, 3) * 4.0);
                for (int k = 0; k < cars; ++k) {
                    const double cx = x_lo + 3.0 + 6.0 * k + 1.5 * unit_hash(seed, block, side, 10 + k);
                    if (cx + 2.1 < bx + kBlock) {
                        add_car(s, cx, sign * (kRoadHalf + kParkingWidth / 2.0), 4.2);
                    }
                }
            }
            // Poles along the curb.
            for (double px = x_lo + 5.0; px < bx + kBlock; px += 15.0) {
                const double py = sign * (walk + 0.5);
                s.cylinders.push_back({px, py, 0.12, base_height(px), base_height(px) + 5.0, label::kPole});
            }
            // Street trees on the lawn side of the sidewalk.
            if (unit_hash(seed, block, side, 4) < 0.7) {
                for (double tx = x_lo + 8.0; tx < bx + kBlock - 2.0; tx += 11.0) {
                    const double ty = sign * (lawn + 2.0);
                    const double z = base_height(tx) + kCurb;
                    s.cylinders.push_back({tx, ty, 0.2, z, z + 2.6, label::kTrunk});
                    s.spheres.push_back({{tx, ty, z + 4.2}, 2.0, label::kVegetation});
                }
            }
            if (unit_hash(seed, block, side, 5) < 0.3) {
                const double fy = sign * (lawn + 0.3);
                const double z = base_height(bx) + kCurb;
                s.boxes.push_back({{x_lo + 1.0, std::min(fy, fy + sign * 0.05) - 0.05, z},
                                   {bx + kBlock - 1.0, std::max(fy, fy + sign * 0.05) + 0.05, z + 1.2},
                                   label::kFence});
            }
            if (has_building(seed, block, side)) {
                const double setback = lawn + 6.0 + 6.0 * unit_hash(seed, block, side, 6);
                const double depth = 10.0;
                const double height = 6.0 + 10.0 * unit_hash(seed, block, side, 7);
                const double z = base_height(bx + kBlock / 2) - 0.5;
                const double y0 = sign * setback;
                const double y1 = sign * (setback + depth);
                s.boxes.push_back({{x_lo + 2.0, std::min(y0, y1), z},
                                   {bx + kBlock - 2.0, std::max(y0, y1), z + height},
                                   label::kBuilding});
            }
        }
        // Occasional car driving in the opposite lane.
        if (unit_hash(seed, block, 9) < 0.5) {
            add_car(s, bx + 15.0, 2.0, 4.4);
        }
    }
    return s;
}

std::pair<double, std::uint32_t> Scene::ground(double x, double y) const
{
    if (flat_) {
        return {flat_z_, label::kRoad};
    }
    const double base = base_height(x);
    const double ay = std::abs(y);
    const std::int64_t block = block_of(x);
    const double bx = static_cast<double>(block) * kBlock;
    if (ay <= kRoadHalf || (cross_street_block(block) && x - bx < 8.0)) {
        return {base, label::kRoad};
    }
    const int side = y >= 0.0 ? 0 : 1;
    const double walk = sidewalk_start(seed_, block, side);
    if (ay <= walk) {
        return {base, label::kParking};
    }
    if (ay <= walk + kSidewalkWidth) {
        return {base + kCurb, label::kSidewalk};
    }
    // Lawns rise gently away from the street.
    const double off = ay - walk - kSidewalkWidth;
    const double rise = 0.04 * off + 0.12 * std::sin(x / 7.0 + y / 5.0);
    return {base + kCurb + 0.1 + rise, label::kTerrain};
}

std::optional<Hit> Scene::cast(const Vec3& o, const Vec3& d, double max_range) const
{
    std::optional<Hit> best;
    auto offer = [&](std::optional<double> t, std::uint32_t lbl) {
        if (t && *t <= max_range && (!best || *t < best->t)) {
            best = Hit{*t, lbl};
        }
    };
    for (const Box& b : boxes) {
        offer(ray_box(o, d, b), b.label);
    }
    for (const Cylinder& c : cylinders) {
        offer(ray_cylinder(o, d, c), c.label);
    }
    for (const Sphere& sp : spheres) {
        offer(ray_sphere(o, d, sp), sp.label);
    }

    const double limit = best ? best->t : max_range;
    if (flat_) {
        if (d.z < 0.0) {
            const double t = (flat_z_ - o.z) / d.z;
            if (t > 0.0 && t <= limit) {
                best = Hit{t, label::kRoad};
            }
        }
        return best;
    }
    if (d.z > 0.05) {
        return best;
    }
    auto above = [&](double t) {
        const double x = o.x + t * d.x;
        const double y = o.y + t * d.y;
        return o.z + t * d.z - ground(x, y).first;
    };
    double t_prev = 0.0;
    double t = 0.3;
    while (t_prev < limit) {
        t = std::min(t, limit);
        if (above(t) < 0.0) {
            double lo = t_prev;
            double hi = t;
            for (int i = 0; i < 30; ++i) {
                const double mid = 0.5 * (lo + hi);
                (above(mid) < 0.0 ? hi : lo) = mid;
            }
            const double th = 0.5 * (lo + hi);
            best = Hit{th, ground(o.x + th * d.x, o.y + th * d.y).second};
            break;
        }
        t_prev = t;
        t += 0.1 + 0.015 * t;
    }
    return best;
}

LabeledScan scan_mechanical(const Scene& scene, const Vec3& sensor, const MechanicalLidar& lidar,
                            std::uint64_t noise_seed)
{
    // Restrict primitives to those the sensor can reach.
    Scene local = scene;
    const double reach = lidar.max_range + 20.0;
    auto far = [&](double x, double y) { return std::hypot(x - sensor.x, y - sensor.y) > reach; };
    std::erase_if(local.boxes, [&](const Box& b) {
        const double cx = std::clamp(sensor.x, b.min.x, b.max.x);
        const double cy = std::clamp(sensor.y, b.min.y, b.max.y);
        return far(cx, cy);
    });
    std::erase_if(local.cylinders, [&](const Cylinder& c) { return far(c.cx, c.cy); });
    std::erase_if(local.spheres, [&](const Sphere& s) { return far(s.center.x, s.center.y); });

    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> noise(0.0, lidar.range_noise);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    LabeledScan scan;
    scan.cloud.points.reserve(lidar.beams * lidar.azimuth_steps);
    const double span = lidar.fov_up_deg - lidar.fov_down_deg;
    for (std::size_t a = 0; a < lidar.azimuth_steps; ++a) {
        for (std::size_t b = 0; b < lidar.beams; ++b) {
            const double el = lidar.fov_up_deg - (static_cast<double>(b) + 0.5) * span / static_cast<double>(lidar.beams);
            const double az = -kPi + (static_cast<double>(a) + 0.5 + 0.37 * static_cast<double>(b % 3)) * 2.0 * kPi /
                                         static_cast<double>(lidar.azimuth_steps);
            const Vec3 d = direction(az, el * kPi / 180.0);
            const auto hit = local.cast(sensor, d, lidar.max_range);
            const double n = lidar.range_noise > 0.0 ? noise(rng) : 0.0;
            const double drop = uni(rng);
            if (!hit || drop < lidar.dropout) {
                continue;
            }
            const double t = std::max(0.5, hit->t + n);
            const auto intensity = static_cast<float>(0.2 + 0.6 * unit_hash(noise_seed, static_cast<std::int64_t>(a),
                                                                             static_cast<std::int64_t>(b)));
            scan.cloud.points.push_back(
                {static_cast<float>(t * d.x), static_cast<float>(t * d.y), static_cast<float>(t * d.z), intensity});
            scan.labels.push_back(hit->label);
        }
    }
    return scan;
}

LabeledScan street_frame(const StreetSequence& seq, std::size_t frame)
{
    static thread_local std::optional<std::pair<std::uint64_t, Scene>> cache;
    if (!cache || cache->first != seq.seed) {
        cache.emplace(seq.seed, Scene::street(seq.seed));
    }
    const double x = static_cast<double>(frame) * seq.step;
    const Vec3 sensor{x, -2.0, base_height(x) + seq.sensor_height};
    return scan_mechanical(cache->second, sensor, seq.lidar, mix(seq.seed ^ (0xF00Dull + frame)));
}

void write_kitti_sequence(const fs::path& root, const std::string& sequence, const StreetSequence& seq,
                          std::size_t count)
{
    const fs::path dir = root / "sequences" / kitti::sequence_dir_name(sequence);
    fs::create_directories(dir / "velodyne");
    fs::create_directories(dir / "labels");
    char name[32];
    for (std::size_t f = 0; f < count; ++f) {
        const LabeledScan scan = street_frame(seq, f);
        std::snprintf(name, sizeof(name), "%06zu", f);
        kitti::save_velodyne_bin(dir / "velodyne" / (std::string(name) + ".bin"), scan.cloud);
        kitti::save_raw_labels(dir / "labels" / (std::string(name) + ".label"), scan.labels);
    }
}

namespace {

template <typename Emit>
void cast_ssl(const Scene& scene, const Vec3& sensor, const SslLidar& lidar, std::uint64_t noise_seed, Emit emit)
{
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> noise(0.0, lidar.range_noise);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (std::size_t r = 0; r < ssl::kRows; ++r) {
        const double el = lidar.vfov_deg * (0.5 - static_cast<double>(r) / static_cast<double>(ssl::kRows - 1));
        for (std::size_t c = 0; c < ssl::kCols; ++c) {
            const std::size_t sub = c / ssl::kSubframeCols;
            const std::size_t local = c % ssl::kSubframeCols;
            const double center = (2.0 - static_cast<double>(sub)) * lidar.subframe_spacing_deg;
            const double az = center + lidar.subframe_hfov_deg *
                                           (0.5 - static_cast<double>(local) / static_cast<double>(ssl::kSubframeCols - 1));
            const Vec3 d = direction(az * kPi / 180.0, el * kPi / 180.0);
            const auto hit = scene.cast(sensor, d, lidar.max_range);
            const double n = lidar.range_noise > 0.0 ? noise(rng) : 0.0;
            const double drop = uni(rng);
            if (!hit || drop < lidar.dropout) {
                emit(r * ssl::kCols + c, ssl::SslRecord{}, 0u);
                continue;
            }
            const double t = std::max(0.5, hit->t + n);
            emit(r * ssl::kCols + c,
                 ssl::SslRecord{static_cast<float>(t * d.x), static_cast<float>(t * d.y), static_cast<float>(t * d.z), true},
                 hit->label);
        }
    }
}

} // namespace

std::vector<ssl::SslRecord> ssl_cells(const Scene& scene, const Vec3& sensor, const SslLidar& lidar,
                                      std::uint64_t noise_seed)
{
    std::vector<ssl::SslRecord> cells(ssl::kRows * ssl::kCols);
    cast_ssl(scene, sensor, lidar, noise_seed,
             [&](std::size_t i, const ssl::SslRecord& rec, std::uint32_t) { cells[i] = rec; });
    return cells;
}

std::vector<std::uint32_t> ssl_cell_labels(const Scene& scene, const Vec3& sensor, const SslLidar& lidar,
                                           std::uint64_t noise_seed)
{
    std::vector<std::uint32_t> labels(ssl::kRows * ssl::kCols, 0);
    cast_ssl(scene, sensor, lidar, noise_seed,
             [&](std::size_t i, const ssl::SslRecord&, std::uint32_t lbl) { labels[i] = lbl; });
    return labels;
}

ssl::SslRawFrame to_raw_frame(const std::vector<ssl::SslRecord>& cells, ssl::ZigzagParity parity)
{
    if (cells.size() != ssl::kRecords) {
        throw InvalidArgument("expected " + std::to_string(ssl::kRecords) + " organized cells");
    }
    ssl::SslRawFrame raw;
    raw.records.resize(ssl::kRecords);
    for (std::size_t r = 0; r < ssl::kRows; ++r) {
        for (std::size_t c = 0; c < ssl::kCols; ++c) {
            raw.records[ssl::record_index_for_cell(r, c, parity)] = cells[r * ssl::kCols + c];
        }
    }
    return raw;
}

ssl::SslRawFrame street_ssl_capture(std::uint64_t seed, std::size_t frame, double sensor_height)
{
    const Scene scene = Scene::street(seed);
    const double x = static_cast<double>(frame) * 1.2;
    const Vec3 sensor{x, -2.0, base_height(x) + sensor_height};
    return to_raw_frame(ssl_cells(scene, sensor, SslLidar{}, mix(seed ^ (0x55Dull + frame))));
}

} // namespace slicegs::synth
