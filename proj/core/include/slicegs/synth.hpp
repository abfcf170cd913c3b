#ifndef SLICEGS_SYNTH_HPP
#define SLICEGS_SYNTH_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "slicegs/ssl_frame.hpp"
#include "slicegs/types.hpp"

/// Ray-cast synthetic scenes: stand-ins for SemanticKITTI sequences and SSL captures
/// in tests, benchmarks and demos. Labels use SemanticKITTI class ids.
namespace slicegs::synth {

namespace label {
inline constexpr std::uint32_t kCar = 10;
inline constexpr std::uint32_t kRoad = 40;
inline constexpr std::uint32_t kParking = 44;
inline constexpr std::uint32_t kSidewalk = 48;
inline constexpr std::uint32_t kOtherGround = 49;
inline constexpr std::uint32_t kBuilding = 50;
inline constexpr std::uint32_t kFence = 51;
inline constexpr std::uint32_t kVegetation = 70;
inline constexpr std::uint32_t kTrunk = 71;
inline constexpr std::uint32_t kTerrain = 72;
inline constexpr std::uint32_t kPole = 80;
} // namespace label

struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};
};

struct Box {
    Vec3 min;
    Vec3 max;
    std::uint32_t label{label::kBuilding};
};

struct Cylinder {
    double cx{0.0};
    double cy{0.0};
    double radius{0.1};
    double z0{0.0};
    double z1{1.0};
    std::uint32_t label{label::kPole};
};

struct Sphere {
    Vec3 center;
    double radius{1.0};
    std::uint32_t label{label::kVegetation};
};

struct Hit {
    double t{0.0};
    std::uint32_t label{0};
};

/// Heightfield ground plus solid primitives.
class Scene {
  public:
    /// Endless procedural street along +x: road, parking strips, curbs, sidewalks,
    /// lawns, buildings, parked cars, poles and trees. Fully determined by `seed`.
    static Scene street(std::uint64_t seed);
    /// Horizontal ground at height `z` with nothing on it.
    static Scene flat(double z);

    /// Ground height and class at (x, y).
    [[nodiscard]] std::pair<double, std::uint32_t> ground(double x, double y) const;
    /// Nearest hit along origin + t * dir (dir unit length) within max_range.
    [[nodiscard]] std::optional<Hit> cast(const Vec3& origin, const Vec3& dir, double max_range) const;

    std::vector<Box> boxes;
    std::vector<Cylinder> cylinders;
    std::vector<Sphere> spheres;

  private:
    bool flat_{false};
    double flat_z_{0.0};
    std::uint64_t seed_{0};
};

/// Rotating 64-beam sensor.
struct MechanicalLidar {
    std::size_t beams{64};
    std::size_t azimuth_steps{1800};
    double fov_up_deg{2.0};
    double fov_down_deg{-24.8};
    double max_range{80.0};
    double range_noise{0.02}; ///< meters, 1 sigma
    double dropout{0.0};      ///< probability a return is lost
};

struct LabeledScan {
    PointCloud cloud;
    std::vector<std::uint32_t> labels;
};

/// Scan from `sensor` (world position, yaw 0). Points are in sensor coordinates.
LabeledScan scan_mechanical(const Scene& scene, const Vec3& sensor, const MechanicalLidar& lidar,
                            std::uint64_t noise_seed);

struct StreetSequence {
    std::uint64_t seed{7};
    double sensor_height{1.73};
    double step{1.2}; ///< ego advance per frame (m)
    MechanicalLidar lidar;
};

/// Frame `frame` of a drive down the street scene.
LabeledScan street_frame(const StreetSequence& seq, std::size_t frame);

/// Writes frames [0, count) as sequences/<seq>/velodyne/*.bin and labels/*.label under root.
void write_kitti_sequence(const std::filesystem::path& root, const std::string& sequence, const StreetSequence& seq,
                          std::size_t count);

/// MEMS sensor with five 126 x 125 subframes whose fans are yawed slightly apart.
struct SslLidar {
    double subframe_hfov_deg{25.0};
    double subframe_spacing_deg{22.0}; ///< yaw step between subframe centers; < hfov overlaps edges
    double vfov_deg{25.0};
    double max_range{150.0};
    double range_noise{0.01};
    double dropout{0.01};
};

/// Organized returns of one SSL capture: cell (r, c) of the 126 x 625 frame, invalid when
/// the ray hits nothing or drops out.
std::vector<ssl::SslRecord> ssl_cells(const Scene& scene, const Vec3& sensor, const SslLidar& lidar,
                                      std::uint64_t noise_seed);

/// Labels per organized cell (0 where invalid), matching ssl_cells.
std::vector<std::uint32_t> ssl_cell_labels(const Scene& scene, const Vec3& sensor, const SslLidar& lidar,
                                           std::uint64_t noise_seed);

/// Serializes organized cells into sensor emission order (zig-zag rows per `parity`).
ssl::SslRawFrame to_raw_frame(const std::vector<ssl::SslRecord>& cells,
                              ssl::ZigzagParity parity = ssl::ZigzagParity::Even);

/// Capture of the street scene `frame` steps along the drive.
ssl::SslRawFrame street_ssl_capture(std::uint64_t seed, std::size_t frame, double sensor_height = 1.73);

} // namespace slicegs::synth

#endif // SLICEGS_SYNTH_HPP
