#ifndef SLICEGS_TOOLS_RUN_CONFIG_HPP
#define SLICEGS_TOOLS_RUN_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slicegs/kitti_io.hpp"
#include "slicegs/parallel_exec.hpp"
#include "slicegs/range_image.hpp"
#include "slicegs/ssl_frame.hpp"

namespace slicegs::cli {

/// Everything a run depends on. Serializes to a sectioned key = value file;
/// a run is reproducible from that file plus its inputs.
struct RunConfig {
    // [run]
    std::string method{"depth"};
    std::size_t slices{1};
    std::size_t units{1};
    std::uint64_t seed{42};
    std::string frames; ///< "a..b", empty = all
    std::filesystem::path out{"out"};

    // [dataset]
    std::filesystem::path dataset_root;
    std::string sequence{"00"};
    std::string ground_classes{"default"};

    // [ssl]
    std::filesystem::path ssl_input;
    std::string parity{"even"};

    // [projection]
    std::size_t projection_rows{64};
    std::size_t projection_cols{1024};
    double fov_up_deg{2.0};
    double fov_down_deg{-24.8};

    // [depth]
    double seed_threshold_deg{5.0};
    double propagation_threshold_deg{5.0};
    bool smoothing{true};
    std::size_t smoothing_window{5};
    std::size_t smoothing_order{2};
    double virtual_ground_z{-1.73};

    // [ransac]
    std::size_t ransac_iterations{200};
    double ransac_dist_threshold{0.2};
    double ransac_max_tilt_deg{15.0};

    // [smrf]
    double smrf_cell_size{0.5};
    std::size_t smrf_max_window_radius{18};
    double smrf_slope{0.15};
    double smrf_elevation_threshold{0.5};
    double smrf_elevation_scale{1.25};

    // [eval]
    std::vector<std::string> eval_methods{"depth", "ransac", "smrf"};
    std::vector<std::size_t> eval_slices{1, 2, 3, 4, 5};

    // [bench]
    std::vector<std::size_t> bench_units{1, 2, 3, 5};
    std::size_t bench_repetitions{11};
    std::size_t bench_warmup{2};

    [[nodiscard]] ProjectionConfig projection() const;
    [[nodiscard]] MethodConfig method_config() const;
    [[nodiscard]] MethodConfig method_config(const std::string& name) const;
    [[nodiscard]] std::optional<kitti::FrameRange> frame_range() const;

    /// Checks value ranges; throws InvalidArgument.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Section that run manifests append after the config echo; ignored when reading.
inline constexpr const char* kManifestSection = "timing";

/// Parses a config file; unknown sections or keys are errors (InvalidArgument).
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::istream& in);
void apply_config(std::istream& in, RunConfig& config);

/// Writes every field, so the output alone reproduces the run.
void write_config(std::ostream& out, const RunConfig& config);

std::vector<std::size_t> parse_size_list(const std::string& text);
std::vector<std::string> parse_string_list(const std::string& text);

} // namespace slicegs::cli

#endif // SLICEGS_TOOLS_RUN_CONFIG_HPP
