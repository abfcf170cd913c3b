#ifndef SLICEGS_TOOLS_COMMANDS_HPP
#define SLICEGS_TOOLS_COMMANDS_HPP

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>

#include "run_config.hpp"

namespace slicegs::cli {

/// Bad invocation: missing inputs, nonexistent paths. Maps to exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// One mask file per frame (one byte per file record) plus manifest.ini.
void cmd_segment(const RunConfig& config, std::ostream& log);

/// eval_frames.csv and eval_summary.csv over every (method, slices) pair.
void cmd_eval(const RunConfig& config, std::ostream& log);

/// bench.csv with one row per frame and unit count.
void cmd_bench(const RunConfig& config, std::ostream& log);

struct RenderInputs {
    std::filesystem::path scan;       ///< velodyne .bin
    std::filesystem::path frame_dump; ///< organized grid dump
    std::filesystem::path mask;       ///< optional, one byte per input record
    bool segment{false};              ///< overlay the configured method's result instead
};

/// <out>/<stem>.ppm from an SSL capture, a scan or a grid dump.
void cmd_render(const RunConfig& config, const RenderInputs& inputs, std::ostream& log);

/// <out>/<stem>.grid plus per-subframe statistics on `log`.
void cmd_decode_ssl(const RunConfig& config, std::ostream& log);

struct SynthOptions {
    std::size_t kitti_frames{50};
    std::size_t ssl_frames{0};
    std::uint64_t scene_seed{7};
};

/// Synthetic labelled street drive in dataset layout under <out>, SSL captures under <out>/ssl.
void cmd_synth(const RunConfig& config, const SynthOptions& options, std::ostream& log);

/// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace slicegs::cli

#endif // SLICEGS_TOOLS_COMMANDS_HPP
