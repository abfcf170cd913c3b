#ifndef SLICEGS_PARALLEL_EXEC_HPP
#define SLICEGS_PARALLEL_EXEC_HPP

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "slicegs/range_image.hpp"
#include "slicegs/seg_depth.hpp"
#include "slicegs/seg_ransac.hpp"
#include "slicegs/seg_smrf.hpp"
#include "slicegs/ssl_frame.hpp"
#include "slicegs/types.hpp"

namespace slicegs {

enum class MethodId { Depth, Ransac, Smrf };

MethodId parse_method(const std::string& name);
const char* to_string(MethodId id);

struct MethodConfig {
    MethodId id{MethodId::Depth};
    depth::DepthParams depth;
    ransac::RansacParams ransac;
    smrf::SmrfParams smrf;
};

/// A scan together with its organized image. Mechanical scans are projected;
/// SSL frames use the decoded grid, so every point owns a pixel.
struct Frame {
    std::string id;
    PointCloud cloud;
    RangeImage image;
    bool organized{false};
};

Frame make_mechanical_frame(std::string id, PointCloud cloud, const ProjectionConfig& projection = {});
Frame make_ssl_frame(std::string id, const ssl::SslFrame& decoded);

/// Slice (column band) owning each point: its pixel column for organized frames,
/// otherwise the column of its azimuth, so unprojected points still get a slice.
std::vector<std::size_t> point_slice_ids(const Frame& frame, const SliceSpec& spec);

/// Contiguous balanced assignment of K slices to P processing units.
struct PuAllocation {
    std::size_t slice_count{1};
    std::size_t unit_count{1};
    std::vector<std::size_t> unit_of_slice;

    /// Slices owned by `unit`, ascending.
    [[nodiscard]] std::vector<std::size_t> slices_of(std::size_t unit) const;
};

/// Units 0 .. K%P-1 get ceil(K/P) slices, the rest floor(K/P). Throws InvalidArgument
/// unless 1 <= P <= K.
PuAllocation allocate(std::size_t slice_count, std::size_t unit_count);

struct BenchmarkRecord {
    std::string method;
    std::size_t slices{1};
    std::size_t units{1};
    std::string frame;
    double wall_ms{0.0};
    double speedup{1.0};
};

struct SlicedRun {
    GroundMask mask;
    BenchmarkRecord record;
    /// Unit that executed each slice, for checking the dispatch against the allocation.
    std::vector<std::size_t> executed_by;
};

/// Raised when an algorithm fails inside a slice.
class SliceError : public std::runtime_error {
  public:
    SliceError(std::size_t slice, const std::string& what)
        : std::runtime_error("slice " + std::to_string(slice) + ": " + what), slice_(slice)
    {
    }
    [[nodiscard]] std::size_t slice() const noexcept { return slice_; }

  private:
    std::size_t slice_;
};

/// Per-slice RNG seed.
inline std::uint64_t slice_seed(std::uint64_t seed, std::size_t slice) noexcept
{
    return seed ^ static_cast<std::uint64_t>(slice);
}

/// Segments `frame` in K slices on P units. Each unit runs its slices in order on its
/// own thread, writing only to its own slice outputs; after all units finish the slice
/// results are merged in slice order. The mask does not depend on P.
SlicedRun run_sliced(const Frame& frame, const MethodConfig& method, std::size_t slice_count,
                     std::size_t unit_count);

/// Median wall time (ms) of `repetitions` K=1, P=1 runs after `warmup` untimed runs.
double time_baseline(const Frame& frame, const MethodConfig& method, std::size_t repetitions = 11,
                     std::size_t warmup = 2);

/// Median wall time of repeated run_sliced calls, same protocol as time_baseline.
double time_sliced(const Frame& frame, const MethodConfig& method, std::size_t slice_count, std::size_t unit_count,
                   std::size_t repetitions = 11, std::size_t warmup = 2);

/// Header `method,slices,units,frame,wall_ms,speedup`.
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records);

} // namespace slicegs

#endif // SLICEGS_PARALLEL_EXEC_HPP
