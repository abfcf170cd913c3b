#include "slicegs/parallel_exec.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

namespace slicegs {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start)
{
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return std::max(ms, 1e-6);
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Output of one slice, written only by the unit that owns it.
struct SliceOutput {
    PixelMask pixels;                // image-domain methods
    std::vector<std::uint32_t> ids;  // point-domain methods: member points
    GroundMask point_mask;           // point-domain methods: mask over `ids`
    std::exception_ptr error;
    std::size_t unit{0};
};

void run_slice(const Frame& frame, const MethodConfig& method, const SliceSpec& spec,
               const std::vector<std::size_t>& point_slice, std::size_t slice, SliceOutput& out)
{
    if (method.id == MethodId::Depth) {
        const RangeImageView view(frame.image, spec.intervals[slice]);
        out.pixels = depth::segment(view, method.depth);
        return;
    }

    PointCloud sub;
    for (std::size_t i = 0; i < point_slice.size(); ++i) {
        if (point_slice[i] == slice) {
            out.ids.push_back(static_cast<std::uint32_t>(i));
            sub.points.push_back(frame.cloud[i]);
        }
    }
    if (sub.empty()) {
        return;
    }
    if (method.id == MethodId::Ransac) {
        ransac::RansacParams params = method.ransac;
        params.seed = slice_seed(params.seed, slice);
        out.point_mask = ransac::segment(sub, params);
    } else {
        out.point_mask = smrf::segment(sub, method.smrf);
    }
}

} // namespace

MethodId parse_method(const std::string& name)
{
    if (name == "depth") {
        return MethodId::Depth;
    }
    if (name == "ransac") {
        return MethodId::Ransac;
    }
    if (name == "smrf") {
        return MethodId::Smrf;
    }
    throw InvalidArgument("unknown method '" + name + "' (expected depth|ransac|smrf)");
}

const char* to_string(MethodId id)
{
    switch (id) {
    case MethodId::Depth:
        return "depth";
    case MethodId::Ransac:
        return "ransac";
    case MethodId::Smrf:
        return "smrf";
    }
    return "unknown";
}

Frame make_mechanical_frame(std::string id, PointCloud cloud, const ProjectionConfig& projection)
{
    Frame f;
    f.id = std::move(id);
    f.image = project_spherical(cloud, projection);
    f.cloud = std::move(cloud);
    f.organized = false;
    return f;
}

Frame make_ssl_frame(std::string id, const ssl::SslFrame& decoded)
{
    Frame f;
    f.id = std::move(id);
    f.cloud = ssl::ssl_to_point_cloud(decoded).cloud;
    f.image = image_from_ssl(decoded);
    f.organized = true;
    return f;
}

std::vector<std::size_t> point_slice_ids(const Frame& frame, const SliceSpec& spec)
{
    std::vector<std::size_t> ids(frame.cloud.size(), 0);
    if (frame.organized) {
        for (std::size_t px = 0; px < frame.image.point_index.size(); ++px) {
            const std::int32_t idx = frame.image.point_index[px];
            if (idx != RangeImage::kEmpty) {
                ids[static_cast<std::size_t>(idx)] = spec.slice_of_column(px % frame.image.cols);
            }
        }
        return ids;
    }
    for (std::size_t i = 0; i < frame.cloud.size(); ++i) {
        const Point& p = frame.cloud[i];
        ids[i] = spec.slice_of_column(azimuth_column(std::atan2(double(p.y), double(p.x)), frame.image.cols));
    }
    return ids;
}

std::vector<std::size_t> PuAllocation::slices_of(std::size_t unit) const
{
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < unit_of_slice.size(); ++s) {
        if (unit_of_slice[s] == unit) {
            out.push_back(s);
        }
    }
    return out;
}

PuAllocation allocate(std::size_t slice_count, std::size_t unit_count)
{
    if (slice_count < 1) {
        throw InvalidArgument("slice count must be at least 1");
    }
    if (unit_count < 1 || unit_count > slice_count) {
        throw InvalidArgument("unit count " + std::to_string(unit_count) + " must be in 1.." +
                              std::to_string(slice_count));
    }
    PuAllocation a;
    a.slice_count = slice_count;
    a.unit_count = unit_count;
    a.unit_of_slice.resize(slice_count);
    const std::size_t base = slice_count / unit_count;
    const std::size_t extra = slice_count % unit_count;
    std::size_t slice = 0;
    for (std::size_t u = 0; u < unit_count; ++u) {
        const std::size_t n = base + (u < extra ? 1 : 0);
        for (std::size_t k = 0; k < n; ++k) {
            a.unit_of_slice[slice++] = u;
        }
    }
    return a;
}

SlicedRun run_sliced(const Frame& frame, const MethodConfig& method, std::size_t slice_count,
                     std::size_t unit_count)
{
    const PuAllocation alloc = allocate(slice_count, unit_count);
    const SliceSpec spec = make_slice_spec(frame.image.cols, slice_count);

    const auto start = Clock::now();
    std::vector<std::size_t> point_slice;
    if (method.id != MethodId::Depth) {
        point_slice = point_slice_ids(frame, spec);
    }

    std::vector<SliceOutput> outputs(slice_count);
    auto work = [&](std::size_t unit) {
        for (std::size_t s : alloc.slices_of(unit)) {
            SliceOutput& out = outputs[s];
            out.unit = unit;
            try {
                run_slice(frame, method, spec, point_slice, s, out);
            } catch (...) {
                out.error = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> units;
        units.reserve(unit_count - 1);
        for (std::size_t u = 1; u < unit_count; ++u) {
            units.emplace_back(work, u);
        }
        work(0);
    } // joins: completion barrier before the merge

    for (std::size_t s = 0; s < slice_count; ++s) {
        if (!outputs[s].error) {
            continue;
        }
        try {
            std::rethrow_exception(outputs[s].error);
        } catch (const std::exception& e) {
            throw SliceError(s, e.what());
        }
    }

    SlicedRun run;
    if (method.id == MethodId::Depth) {
        std::vector<PixelMask> masks;
        masks.reserve(slice_count);
        for (SliceOutput& out : outputs) {
            masks.push_back(std::move(out.pixels));
        }
        run.mask = merge_masks(masks, frame.image, spec);
    } else {
        run.mask.assign(frame.cloud.size(), 0);
        for (const SliceOutput& out : outputs) {
            for (std::size_t j = 0; j < out.ids.size(); ++j) {
                run.mask[out.ids[j]] = out.point_mask[j];
            }
        }
    }
    run.record = {to_string(method.id), slice_count, unit_count, frame.id, elapsed_ms(start), 1.0};
    for (const SliceOutput& out : outputs) {
        run.executed_by.push_back(out.unit);
    }
    return run;
}

double time_sliced(const Frame& frame, const MethodConfig& method, std::size_t slice_count, std::size_t unit_count,
                   std::size_t repetitions, std::size_t warmup)
{
    for (std::size_t i = 0; i < warmup; ++i) {
        (void)run_sliced(frame, method, slice_count, unit_count);
    }
    std::vector<double> times;
    times.reserve(std::max<std::size_t>(repetitions, 1));
    for (std::size_t i = 0; i < std::max<std::size_t>(repetitions, 1); ++i) {
        times.push_back(run_sliced(frame, method, slice_count, unit_count).record.wall_ms);
    }
    return median(std::move(times));
}

double time_baseline(const Frame& frame, const MethodConfig& method, std::size_t repetitions, std::size_t warmup)
{
    return time_sliced(frame, method, 1, 1, std::max<std::size_t>(repetitions, 11), warmup);
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records)
{
    out << "method,slices,units,frame,wall_ms,speedup\n";
    char buf[64];
    for (const BenchmarkRecord& r : records) {
        out << r.method << ',' << r.slices << ',' << r.units << ',' << r.frame << ',';
        std::snprintf(buf, sizeof(buf), "%.4f,%.4f", r.wall_ms, r.speedup);
        out << buf << '\n';
    }
}

} // namespace slicegs
