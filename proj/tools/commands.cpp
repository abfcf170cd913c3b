#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "render.hpp"
#include "slicegs/eval.hpp"
#include "slicegs/kitti_io.hpp"
#include "slicegs/parallel_exec.hpp"
#include "slicegs/ssl_frame.hpp"
#include "slicegs/synth.hpp"

namespace slicegs::cli {

namespace fs = std::filesystem;

namespace {

struct InputItem {
    std::string id;
    fs::path path;
    fs::path labels;
    bool ssl{false};
};

/// A frame plus the file record each point came from.
struct LoadedFrame {
    Frame frame;
    std::vector<std::size_t> record_of_point;
    std::size_t record_count{0};
    GroundTruthMask truth;
};

bool is_ssl_capture(const fs::path& p)
{
    const std::string ext = p.extension().string();
    return ext == ".sslraw" || ext == ".csv";
}

std::vector<InputItem> resolve_inputs(const RunConfig& config, bool need_labels)
{
    std::vector<InputItem> items;
    if (!config.ssl_input.empty()) {
        if (need_labels) {
            throw UsageError("SSL captures carry no labels; evaluation needs a dataset root");
        }
        if (!fs::exists(config.ssl_input)) {
            throw UsageError("SSL input does not exist: " + config.ssl_input.string());
        }
        std::vector<fs::path> files;
        if (fs::is_directory(config.ssl_input)) {
            for (const auto& entry : fs::directory_iterator(config.ssl_input)) {
                if (entry.is_regular_file() && is_ssl_capture(entry.path())) {
                    files.push_back(entry.path());
                }
            }
            std::sort(files.begin(), files.end());
        } else {
            files.push_back(config.ssl_input);
        }
        for (const auto& f : files) {
            items.push_back({f.stem().string(), f, {}, true});
        }
    } else if (!config.dataset_root.empty()) {
        if (!fs::is_directory(config.dataset_root)) {
            throw UsageError("dataset root does not exist: " + config.dataset_root.string());
        }
        std::vector<kitti::FramePaths> paths;
        try {
            paths = need_labels ? kitti::list_sequence(config.dataset_root, config.sequence, config.frame_range())
                                : kitti::list_scans(config.dataset_root, config.sequence, config.frame_range());
        } catch (const IoError& e) {
            throw UsageError(e.what());
        }
        for (const auto& p : paths) {
            items.push_back({p.scan.stem().string(), p.scan, p.labels, false});
        }
    } else {
        throw UsageError("no input: set --dataset or --ssl");
    }
    if (items.empty()) {
        throw UsageError("no frames selected");
    }
    return items;
}

LoadedFrame load_ssl(const std::string& id, const fs::path& path, ssl::ZigzagParity parity)
{
    const ssl::SslFrame decoded = ssl::decode_ssl_frame(ssl::read_ssl_capture(path), parity);
    const ssl::SslPointCloud pc = ssl::ssl_to_point_cloud(decoded);
    LoadedFrame lf;
    lf.frame = make_ssl_frame(id, decoded);
    lf.record_count = ssl::kRecords;
    lf.record_of_point.reserve(pc.pixel_of_point.size());
    for (std::uint32_t px : pc.pixel_of_point) {
        lf.record_of_point.push_back(decoded.index_map()[px]);
    }
    return lf;
}

LoadedFrame load_scan(const std::string& id, const fs::path& path, const RunConfig& config)
{
    kitti::LoadedScan scan = kitti::load_velodyne_bin(path);
    LoadedFrame lf;
    lf.record_count = scan.record_count;
    lf.record_of_point.reserve(scan.cloud.size());
    std::size_t d = 0;
    for (std::size_t r = 0; r < scan.record_count; ++r) {
        if (d < scan.dropped.size() && scan.dropped[d] == r) {
            ++d;
            continue;
        }
        lf.record_of_point.push_back(r);
    }
    lf.frame = make_mechanical_frame(id, std::move(scan.cloud), config.projection());
    return lf;
}

LoadedFrame load_item(const InputItem& item, const RunConfig& config, const kitti::GroundClassSet* classes)
{
    if (item.ssl) {
        return load_ssl(item.id, item.path, ssl::parse_parity(config.parity));
    }
    LoadedFrame lf = load_scan(item.id, item.path, config);
    if (classes != nullptr) {
        const GroundTruthMask labels = kitti::load_labels(item.labels, *classes);
        if (labels.size() != lf.record_count) {
            throw DimensionMismatch(item.labels.string() + ": " + std::to_string(labels.size()) + " labels for " +
                                    std::to_string(lf.record_count) + " points");
        }
        std::vector<std::size_t> dropped;
        std::size_t next = 0;
        for (std::size_t r : lf.record_of_point) {
            for (; next < r; ++next) {
                dropped.push_back(next);
            }
            next = r + 1;
        }
        for (; next < lf.record_count; ++next) {
            dropped.push_back(next);
        }
        lf.truth = kitti::drop_indices(labels, dropped);
    }
    return lf;
}

std::vector<std::uint8_t> to_records(const GroundMask& mask, const LoadedFrame& lf)
{
    std::vector<std::uint8_t> out(lf.record_count, 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        out[lf.record_of_point[i]] = mask[i] ? 1 : 0;
    }
    return out;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

std::vector<std::uint8_t> read_bytes(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename Write>
void write_text(const fs::path& path, Write&& write)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write(out);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

void prepare_out(const RunConfig& config)
{
    if (config.out.empty()) {
        throw UsageError("no output directory");
    }
    fs::create_directories(config.out);
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::size_t units_for(const RunConfig& config, std::size_t slices)
{
    return std::min(config.units, slices);
}

} // namespace

void cmd_segment(const RunConfig& config, std::ostream& log)
{
    config.validate();
    const std::vector<InputItem> items = resolve_inputs(config, false);
    const MethodConfig method = config.method_config();
    prepare_out(config);

    double total_ms = 0.0;
    for (const InputItem& item : items) {
        const LoadedFrame lf = load_item(item, config, nullptr);
        const auto t0 = std::chrono::steady_clock::now();
        const SlicedRun run = run_sliced(lf.frame, method, config.slices, config.units);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        total_ms += ms;
        write_bytes(config.out / (item.id + ".mask"), to_records(run.mask, lf));
        const auto ground = std::count(run.mask.begin(), run.mask.end(), std::uint8_t{1});
        log << item.id << ": " << ground << " ground of " << run.mask.size() << " points, " << fixed(ms, 3)
            << " ms\n";
    }

    write_text(config.out / "manifest.ini", [&](std::ostream& out) {
        write_config(out, config);
        out << "\n[" << kManifestSection << "]\n"
            << "frames = " << items.size() << '\n'
            << "total_ms = " << fixed(total_ms, 3) << '\n'
            << "mean_ms = " << fixed(total_ms / static_cast<double>(items.size()), 3) << '\n';
    });
}

void cmd_eval(const RunConfig& config, std::ostream& log)
{
    config.validate();
    if (config.eval_methods.empty() || config.eval_slices.empty()) {
        throw InvalidArgument("eval needs at least one method and one slice count");
    }
    const std::vector<InputItem> items = resolve_inputs(config, true);
    const kitti::GroundClassSet classes = kitti::ground_classes_by_name(config.ground_classes);
    std::vector<MethodConfig> methods;
    for (const auto& name : config.eval_methods) {
        methods.push_back(config.method_config(name));
    }
    prepare_out(config);

    const std::size_t groups = methods.size() * config.eval_slices.size();
    std::vector<std::vector<eval::FrameScore>> buckets(groups);
    for (const InputItem& item : items) {
        const LoadedFrame lf = load_item(item, config, &classes);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            for (std::size_t s = 0; s < config.eval_slices.size(); ++s) {
                const std::size_t k = config.eval_slices[s];
                const SlicedRun run = run_sliced(lf.frame, methods[m], k, units_for(config, k));
                eval::FrameScore score;
                score.method = to_string(methods[m].id);
                score.slices = k;
                score.frame = item.id;
                score.stats = eval::confusion(run.mask, lf.truth);
                score.iou = eval::iou(score.stats);
                score.f1 = eval::f1(score.stats);
                buckets[m * config.eval_slices.size() + s].push_back(std::move(score));
            }
        }
        log << "evaluated " << item.id << '\n';
    }

    std::vector<eval::FrameScore> scores;
    for (auto& b : buckets) {
        scores.insert(scores.end(), b.begin(), b.end());
    }
    const std::vector<eval::SummaryRow> summary = eval::summarize(scores);
    write_text(config.out / "eval_frames.csv", [&](std::ostream& out) { eval::write_frame_csv(out, scores); });
    write_text(config.out / "eval_summary.csv", [&](std::ostream& out) { eval::write_summary_csv(out, summary); });
    eval::write_summary_csv(log, summary);
    for (const auto& row : summary) {
        if (row.empty_ground_frames > 0) {
            log << row.method << " K=" << row.slices << ": " << row.empty_ground_frames
                << " frame(s) without ground in prediction or truth scored 1.0\n";
        }
    }
}

void cmd_bench(const RunConfig& config, std::ostream& log)
{
    config.validate();
    for (std::size_t p : config.bench_units) {
        if (p > config.slices) {
            throw InvalidArgument("bench unit count " + std::to_string(p) + " exceeds slices (" +
                                  std::to_string(config.slices) + ")");
        }
    }
    const std::vector<InputItem> items = resolve_inputs(config, false);
    const MethodConfig method = config.method_config();
    prepare_out(config);

    std::vector<BenchmarkRecord> records;
    for (const InputItem& item : items) {
        const LoadedFrame lf = load_item(item, config, nullptr);
        const double baseline = time_baseline(lf.frame, method, config.bench_repetitions, config.bench_warmup);
        for (std::size_t p : config.bench_units) {
            BenchmarkRecord rec;
            rec.method = to_string(method.id);
            rec.slices = config.slices;
            rec.units = p;
            rec.frame = item.id;
            rec.wall_ms = time_sliced(lf.frame, method, config.slices, p, config.bench_repetitions,
                                      config.bench_warmup);
            rec.speedup = rec.wall_ms > 0.0 ? baseline / rec.wall_ms : 0.0;
            records.push_back(rec);
        }
        log << item.id << ": baseline " << fixed(baseline, 3) << " ms\n";
    }
    write_text(config.out / "bench.csv", [&](std::ostream& out) { write_benchmark_csv(out, records); });
    write_benchmark_csv(log, records);
}

void cmd_render(const RunConfig& config, const RenderInputs& inputs, std::ostream& log)
{
    config.validate();
    const int sources = (config.ssl_input.empty() ? 0 : 1) + (inputs.scan.empty() ? 0 : 1) +
                        (inputs.frame_dump.empty() ? 0 : 1);
    if (sources != 1) {
        throw UsageError("render needs exactly one of --ssl, --scan, --frame-dump");
    }
    if (!inputs.mask.empty() && inputs.segment) {
        throw UsageError("--mask and --segment are exclusive");
    }
    for (const fs::path& p : {config.ssl_input, inputs.scan, inputs.frame_dump, inputs.mask}) {
        if (!p.empty() && !fs::is_regular_file(p)) {
            throw UsageError("no such file: " + p.string());
        }
    }

    LoadedFrame lf;
    std::string stem;
    if (!config.ssl_input.empty()) {
        stem = config.ssl_input.stem().string();
        lf = load_ssl(stem, config.ssl_input, ssl::parse_parity(config.parity));
    } else if (!inputs.scan.empty()) {
        stem = inputs.scan.stem().string();
        lf = load_scan(stem, inputs.scan, config);
    } else {
        stem = inputs.frame_dump.stem().string();
        const ssl::OrganizedGrid grid = ssl::read_organized_frame(inputs.frame_dump);
        lf.frame.id = stem;
        lf.frame.image = image_from_grid(grid);
        lf.frame.organized = true;
        lf.record_count = grid.cells.size();
        for (std::size_t i = 0; i < grid.cells.size(); ++i) {
            const ssl::SslRecord& c = grid.cells[i];
            if (c.valid) {
                lf.frame.cloud.points.push_back({c.x, c.y, c.z, 0.0f});
                lf.record_of_point.push_back(i);
            }
        }
    }

    const RangeImage& image = lf.frame.image;
    std::vector<std::uint8_t> overlay;
    if (!inputs.mask.empty() || inputs.segment) {
        GroundMask point_mask;
        if (inputs.segment) {
            point_mask = run_sliced(lf.frame, config.method_config(), config.slices, config.units).mask;
        } else {
            const std::vector<std::uint8_t> records = read_bytes(inputs.mask);
            if (records.size() != lf.record_count) {
                throw DimensionMismatch("mask has " + std::to_string(records.size()) + " entries, input has " +
                                        std::to_string(lf.record_count) + " records");
            }
            point_mask.resize(lf.record_of_point.size());
            for (std::size_t i = 0; i < point_mask.size(); ++i) {
                point_mask[i] = records[lf.record_of_point[i]];
            }
        }
        overlay.assign(image.rows * image.cols, 0);
        for (std::size_t px = 0; px < overlay.size(); ++px) {
            const std::int32_t idx = image.point_index[px];
            if (idx != RangeImage::kEmpty) {
                overlay[px] = point_mask[static_cast<std::size_t>(idx)] ? 1 : 0;
            }
        }
    }

    const RgbImage rgb = render_range_image(image, overlay);
    prepare_out(config);
    const fs::path target = config.out / (stem + ".ppm");
    write_ppm(target, rgb);
    log << "wrote " << target.string() << " (" << rgb.width << "x" << rgb.height << ")\n";
}

void cmd_decode_ssl(const RunConfig& config, std::ostream& log)
{
    config.validate();
    if (config.ssl_input.empty()) {
        throw UsageError("decode-ssl needs --ssl <capture>");
    }
    if (!fs::is_regular_file(config.ssl_input)) {
        throw UsageError("no such file: " + config.ssl_input.string());
    }
    const ssl::SslFrame frame =
        ssl::decode_ssl_frame(ssl::read_ssl_capture(config.ssl_input), ssl::parse_parity(config.parity));
    prepare_out(config);
    const fs::path target = config.out / (config.ssl_input.stem().string() + ".grid");
    ssl::write_organized_frame(target, frame);

    log << "frame " << frame.rows() << "x" << frame.cols() << ", " << frame.subframe_count() << " subframes of "
        << frame.rows() << "x" << frame.subframe_width() << ", " << frame.valid_count() << " valid of "
        << ssl::kRecords << '\n';
    const auto stats = ssl::subframe_stats(frame);
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const ssl::SubframeStats& s = stats[i];
        log << "subframe " << i << ": records " << s.records << " valid " << s.valid;
        if (s.valid > 0) {
            log << " x [" << fixed(s.x.min, 3) << ", " << fixed(s.x.max, 3) << "]"
                << " y [" << fixed(s.y.min, 3) << ", " << fixed(s.y.max, 3) << "]"
                << " z [" << fixed(s.z.min, 3) << ", " << fixed(s.z.max, 3) << "]";
        }
        log << '\n';
    }
    log << "wrote " << target.string() << '\n';
}

void cmd_synth(const RunConfig& config, const SynthOptions& options, std::ostream& log)
{
    prepare_out(config);
    synth::StreetSequence seq;
    seq.seed = options.scene_seed;
    if (options.kitti_frames > 0) {
        synth::write_kitti_sequence(config.out, config.sequence, seq, options.kitti_frames);
        log << "wrote " << options.kitti_frames << " frames to "
            << (config.out / "sequences" / kitti::sequence_dir_name(config.sequence)).string() << '\n';
    }
    if (options.ssl_frames > 0) {
        const fs::path dir = config.out / "ssl";
        fs::create_directories(dir);
        for (std::size_t f = 0; f < options.ssl_frames; ++f) {
            char name[32];
            std::snprintf(name, sizeof(name), "%06zu.sslraw", f);
            ssl::write_sslraw(dir / name, synth::street_ssl_capture(options.scene_seed, f));
        }
        log << "wrote " << options.ssl_frames << " SSL captures to " << dir.string() << '\n';
    }
}

namespace {

/// Flags shared by every subcommand; unset ones leave the config untouched.
struct SharedFlags {
    std::optional<std::string> config;
    std::optional<std::string> method;
    std::optional<std::size_t> slices;
    std::optional<std::size_t> units;
    std::optional<std::string> frames;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> dataset;
    std::optional<std::string> sequence;
    std::optional<std::string> ssl;
    std::optional<std::string> parity;
    std::optional<std::string> ground_classes;

    void attach(CLI::App& cmd)
    {
        cmd.add_option("--config", config, "config file (sections as in default.ini)");
        cmd.add_option("--method", method, "depth | ransac | smrf");
        cmd.add_option("--slices", slices, "slice count K");
        cmd.add_option("--units", units, "processing units P (<= K)");
        cmd.add_option("--frames", frames, "frame range a..b");
        cmd.add_option("--out", out, "output directory");
        cmd.add_option("--seed", seed, "RANSAC seed");
        cmd.add_option("--dataset", dataset, "dataset root containing sequences/");
        cmd.add_option("--sequence", sequence, "sequence id");
        cmd.add_option("--ssl", ssl, "SSL capture (.sslraw or .csv) or a directory of them");
        cmd.add_option("--parity", parity, "reversed rows: even | odd");
        cmd.add_option("--ground-classes", ground_classes, "default | extended");
    }

    [[nodiscard]] RunConfig build() const
    {
        RunConfig c = config ? load_config(*config) : RunConfig{};
        if (method) c.method = *method;
        if (slices) c.slices = *slices;
        if (units) c.units = *units;
        if (frames) c.frames = *frames;
        if (out) c.out = *out;
        if (seed) c.seed = *seed;
        if (dataset) c.dataset_root = *dataset;
        if (sequence) c.sequence = *sequence;
        if (ssl) c.ssl_input = *ssl;
        if (parity) c.parity = *parity;
        if (ground_classes) c.ground_classes = *ground_classes;
        return c;
    }
};

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"LiDAR ground segmentation on column slices"};
    app.name("slicegs");
    app.require_subcommand(1);

    SharedFlags flags;

    auto* segment = app.add_subcommand("segment", "write per-frame ground masks and a run manifest");
    flags.attach(*segment);

    auto* evaluate = app.add_subcommand("eval", "IoU/F1 per method and slice count against labels");
    flags.attach(*evaluate);
    std::optional<std::string> eval_methods;
    std::optional<std::string> eval_slices;
    evaluate->add_option("--methods", eval_methods, "comma-separated methods");
    evaluate->add_option("--slice-counts", eval_slices, "comma-separated slice counts");

    auto* bench = app.add_subcommand("bench", "wall time and speedup per unit count");
    flags.attach(*bench);
    std::optional<std::string> bench_units;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> warmup;
    bench->add_option("--unit-counts", bench_units, "comma-separated unit counts");
    bench->add_option("--reps", reps, "timed repetitions (median)");
    bench->add_option("--warmup", warmup, "untimed warmup runs");

    auto* render = app.add_subcommand("render", "range image as a PPM, ground in red");
    flags.attach(*render);
    RenderInputs render_inputs;
    render->add_option("--scan", render_inputs.scan, "velodyne .bin scan");
    render->add_option("--frame-dump", render_inputs.frame_dump, "organized grid written by decode-ssl");
    render->add_option("--mask", render_inputs.mask, "mask file written by segment");
    render->add_flag("--segment", render_inputs.segment, "overlay the configured method's result");

    auto* decode = app.add_subcommand("decode-ssl", "reorganize an SSL capture into its 126x625 grid");
    flags.attach(*decode);

    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic labelled drive and SSL captures");
    flags.attach(*synth_cmd);
    SynthOptions synth_options;
    synth_cmd->add_option("--kitti-frames", synth_options.kitti_frames, "mechanical frames");
    synth_cmd->add_option("--ssl-frames", synth_options.ssl_frames, "SSL captures");
    synth_cmd->add_option("--scene-seed", synth_options.scene_seed, "scene layout seed");

    auto* show = app.add_subcommand("show-config", "print the effective configuration");
    flags.attach(*show);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunConfig config = flags.build();
        if (eval_methods) config.eval_methods = parse_string_list(*eval_methods);
        if (eval_slices) config.eval_slices = parse_size_list(*eval_slices);
        if (bench_units) config.bench_units = parse_size_list(*bench_units);
        if (reps) config.bench_repetitions = *reps;
        if (warmup) config.bench_warmup = *warmup;

        if (segment->parsed()) {
            cmd_segment(config, out);
        } else if (evaluate->parsed()) {
            cmd_eval(config, out);
        } else if (bench->parsed()) {
            cmd_bench(config, out);
        } else if (render->parsed()) {
            cmd_render(config, render_inputs, out);
        } else if (decode->parsed()) {
            cmd_decode_ssl(config, out);
        } else if (show->parsed()) {
            config.validate();
            write_config(out, config);
        } else {
            cmd_synth(config, synth_options, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace slicegs::cli
