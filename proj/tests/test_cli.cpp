#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "render.hpp"
#include "run_config.hpp"
#include "slicegs/ssl_frame.hpp"
#include "slicegs/synth.hpp"
#include "test_support.hpp"

using namespace slicegs;
using namespace slicegs::cli;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args)
{
    args.insert(args.begin(), "slicegs");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Three labelled frames and two SSL captures, written once.
const fs::path& data_root()
{
    static testing_support::TempDir dir;
    static const bool made = [] {
        const CliResult r = run({"synth", "--out", dir.path().string(), "--kitti-frames", "3", "--ssl-frames", "2"});
        return r.code == 0;
    }();
    EXPECT_TRUE(made);
    return dir.path();
}

std::string slurp(const fs::path& p)
{
    const auto bytes = testing_support::read_file(p);
    return {bytes.begin(), bytes.end()};
}

struct Ppm {
    std::size_t width{0};
    std::size_t height{0};
    std::string pixels;
};

Ppm read_ppm(const fs::path& p)
{
    std::istringstream in(slurp(p));
    std::string magic;
    Ppm ppm;
    int maxval = 0;
    in >> magic >> ppm.width >> ppm.height >> maxval;
    in.get();
    ppm.pixels.assign(std::istreambuf_iterator<char>(in), {});
    EXPECT_EQ(magic, "P6");
    EXPECT_EQ(maxval, 255);
    EXPECT_EQ(ppm.pixels.size(), ppm.width * ppm.height * 3);
    return ppm;
}

} // namespace

TEST(Config, ParsesSections)
{
    std::istringstream in("[run]\nmethod = ransac\nslices = 5\nunits = 3\n\n[ransac]\niterations = 50\n"
                          "dist_threshold = 0.1\n[eval]\nslices = 1,3\n[depth]\nsmoothing = false\n");
    const RunConfig c = parse_config(in);
    EXPECT_EQ(c.method, "ransac");
    EXPECT_EQ(c.slices, 5u);
    EXPECT_EQ(c.units, 3u);
    EXPECT_EQ(c.ransac_iterations, 50u);
    EXPECT_DOUBLE_EQ(c.ransac_dist_threshold, 0.1);
    EXPECT_EQ(c.eval_slices, (std::vector<std::size_t>{1, 3}));
    EXPECT_FALSE(c.smoothing);
    const MethodConfig m = c.method_config();
    EXPECT_EQ(m.id, MethodId::Ransac);
    EXPECT_EQ(m.ransac.iterations, 50u);
}

TEST(Config, RejectsUnknownKeysAndValues)
{
    std::istringstream unknown("[run]\nmethd = depth\n");
    EXPECT_THROW((void)parse_config(unknown), InvalidArgument);
    std::istringstream section("[nope]\nx = 1\n");
    EXPECT_THROW((void)parse_config(section), InvalidArgument);
    std::istringstream number("[run]\nslices = five\n");
    EXPECT_THROW((void)parse_config(number), InvalidArgument);

    RunConfig c;
    c.slices = 2;
    c.units = 3;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c.units = 2;
    c.method = "pointnet";
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Config, WriteParseRoundTrip)
{
    RunConfig c;
    c.method = "smrf";
    c.slices = 4;
    c.frames = "2..9";
    c.smrf_cell_size = 0.75;
    c.bench_units = {1, 4};
    std::stringstream s;
    write_config(s, c);
    EXPECT_EQ(parse_config(s), c);
}

TEST(Config, ShippedDefaultsMatchBuiltIn)
{
    EXPECT_EQ(load_config(SLICEGS_DEFAULT_INI), RunConfig{});
    const CliResult r = run({"show-config"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, slurp(SLICEGS_DEFAULT_INI));
}

TEST(Config, ManifestIsReusableAsConfig)
{
    testing_support::TempDir out;
    const fs::path first = out.path() / "a";
    ASSERT_EQ(run({"segment", "--ssl", (data_root() / "ssl").string(), "--method", "ransac", "--slices", "3", "--out",
                   first.string()})
                  .code,
              0);
    const RunConfig echoed = load_config(first / "manifest.ini");
    EXPECT_EQ(echoed.method, "ransac");
    EXPECT_EQ(echoed.slices, 3u);
    const fs::path second = out.path() / "b";
    ASSERT_EQ(run({"segment", "--config", (first / "manifest.ini").string(), "--out", second.string()}).code, 0);
    EXPECT_EQ(testing_support::read_file(first / "000000.mask"), testing_support::read_file(second / "000000.mask"));
    EXPECT_EQ(testing_support::read_file(first / "000001.mask"), testing_support::read_file(second / "000001.mask"));
}

TEST(Segment, SslMaskHasOneBytePerRecord)
{
    testing_support::TempDir out;
    const fs::path capture = data_root() / "ssl" / "000000.sslraw";
    const CliResult r =
        run({"segment", "--ssl", capture.string(), "--slices", "5", "--units", "5", "--out", out.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto mask = testing_support::read_file(out.path() / "000000.mask");
    EXPECT_EQ(mask.size(), ssl::kRecords);
    std::size_t ground = 0;
    for (auto b : mask) {
        ASSERT_LE(b, 1);
        ground += b;
    }
    EXPECT_GT(ground, 0u);
    EXPECT_TRUE(fs::exists(out.path() / "manifest.ini"));
}

TEST(Segment, FlatGroundSameForAnySliceCount)
{
    synth::MechanicalLidar noiseless;
    noiseless.range_noise = 0.0;
    testing_support::TempDir dir;
    const auto scan = synth::scan_mechanical(synth::Scene::flat(0.0), {0.0, 0.0, 1.73}, noiseless, 3);
    const fs::path bin = dir.path() / "sequences" / "00" / "velodyne" / "000000.bin";
    fs::create_directories(bin.parent_path());
    kitti::save_velodyne_bin(bin, scan.cloud);
    const fs::path a = dir.path() / "k1";
    const fs::path b = dir.path() / "k5";
    ASSERT_EQ(run({"segment", "--dataset", dir.path().string(), "--slices", "1", "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"segment", "--dataset", dir.path().string(), "--slices", "5", "--units", "2", "--out", b.string()})
                  .code,
              0);
    const auto ma = testing_support::read_file(a / "000000.mask");
    EXPECT_EQ(ma.size(), scan.cloud.size());
    EXPECT_EQ(ma, testing_support::read_file(b / "000000.mask"));
}

TEST(Segment, UsageErrorsLeaveNoOutput)
{
    testing_support::TempDir out;
    const fs::path target = out.path() / "run";
    EXPECT_EQ(run({"segment", "--dataset", (out.path() / "missing").string(), "--out", target.string()}).code,
              kExitUsage);
    EXPECT_FALSE(fs::exists(target));
    EXPECT_EQ(run({"segment", "--out", target.string()}).code, kExitUsage);
    EXPECT_EQ(run({"segment", "--ssl", data_root().string() + "/ssl", "--slices", "2", "--units", "3", "--out",
                   target.string()})
                  .code,
              kExitUsage);
    EXPECT_FALSE(fs::exists(target));
    EXPECT_EQ(run({"segment", "--bogus"}).code, kExitUsage);
    EXPECT_EQ(run({}).code, kExitUsage);
}

TEST(Eval, FifteenRowsAndReproducible)
{
    testing_support::TempDir out;
    const fs::path a = out.path() / "a";
    const fs::path b = out.path() / "b";
    for (const fs::path& p : {a, b}) {
        const CliResult r = run({"eval", "--dataset", data_root().string(), "--frames", "0..1", "--out", p.string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    const std::string summary = slurp(a / "eval_summary.csv");
    EXPECT_EQ(summary, slurp(b / "eval_summary.csv"));
    EXPECT_EQ(slurp(a / "eval_frames.csv"), slurp(b / "eval_frames.csv"));
    std::istringstream lines(summary);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "method,slices,mean_iou,std_iou,mean_f1,std_f1");
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 15u);
    // 2 frames x 15 groups
    std::istringstream frames(slurp(a / "eval_frames.csv"));
    rows = 0;
    while (std::getline(frames, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 31u);
}

TEST(Eval, SslInputRejected)
{
    testing_support::TempDir out;
    EXPECT_EQ(run({"eval", "--ssl", (data_root() / "ssl").string(), "--out", out.path().string()}).code, kExitUsage);
}

TEST(Bench, OneRowPerUnitCount)
{
    testing_support::TempDir out;
    const CliResult r = run({"bench", "--ssl", (data_root() / "ssl" / "000000.sslraw").string(), "--slices", "5",
                             "--unit-counts", "1,2,5", "--reps", "3", "--warmup", "0", "--out",
                             out.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(slurp(out.path() / "bench.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "method,slices,units,frame,wall_ms,speedup");
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        rows.push_back(line);
    }
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].rfind("depth,5,1,000000,", 0), 0u);
    EXPECT_EQ(rows[2].rfind("depth,5,5,000000,", 0), 0u);
    EXPECT_EQ(run({"bench", "--ssl", (data_root() / "ssl").string(), "--slices", "2", "--unit-counts", "3", "--out",
                   out.path().string()})
                  .code,
              kExitUsage);
}

TEST(Render, SslAndScanDimensions)
{
    testing_support::TempDir out;
    ASSERT_EQ(run({"render", "--ssl", (data_root() / "ssl" / "000001.sslraw").string(), "--segment", "--out",
                   out.path().string()})
                  .code,
              0);
    const Ppm ssl_img = read_ppm(out.path() / "000001.ppm");
    EXPECT_EQ(ssl_img.width, 625u);
    EXPECT_EQ(ssl_img.height, 126u);
    bool red = false;
    for (std::size_t i = 0; i < ssl_img.pixels.size(); i += 3) {
        red = red || (static_cast<unsigned char>(ssl_img.pixels[i]) == 255 && ssl_img.pixels[i + 1] == 0 &&
                      ssl_img.pixels[i + 2] == 0);
    }
    EXPECT_TRUE(red);

    const fs::path scan = data_root() / "sequences" / "00" / "velodyne" / "000002.bin";
    ASSERT_EQ(run({"render", "--scan", scan.string(), "--out", out.path().string()}).code, 0);
    const Ppm scan_img = read_ppm(out.path() / "000002.ppm");
    EXPECT_EQ(scan_img.width, 1024u);
    EXPECT_EQ(scan_img.height, 64u);
}

TEST(Render, EmptyImageIsBlack)
{
    RangeImage empty = project_spherical({}, ProjectionConfig{});
    const RgbImage img = render_range_image(empty, {});
    EXPECT_EQ(img.width, 1024u);
    EXPECT_EQ(img.height, 64u);
    EXPECT_EQ(std::count(img.rgb.begin(), img.rgb.end(), 0), static_cast<long>(img.rgb.size()));
    EXPECT_THROW((void)render_range_image(empty, std::vector<std::uint8_t>(3, 0)), DimensionMismatch);
}

TEST(Render, MaskLengthMustMatch)
{
    testing_support::TempDir out;
    const fs::path mask = out.path() / "bad.mask";
    testing_support::write_file(mask, std::vector<std::uint8_t>(100, 1));
    const fs::path target = out.path() / "img";
    EXPECT_EQ(run({"render", "--ssl", (data_root() / "ssl" / "000000.sslraw").string(), "--mask", mask.string(),
                   "--out", target.string()})
                  .code,
              kExitRuntime);
    EXPECT_FALSE(fs::exists(target / "000000.ppm"));
}

TEST(DecodeSsl, WritesGridAndStats)
{
    testing_support::TempDir out;
    const CliResult r =
        run({"decode-ssl", "--ssl", (data_root() / "ssl" / "000000.sslraw").string(), "--out", out.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("subframe 4: records 15750"), std::string::npos) << r.out;
    const ssl::OrganizedGrid grid = ssl::read_organized_frame(out.path() / "000000.grid");
    EXPECT_EQ(grid.rows, 126u);
    EXPECT_EQ(grid.cols, 625u);

    const fs::path grid_render = out.path() / "r";
    ASSERT_EQ(run({"render", "--frame-dump", (out.path() / "000000.grid").string(), "--out", grid_render.string()})
                  .code,
              0);
    EXPECT_EQ(read_ppm(grid_render / "000000.ppm").width, 625u);
}

TEST(DecodeSsl, TruncatedCaptureFails)
{
    testing_support::TempDir out;
    const fs::path cut = out.path() / "cut.sslraw";
    auto bytes = testing_support::read_file(data_root() / "ssl" / "000000.sslraw");
    bytes.resize(bytes.size() - 12);
    testing_support::write_file(cut, bytes);
    const fs::path target = out.path() / "o";
    EXPECT_EQ(run({"decode-ssl", "--ssl", cut.string(), "--out", target.string()}).code, kExitRuntime);
    EXPECT_FALSE(fs::exists(target / "cut.grid"));
}
