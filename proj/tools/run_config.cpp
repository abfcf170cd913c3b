#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace slicegs::cli {

namespace pt = boost::property_tree;

namespace {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw InvalidArgument("config key '" + key + "': '" + text + "' is not a number");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text)
{
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw InvalidArgument("config key '" + key + "': '" + text + "' is not a non-negative integer");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "1") {
        return true;
    }
    if (text == "false" || text == "0") {
        return false;
    }
    throw InvalidArgument("config key '" + key + "': '" + text + "' is not a boolean");
}

template <typename T>
std::string join(const std::vector<T>& items)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < items.size(); ++i) {
        os << (i ? "," : "") << items[i];
    }
    return os.str();
}

struct Field {
    const char* section;
    const char* key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

#define SIZE_FIELD(sec, name, member)                                                                                \
    Field{sec, name, [](const RunConfig& c) { return std::to_string(c.member); },                                    \
          [](RunConfig& c, const std::string& v) { c.member = parse_unsigned(sec "." name, v); }}
#define DOUBLE_FIELD(sec, name, member)                                                                              \
    Field{sec, name, [](const RunConfig& c) { return format_double(c.member); },                                     \
          [](RunConfig& c, const std::string& v) { c.member = parse_double(sec "." name, v); }}
#define STRING_FIELD(sec, name, member)                                                                              \
    Field{sec, name, [](const RunConfig& c) { return std::string(c.member); },                                       \
          [](RunConfig& c, const std::string& v) { c.member = v; }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        STRING_FIELD("run", "method", method),
        SIZE_FIELD("run", "slices", slices),
        SIZE_FIELD("run", "units", units),
        SIZE_FIELD("run", "seed", seed),
        STRING_FIELD("run", "frames", frames),
        Field{"run", "out", [](const RunConfig& c) { return c.out.string(); },
              [](RunConfig& c, const std::string& v) { c.out = v; }},

        Field{"dataset", "root", [](const RunConfig& c) { return c.dataset_root.string(); },
              [](RunConfig& c, const std::string& v) { c.dataset_root = v; }},
        STRING_FIELD("dataset", "sequence", sequence),
        STRING_FIELD("dataset", "ground_classes", ground_classes),

        Field{"ssl", "input", [](const RunConfig& c) { return c.ssl_input.string(); },
              [](RunConfig& c, const std::string& v) { c.ssl_input = v; }},
        STRING_FIELD("ssl", "parity", parity),

        SIZE_FIELD("projection", "rows", projection_rows),
        SIZE_FIELD("projection", "cols", projection_cols),
        DOUBLE_FIELD("projection", "fov_up_deg", fov_up_deg),
        DOUBLE_FIELD("projection", "fov_down_deg", fov_down_deg),

        DOUBLE_FIELD("depth", "seed_threshold_deg", seed_threshold_deg),
        DOUBLE_FIELD("depth", "propagation_threshold_deg", propagation_threshold_deg),
        Field{"depth", "smoothing", [](const RunConfig& c) { return std::string(c.smoothing ? "true" : "false"); },
              [](RunConfig& c, const std::string& v) { c.smoothing = parse_bool("depth.smoothing", v); }},
        SIZE_FIELD("depth", "smoothing_window", smoothing_window),
        SIZE_FIELD("depth", "smoothing_order", smoothing_order),
        DOUBLE_FIELD("depth", "virtual_ground_z", virtual_ground_z),

        SIZE_FIELD("ransac", "iterations", ransac_iterations),
        DOUBLE_FIELD("ransac", "dist_threshold", ransac_dist_threshold),
        DOUBLE_FIELD("ransac", "max_normal_tilt_deg", ransac_max_tilt_deg),

        DOUBLE_FIELD("smrf", "cell_size", smrf_cell_size),
        SIZE_FIELD("smrf", "max_window_radius", smrf_max_window_radius),
        DOUBLE_FIELD("smrf", "slope", smrf_slope),
        DOUBLE_FIELD("smrf", "elevation_threshold", smrf_elevation_threshold),
        DOUBLE_FIELD("smrf", "elevation_scale", smrf_elevation_scale),

        Field{"eval", "methods", [](const RunConfig& c) { return join(c.eval_methods); },
              [](RunConfig& c, const std::string& v) { c.eval_methods = parse_string_list(v); }},
        Field{"eval", "slices", [](const RunConfig& c) { return join(c.eval_slices); },
              [](RunConfig& c, const std::string& v) { c.eval_slices = parse_size_list(v); }},

        Field{"bench", "units", [](const RunConfig& c) { return join(c.bench_units); },
              [](RunConfig& c, const std::string& v) { c.bench_units = parse_size_list(v); }},
        SIZE_FIELD("bench", "repetitions", bench_repetitions),
        SIZE_FIELD("bench", "warmup", bench_warmup),
    };
    return table;
}

#undef SIZE_FIELD
#undef DOUBLE_FIELD
#undef STRING_FIELD

} // namespace

std::vector<std::size_t> parse_size_list(const std::string& text)
{
    std::vector<std::size_t> out;
    for (const std::string& item : parse_string_list(text)) {
        out.push_back(parse_unsigned("list", item));
    }
    return out;
}

std::vector<std::string> parse_string_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) {
            out.push_back(item.substr(b, e - b + 1));
        }
    }
    return out;
}

ProjectionConfig RunConfig::projection() const
{
    return {projection_rows, projection_cols, deg2rad(fov_up_deg), deg2rad(fov_down_deg)};
}

MethodConfig RunConfig::method_config() const
{
    return method_config(method);
}

MethodConfig RunConfig::method_config(const std::string& name) const
{
    MethodConfig m;
    m.id = parse_method(name);
    m.depth.seed_threshold = deg2rad(seed_threshold_deg);
    m.depth.propagation_threshold = deg2rad(propagation_threshold_deg);
    m.depth.smoothing = smoothing;
    m.depth.smoothing_window = smoothing_window;
    m.depth.smoothing_order = smoothing_order;
    m.depth.virtual_ground_z = virtual_ground_z;
    m.ransac.iterations = ransac_iterations;
    m.ransac.dist_threshold = ransac_dist_threshold;
    m.ransac.max_normal_tilt = deg2rad(ransac_max_tilt_deg);
    m.ransac.seed = seed;
    m.smrf.cell_size = smrf_cell_size;
    m.smrf.max_window_radius = smrf_max_window_radius;
    m.smrf.slope = smrf_slope;
    m.smrf.elevation_threshold = smrf_elevation_threshold;
    m.smrf.elevation_scale = smrf_elevation_scale;
    return m;
}

std::optional<kitti::FrameRange> RunConfig::frame_range() const
{
    if (frames.empty()) {
        return std::nullopt;
    }
    return kitti::FrameRange::parse(frames);
}

void RunConfig::validate() const
{
    (void)parse_method(method);
    for (const auto& m : eval_methods) {
        (void)parse_method(m);
    }
    (void)kitti::ground_classes_by_name(ground_classes);
    (void)ssl::parse_parity(parity);
    (void)frame_range();
    if (slices < 1 || slices > projection_cols) {
        throw InvalidArgument("slices must be in 1.." + std::to_string(projection_cols));
    }
    if (units < 1 || units > slices) {
        throw InvalidArgument("units must be in 1..slices (" + std::to_string(slices) + ")");
    }
    for (std::size_t k : eval_slices) {
        if (k < 1) {
            throw InvalidArgument("eval slice counts must be positive");
        }
    }
    for (std::size_t p : bench_units) {
        if (p < 1) {
            throw InvalidArgument("bench unit counts must be positive");
        }
    }
    if (projection_rows < 1 || projection_cols < 1 || !(fov_up_deg > fov_down_deg)) {
        throw InvalidArgument("projection needs rows, cols >= 1 and fov_up_deg > fov_down_deg");
    }
    if (!(seed_threshold_deg > 0.0) || !(propagation_threshold_deg > 0.0)) {
        throw InvalidArgument("depth thresholds must be positive");
    }
    if (smoothing_window < 3 || smoothing_window % 2 == 0 || smoothing_order < 1 ||
        smoothing_order >= smoothing_window) {
        throw InvalidArgument("depth smoothing needs an odd window >= 3 and 1 <= order < window");
    }
    if (ransac_iterations < 1 || !(ransac_dist_threshold > 0.0) || !(ransac_max_tilt_deg >= 0.0)) {
        throw InvalidArgument("ransac needs iterations >= 1, dist_threshold > 0 and max_normal_tilt_deg >= 0");
    }
    if (!(smrf_cell_size > 0.0) || smrf_max_window_radius < 1 || !(smrf_slope >= 0.0) ||
        !(smrf_elevation_threshold >= 0.0) || !(smrf_elevation_scale >= 0.0)) {
        throw InvalidArgument("smrf parameters out of range");
    }
    if (bench_repetitions < 1) {
        throw InvalidArgument("bench repetitions must be at least 1");
    }
}

void apply_config(std::istream& in, RunConfig& config)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InvalidArgument(std::string("config parse error: ") + e.what());
    }
    for (const auto& [section, entries] : tree) {
        if (entries.empty() && !entries.data().empty()) {
            throw InvalidArgument("config key '" + section + "' must live in a [section]");
        }
        if (section == kManifestSection) {
            continue;
        }
        for (const auto& [key, value] : entries) {
            const auto& table = fields();
            auto it = std::find_if(table.begin(), table.end(),
                                   [&](const Field& f) { return section == f.section && key == f.key; });
            if (it == table.end()) {
                throw InvalidArgument("unknown config key '" + section + "." + key + "'");
            }
            it->set(config, value.get_value<std::string>());
        }
    }
}

RunConfig parse_config(std::istream& in)
{
    RunConfig config;
    apply_config(in, config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open config file: " + path.string());
    }
    return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& config)
{
    std::string section;
    for (const Field& f : fields()) {
        if (section != f.section) {
            out << (section.empty() ? "" : "\n") << '[' << f.section << "]\n";
            section = f.section;
        }
        const std::string value = f.get(config);
        out << f.key << (value.empty() ? " =" : " = ") << value << '\n';
    }
}

} // namespace slicegs::cli
