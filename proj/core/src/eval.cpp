#include "slicegs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <cstdio>
#include <numeric>

namespace slicegs::eval {

namespace {

std::string percent(double ratio)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", ratio * 100.0);
    return buf;
}

} // namespace

EvalStats confusion(const GroundMask& pred, const GroundTruthMask& truth)
{
    if (pred.size() != truth.size()) {
        throw DimensionMismatch("prediction has " + std::to_string(pred.size()) + " points, ground truth has " +
                                std::to_string(truth.size()));
    }
    EvalStats s;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) {
            ++s.tp;
        } else if (p) {
            ++s.fp;
        } else if (t) {
            ++s.fn;
        } else {
            ++s.tn;
        }
    }
    return s;
}

double iou(const EvalStats& stats) noexcept
{
    if (stats.empty_ground()) {
        return 1.0;
    }
    return static_cast<double>(stats.tp) / static_cast<double>(stats.tp + stats.fp + stats.fn);
}

double f1(const EvalStats& stats) noexcept
{
    if (stats.empty_ground()) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(stats.tp) / static_cast<double>(2 * stats.tp + stats.fp + stats.fn);
}

AggregateStats aggregate(const std::vector<double>& values)
{
    if (values.empty()) {
        throw InvalidArgument("cannot aggregate an empty list");
    }
    AggregateStats a;
    a.values = values;
    const double n = static_cast<double>(values.size());
    a.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - a.mean) * (v - a.mean);
        }
        a.std_dev = std::sqrt(ss / (n - 1.0));
    }
    return a;
}

std::vector<SummaryRow> summarize(const std::vector<FrameScore>& scores)
{
    struct Group {
        std::string method;
        std::size_t slices;
        std::vector<double> iou;
        std::vector<double> f1;
        std::size_t empty{0};
    };
    std::vector<Group> groups;
    for (const FrameScore& s : scores) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const Group& g) { return g.method == s.method && g.slices == s.slices; });
        if (it == groups.end()) {
            groups.push_back({s.method, s.slices, {}, {}, 0});
            it = std::prev(groups.end());
        }
        it->iou.push_back(s.iou);
        it->f1.push_back(s.f1);
        it->empty += s.stats.empty_ground() ? 1 : 0;
    }
    std::vector<SummaryRow> rows;
    for (const Group& g : groups) {
        rows.push_back({g.method, g.slices, aggregate(g.iou), aggregate(g.f1), g.iou.size(), g.empty});
    }
    return rows;
}

void write_frame_csv(std::ostream& out, const std::vector<FrameScore>& scores)
{
    out << "method,slices,frame,iou,f1\n";
    for (const FrameScore& s : scores) {
        out << s.method << ',' << s.slices << ',' << s.frame << ',' << percent(s.iou) << ',' << percent(s.f1) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows)
{
    out << "method,slices,mean_iou,std_iou,mean_f1,std_f1\n";
    for (const SummaryRow& r : rows) {
        out << r.method << ',' << r.slices << ',' << percent(r.iou.mean) << ',' << percent(r.iou.std_dev) << ','
            << percent(r.f1.mean) << ',' << percent(r.f1.std_dev) << '\n';
    }
}

} // namespace slicegs::eval
