#ifndef SLICEGS_EVAL_HPP
#define SLICEGS_EVAL_HPP

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "slicegs/types.hpp"

namespace slicegs::eval {

/// Binary confusion counts with ground as the positive class.
struct EvalStats {
    std::uint64_t tp{0};
    std::uint64_t fp{0};
    std::uint64_t fn{0};
    std::uint64_t tn{0};

    [[nodiscard]] std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
    /// No ground in either prediction or truth; IoU and F1 are 1 by convention.
    [[nodiscard]] bool empty_ground() const noexcept { return tp + fp + fn == 0; }
    friend bool operator==(const EvalStats&, const EvalStats&) = default;
};

/// Throws DimensionMismatch when the masks differ in length.
EvalStats confusion(const GroundMask& pred, const GroundTruthMask& truth);

double iou(const EvalStats& stats) noexcept;
double f1(const EvalStats& stats) noexcept;

struct AggregateStats {
    std::vector<double> values;
    double mean{0.0};
    double std_dev{0.0}; ///< sample (n - 1) deviation, 0 for a single value
};

/// Throws InvalidArgument for an empty list.
AggregateStats aggregate(const std::vector<double>& values);

struct FrameScore {
    std::string method;
    std::size_t slices{1};
    std::string frame;
    EvalStats stats;
    double iou{0.0};
    double f1{0.0};
};

struct SummaryRow {
    std::string method;
    std::size_t slices{1};
    AggregateStats iou;
    AggregateStats f1;
    std::size_t frames{0};
    std::size_t empty_ground_frames{0};
};

/// Groups frame scores by (method, slices) in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<FrameScore>& scores);

// CSV output; metric columns are percentages with four decimals.
void write_frame_csv(std::ostream& out, const std::vector<FrameScore>& scores);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

} // namespace slicegs::eval

#endif // SLICEGS_EVAL_HPP
