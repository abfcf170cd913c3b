#include "slicegs/seg_depth.hpp"

#include <cmath>
#include <deque>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

namespace slicegs::depth {

namespace {

/// Weights w such that sum_j w_j * y_j is the fitted polynomial at offset 0,
/// for samples at `offsets`.
std::vector<double> sg_weights(const std::vector<int>& offsets, std::size_t order)
{
    const auto m = static_cast<Eigen::Index>(offsets.size());
    const auto p = static_cast<Eigen::Index>(order) + 1;
    Eigen::MatrixXd vander(m, p);
    for (Eigen::Index i = 0; i < m; ++i) {
        double power = 1.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            vander(i, j) = power;
            power *= offsets[static_cast<std::size_t>(i)];
        }
    }
    // Row 0 of the pseudo-inverse maps samples to the constant coefficient.
    const Eigen::MatrixXd pinv = vander.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(m, m));
    std::vector<double> weights(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        weights[static_cast<std::size_t>(i)] = pinv(0, i);
    }
    return weights;
}

} // namespace

AngleImage compute_angle_image(const RangeImageView& image, double virtual_ground_z)
{
    AngleImage out(image.rows(), image.cols());
    for (std::size_t c = 0; c < image.cols(); ++c) {
        double prev_d = 0.0;
        double prev_z = virtual_ground_z;
        for (std::size_t r = image.rows(); r-- > 0;) {
            if (!image.occupied(r, c)) {
                continue;
            }
            const double x = image.x(r, c);
            const double y = image.y(r, c);
            const double z = image.z(r, c);
            const double d = std::sqrt(x * x + y * y);
            out.set(r, c, std::atan2(std::abs(z - prev_z), std::abs(d - prev_d)));
            prev_d = d;
            prev_z = z;
        }
    }
    return out;
}

AngleImage savitzky_golay_smooth(const AngleImage& angles, std::size_t window, std::size_t order)
{
    if (window < 3 || window % 2 == 0 || window > 63) {
        throw InvalidArgument("Savitzky-Golay window must be odd and within 3..63, got " + std::to_string(window));
    }
    if (order < 1 || order >= window) {
        throw InvalidArgument("Savitzky-Golay order must be in 1.." + std::to_string(window - 1) + ", got " +
                              std::to_string(order));
    }

    const auto half = static_cast<std::ptrdiff_t>(window / 2);
    const auto rows = static_cast<std::ptrdiff_t>(angles.rows);
    // Weights depend only on which window positions hold valid samples.
    std::unordered_map<std::uint64_t, std::vector<double>> cache;

    AngleImage out = angles;
    std::vector<int> offsets;
    for (std::size_t c = 0; c < angles.cols; ++c) {
        for (std::ptrdiff_t r = 0; r < rows; ++r) {
            if (!angles.is_valid(static_cast<std::size_t>(r), c)) {
                continue;
            }
            std::uint64_t pattern = 0;
            offsets.clear();
            for (std::ptrdiff_t k = -half; k <= half; ++k) {
                const std::ptrdiff_t rr = r + k;
                if (rr >= 0 && rr < rows && angles.is_valid(static_cast<std::size_t>(rr), c)) {
                    pattern |= std::uint64_t{1} << static_cast<unsigned>(k + half);
                    offsets.push_back(static_cast<int>(k));
                }
            }
            if (offsets.size() < 2) {
                continue;
            }
            auto it = cache.find(pattern);
            if (it == cache.end()) {
                const std::size_t effective_order = std::min(order, offsets.size() - 1);
                it = cache.emplace(pattern, sg_weights(offsets, effective_order)).first;
            }
            double value = 0.0;
            for (std::size_t j = 0; j < offsets.size(); ++j) {
                value += it->second[j] * angles.at(static_cast<std::size_t>(r + offsets[j]), c);
            }
            out.angle[static_cast<std::size_t>(r) * angles.cols + c] = value;
        }
    }
    return out;
}

PixelMask bfs_ground_label(const AngleImage& angles, double seed_threshold, double propagation_threshold)
{
    if (!(seed_threshold > 0.0) || !(propagation_threshold > 0.0)) {
        throw InvalidArgument("BFS thresholds must be positive");
    }
    PixelMask mask(angles.rows, angles.cols);
    std::deque<std::size_t> queue;

    for (std::size_t c = 0; c < angles.cols; ++c) {
        for (std::size_t r = angles.rows; r-- > 0;) {
            if (!angles.is_valid(r, c)) {
                continue;
            }
            if (angles.at(r, c) < seed_threshold) {
                mask.at(r, c) = 1;
                queue.push_back(r * angles.cols + c);
            }
            break;
        }
    }

    const double ceiling = seed_threshold + propagation_threshold;
    auto visit = [&](std::size_t r, std::size_t c, double current) {
        if (!angles.is_valid(r, c) || mask.at(r, c) != 0) {
            return;
        }
        const double a = angles.at(r, c);
        if (std::abs(a - current) < propagation_threshold && a < ceiling) {
            mask.at(r, c) = 1;
            queue.push_back(r * angles.cols + c);
        }
    };

    while (!queue.empty()) {
        const std::size_t px = queue.front();
        queue.pop_front();
        const std::size_t r = px / angles.cols;
        const std::size_t c = px % angles.cols;
        const double a = angles.angle[px];
        if (r > 0) {
            visit(r - 1, c, a);
        }
        if (r + 1 < angles.rows) {
            visit(r + 1, c, a);
        }
        if (c > 0) {
            visit(r, c - 1, a);
        }
        if (c + 1 < angles.cols) {
            visit(r, c + 1, a);
        }
    }
    return mask;
}

PixelMask segment(const RangeImageView& image, const DepthParams& params)
{
    AngleImage angles = compute_angle_image(image, params.virtual_ground_z);
    if (params.smoothing) {
        angles = savitzky_golay_smooth(angles, params.smoothing_window, params.smoothing_order);
    }
    return bfs_ground_label(angles, params.seed_threshold, params.propagation_threshold);
}

} // namespace slicegs::depth
