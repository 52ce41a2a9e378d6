#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace curvehedge {

/// Welford accumulator with an associative merge.
struct RunningStats {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const RunningStats& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double n = static_cast<double>(count + other.count);
        const double delta = other.mean - mean;
        mean += delta * static_cast<double>(other.count) / n;
        m2 += other.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(other.count) / n;
        count += other.count;
    }

    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double sd() const { return std::sqrt(variance()); }
    /// Standard error of the mean.
    double se() const { return count > 0 ? sd() / std::sqrt(static_cast<double>(count)) : 0.0; }
};

/// Running statistics for several channels fed together.
class ChannelStats {
public:
    explicit ChannelStats(std::size_t channels = 0) : stats_(channels) {}
    explicit ChannelStats(std::vector<RunningStats> stats) : stats_(std::move(stats)) {}

    void add(std::span<const double> values) {
        for (std::size_t i = 0; i < stats_.size(); ++i) stats_[i].add(values[i]);
    }
    void merge(const ChannelStats& other) {
        for (std::size_t i = 0; i < stats_.size(); ++i) stats_[i].merge(other.stats_[i]);
    }
    std::size_t size() const { return stats_.size(); }
    const RunningStats& operator[](std::size_t i) const { return stats_[i]; }

private:
    std::vector<RunningStats> stats_;
};

/// Per-channel sums of (x - shift) and (x - shift)^2 with the first sample as the
/// shift. Cheaper than Welford in tight loops and free of cancellation as long as
/// the spread within a block is modest.
class ChannelSums {
public:
    explicit ChannelSums(std::size_t channels) : shift_(channels), sum_(channels), sq_(channels) {}

    void add(std::span<const double> values) {
        if (count_ == 0) std::copy(values.begin(), values.begin() + shift_.size(), shift_.begin());
        ++count_;
        for (std::size_t i = 0; i < shift_.size(); ++i) {
            const double d = values[i] - shift_[i];
            sum_[i] += d;
            sq_[i] += d * d;
        }
    }

    ChannelStats stats() const {
        std::vector<RunningStats> out(shift_.size());
        if (count_ == 0) return ChannelStats(std::move(out));
        const double n = static_cast<double>(count_);
        for (std::size_t i = 0; i < shift_.size(); ++i) {
            const double m = sum_[i] / n;
            out[i].count = count_;
            out[i].mean = shift_[i] + m;
            out[i].m2 = std::max(0.0, sq_[i] - n * m * m);
        }
        return ChannelStats(std::move(out));
    }

private:
    std::size_t count_ = 0;
    std::vector<double> shift_;
    std::vector<double> sum_;
    std::vector<double> sq_;
};

RunningStats summarize(std::span<const double> values);

/// Least-squares slope of y against x.
double regression_slope(std::span<const double> x, std::span<const double> y);

/// |a - b| <= k * sqrt(se_a^2 + se_b^2), with an absolute floor for rounding in
/// deterministic (zero-variance) cases.
bool within_standard_errors(double a, double b, double se_a, double se_b, double k = 3.0,
                            double floor = 1e-12);

}  // namespace curvehedge
