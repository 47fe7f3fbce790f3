#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace percept {

inline constexpr double kNoStat = -std::numeric_limits<double>::infinity();

// Detector parameters: per-bin weights, alarm threshold and the window
// limits of the scan over candidate change points k in [t - m1, t - m0].
struct DetectorConfig {
    std::vector<double> weights;   // sigma_1 .. sigma_L, all >= 0
    double threshold = std::numeric_limits<double>::infinity();
    int m0 = 20;
    int m1 = 80;

    std::size_t bins() const { return weights.size(); }

    void validate() const {
        if (weights.empty()) throw std::invalid_argument("DetectorConfig: no weights");
        for (double w : weights)
            if (!(w >= 0.0)) throw std::invalid_argument("DetectorConfig: weights must be >= 0");
        if (!(threshold >= 0.0))
            throw std::invalid_argument("DetectorConfig: threshold must be >= 0");
        if (m0 < 4) throw std::invalid_argument("DetectorConfig: m0 must be at least 4");
        if (m1 <= m0) throw std::invalid_argument("DetectorConfig: m1 must exceed m0");
    }

    static DetectorConfig uniform(std::size_t bins) {
        DetectorConfig cfg;
        cfg.weights.assign(bins, 1.0);
        return cfg;
    }
};

// Rolling window of per-frame frequency vectors plus their running prefix
// sums. Frames are indexed 1-based; the buffer retains enough history for
// every candidate k in the scan window (about 2*m1 frames).
class StreamBuffer {
public:
    StreamBuffer(std::size_t bins, int m1)
        : bins_(bins), capacity_(2 * static_cast<std::size_t>(m1) + 4) {
        if (bins_ == 0) throw std::invalid_argument("StreamBuffer: zero bins");
        prefix_.push_back(std::vector<double>(bins_, 0.0));  // prefix up to frame 0
    }

    std::size_t bins() const { return bins_; }
    int time() const { return time_; }
    int oldest_prefix_frame() const { return time_ - static_cast<int>(prefix_.size()) + 1; }

    void push(std::span<const double> f) {
        if (f.size() != bins_) throw std::invalid_argument("StreamBuffer: frame size mismatch");
        std::vector<double> next = prefix_.back();
        for (std::size_t l = 0; l < bins_; ++l) next[l] += f[l];
        prefix_.push_back(std::move(next));
        ++time_;
        while (prefix_.size() > capacity_) prefix_.pop_front();
    }

    // Normalized histogram of the frame sum over (a, b], i.e. frames a+1..b.
    // A zero-mass interval yields the uniform vector (consistent with the
    // empty-diagram convention).
    void interval_proportions(int a, int b, std::span<double> out) const {
        const std::vector<double>& hi = prefix_at(b);
        const std::vector<double>& lo = prefix_at(a);
        double total = 0.0;
        for (std::size_t l = 0; l < bins_; ++l) {
            out[l] = hi[l] - lo[l];
            total += out[l];
        }
        if (total > 0.0)
            for (std::size_t l = 0; l < bins_; ++l) out[l] /= total;
        else
            for (std::size_t l = 0; l < bins_; ++l) out[l] = 1.0 / static_cast<double>(bins_);
    }

    bool covers(int a) const { return a >= oldest_prefix_frame() && a >= 0; }

private:
    const std::vector<double>& prefix_at(int frame) const {
        const int idx = frame - oldest_prefix_frame();
        if (idx < 0 || idx >= static_cast<int>(prefix_.size()))
            throw std::out_of_range("StreamBuffer: frame outside retained window");
        return prefix_[static_cast<std::size_t>(idx)];
    }

    std::size_t bins_;
    std::size_t capacity_;
    int time_ = 0;  // number of frames pushed; frames are 1..time_
    std::deque<std::vector<double>> prefix_;
};

struct IntervalProportions {
    std::vector<double> w11, w12, w21, w22;
};

// The four interval histograms around candidate change point k at time t:
// (k-2d, k-d], (k-d, k], (k, k+d], (k+d, t] with d = floor((t-k)/2). For odd
// t-k the fourth interval absorbs the extra frame.
inline IntervalProportions interval_proportions(const StreamBuffer& buffer, int t, int k) {
    const int delta = (t - k) / 2;
    if (delta < 1) throw std::invalid_argument("interval_proportions: need t - k >= 2");
    if (k - 2 * delta < 0 || !buffer.covers(k - 2 * delta) || t > buffer.time())
        throw std::invalid_argument("interval_proportions: insufficient history");
    IntervalProportions p;
    const std::size_t L = buffer.bins();
    p.w11.resize(L);
    p.w12.resize(L);
    p.w21.resize(L);
    p.w22.resize(L);
    buffer.interval_proportions(k - 2 * delta, k - delta, p.w11);
    buffer.interval_proportions(k - delta, k, p.w12);
    buffer.interval_proportions(k, k + delta, p.w21);
    buffer.interval_proportions(k + delta, t, p.w22);
    return p;
}

// Cross-form weighted-l2 statistic; may be negative.
inline double chi_statistic(std::span<const double> w11, std::span<const double> w12,
                            std::span<const double> w21, std::span<const double> w22,
                            std::span<const double> weights) {
    const std::size_t L = weights.size();
    if (w11.size() != L || w12.size() != L || w21.size() != L || w22.size() != L)
        throw std::invalid_argument("chi_statistic: length mismatch");
    double s = 0.0;
    for (std::size_t l = 0; l < L; ++l) s += (w11[l] - w21[l]) * weights[l] * (w12[l] - w22[l]);
    return s;
}

struct ScanResult {
    double chi_max = kNoStat;
    int k_star = -1;
};

namespace detail {

struct ScanWorkspace {
    std::vector<double> w11, w12, w21, w22;
    void resize(std::size_t L) {
        w11.resize(L);
        w12.resize(L);
        w21.resize(L);
        w22.resize(L);
    }
};

inline ScanResult scan_statistic_impl(const StreamBuffer& buffer, int t,
                                      const DetectorConfig& cfg, ScanWorkspace& ws) {
    ScanResult res;
    if (t < cfg.m0 || t > buffer.time()) return res;
    ws.resize(buffer.bins());
    const int lo = std::max(0, t - cfg.m1);
    const int hi = t - cfg.m0;
    for (int k = lo; k <= hi; ++k) {
        const int delta = (t - k) / 2;
        if (delta < 1) continue;
        const int first_needed = k - 2 * delta;
        if (first_needed < 0 || !buffer.covers(first_needed)) continue;
        buffer.interval_proportions(first_needed, k - delta, ws.w11);
        buffer.interval_proportions(k - delta, k, ws.w12);
        buffer.interval_proportions(k, k + delta, ws.w21);
        buffer.interval_proportions(k + delta, t, ws.w22);
        const double chi = chi_statistic(ws.w11, ws.w12, ws.w21, ws.w22, cfg.weights);
        if (chi > res.chi_max) {  // strict: ties keep the smallest k
            res.chi_max = chi;
            res.k_star = k;
        }
    }
    return res;
}

}  // namespace detail

// Maximizes the chi statistic over candidate change points in the window
// [max(0, t - m1), t - m0] that have full interval history. Returns -inf and
// k_star = -1 when no candidate is valid.
inline ScanResult scan_statistic(const StreamBuffer& buffer, int t, const DetectorConfig& cfg) {
    cfg.validate();
    detail::ScanWorkspace ws;
    return detail::scan_statistic_impl(buffer, t, cfg, ws);
}

struct TraceRow {
    int t = 0;
    double chi_max = kNoStat;
    int k_star = -1;
    bool alarm = false;
};

// Per-time record of the scan statistic, its maximizing candidate and the
// alarm flag (chi_max >= threshold).
struct StatTrace {
    std::vector<TraceRow> rows;
    std::optional<int> alarm_time;  // first t whose statistic reached the threshold
};

// Runs the full online detector over a stream of frequency vectors. The
// trace keeps being emitted after the first alarm for diagnostics.
inline StatTrace run_detector(std::span<const std::vector<double>> frequency_stream,
                              const DetectorConfig& cfg) {
    cfg.validate();
    StreamBuffer buffer(cfg.bins(), cfg.m1);
    detail::ScanWorkspace ws;
    StatTrace trace;
    trace.rows.reserve(frequency_stream.size());
    for (std::size_t i = 0; i < frequency_stream.size(); ++i) {
        buffer.push(frequency_stream[i]);
        const int t = buffer.time();
        const ScanResult res = detail::scan_statistic_impl(buffer, t, cfg, ws);
        TraceRow row{t, res.chi_max, res.k_star, false};
        if (res.chi_max >= cfg.threshold) {
            row.alarm = true;
            if (!trace.alarm_time) trace.alarm_time = t;
        }
        trace.rows.push_back(row);
    }
    return trace;
}

}  // namespace percept
