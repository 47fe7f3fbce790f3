#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "percept/detector.hpp"
#include "percept/rng.hpp"

namespace percept {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// Siegmund's overshoot correction nu(y); nu(0+) = 1. Used inside the ARL
// approximation and documented as interchangeable with other evaluations of
// the same special function.
inline double nu_function(double y) {
    if (y < 1e-8) return 1.0;
    const double h = 0.5 * y;
    const double num = (2.0 / y) * (normal_cdf(h) - 0.5);
    const double den = h * normal_cdf(h) + normal_pdf(h);
    return num / den;
}

namespace detail {

// Adaptive Simpson quadrature.
inline double simpson(double (*f)(double), double a, double b) {
    struct Rec {
        static double eval(double (*g)(double), double a, double b, double fa, double fb,
                           double fm, double whole, double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = g(lm), frm = g(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return eval(g, a, m, fa, fm, flm, left, tol * 0.5, depth - 1) +
                   eval(g, m, b, fm, fb, frm, right, tol * 0.5, depth - 1);
        }
    };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec::eval(f, a, b, fa, fb, fm, whole, 1e-12, 40);
}

inline double y_nu_squared(double y) {
    const double v = nu_function(y);
    return y * v * v;
}

}  // namespace detail

// Variance proxy sigma_p^2 of the weighted-l2 statistic under pre-change
// distribution p: 4 * [sum_i s_i^2 p_i^2 (1-p_i)^2 + sum_{i!=j} s_i s_j p_i^2 p_j^2].
inline double sigma_p_squared(std::span<const double> p, std::span<const double> weights) {
    if (p.size() != weights.size())
        throw std::invalid_argument("sigma_p_squared: length mismatch");
    double diag = 0.0, cross = 0.0, sum_wp2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi2 = p[i] * p[i];
        diag += weights[i] * weights[i] * pi2 * (1.0 - p[i]) * (1.0 - p[i]);
        sum_wp2 += weights[i] * pi2;
    }
    // sum_{i != j} s_i s_j p_i^2 p_j^2 = (sum_i s_i p_i^2)^2 - sum_i s_i^2 p_i^4
    double sum_w2p4 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        sum_w2p4 += weights[i] * weights[i] * p[i] * p[i] * p[i] * p[i];
    cross = sum_wp2 * sum_wp2 - sum_w2p4;
    return 4.0 * (diag + cross);
}

// Closed-form approximation of the average run length as a function of the
// threshold b, with the window limits entering through the integral bounds.
// Exposed for guidance; Monte-Carlo calibration is the default route.
inline double arl_approximation(double b, std::span<const double> p_pre,
                                std::span<const double> weights, int m0, int m1) {
    if (!(b > 0.0)) throw std::invalid_argument("arl_approximation: b must be positive");
    if (m0 < 1 || m1 <= m0) throw std::invalid_argument("arl_approximation: bad window limits");
    double mass = 0.0;
    for (double v : p_pre) mass += std::abs(v);
    if (mass <= 0.0) throw std::invalid_argument("arl_approximation: degenerate p_pre");

    const double sp2 = sigma_p_squared(p_pre, weights);
    if (sp2 <= 0.0) throw std::invalid_argument("arl_approximation: degenerate sigma_p^2");
    const double lo = std::sqrt(4.0 * b * b / (m1 * sp2));
    const double hi = std::sqrt(4.0 * b * b / (m0 * sp2));
    const double integral = detail::simpson(&detail::y_nu_squared, lo, hi);
    if (integral <= 0.0) return std::numeric_limits<double>::infinity();
    const double numerator =
        std::exp(b * b / (2.0 * sp2)) * std::sqrt(2.0 * M_PI * sp2) / b;
    return 0.5 * numerator / integral;
}

// Pool estimate: with p_hat the fraction of alarm-free
// sequences of length m, ARL ~ m / (-ln p_hat).
inline double arl_from_survival(double p_hat, int m) {
    if (p_hat < 0.0 || p_hat > 1.0) throw std::invalid_argument("arl_from_survival: bad p_hat");
    if (p_hat >= 1.0) return std::numeric_limits<double>::infinity();
    if (p_hat <= 0.0) return 0.0;
    return static_cast<double>(m) / (-std::log(p_hat));
}

namespace detail {

// Per-sequence maxima of the scan statistic over resampled pre-change pools.
inline std::vector<double> simulate_prechange_maxima(
    std::span<const std::vector<double>> pre_pool, const DetectorConfig& cfg, int n_sequences,
    int m, std::uint64_t seed) {
    if (pre_pool.empty()) throw std::invalid_argument("simulate: empty pre-change pool");
    if (n_sequences < 1 || m <= cfg.m0)
        throw std::invalid_argument("simulate: need n >= 1 and m > m0");
    std::vector<double> maxima(n_sequences, kNoStat);
    ScanWorkspace ws;
    for (int s = 0; s < n_sequences; ++s) {
        auto rng = make_rng(seed, "arl-seq", static_cast<std::uint64_t>(s));
        std::uniform_int_distribution<std::size_t> pick(0, pre_pool.size() - 1);
        StreamBuffer buffer(cfg.bins(), cfg.m1);
        double best = kNoStat;
        for (int t = 1; t <= m; ++t) {
            buffer.push(pre_pool[pick(rng)]);
            const ScanResult r = scan_statistic_impl(buffer, t, cfg, ws);
            if (r.chi_max > best) best = r.chi_max;
        }
        maxima[s] = best;
    }
    return maxima;
}

}  // namespace detail

// Public view of the pool simulator: the per-sequence maxima are what both
// calibration and threshold-grid evaluation consume.
inline std::vector<double> simulate_scan_maxima(std::span<const std::vector<double>> pre_pool,
                                                const DetectorConfig& cfg, int n_sequences,
                                                int m, std::uint64_t seed) {
    DetectorConfig open = cfg;
    open.threshold = std::numeric_limits<double>::infinity();
    open.validate();
    return detail::simulate_prechange_maxima(pre_pool, open, n_sequences, m, seed);
}

struct CalibrationResult {
    double threshold = 0.0;
    double estimated_arl = 0.0;
    std::vector<double> grid;
    std::vector<double> grid_arl;
};

// Monte-Carlo threshold calibration: simulate n pre-change sequences of
// length m by resampling the pool with replacement, then pick the smallest
// candidate threshold whose pool-estimated ARL reaches the target. The grid
// spans the 50th..99.9th percentiles of the simulated per-sequence maxima.
inline CalibrationResult calibrate_threshold(double target_arl,
                                             std::span<const std::vector<double>> pre_pool,
                                             const DetectorConfig& cfg_without_b,
                                             int n_sequences, int m, std::uint64_t seed) {
    if (!(target_arl > 0.0))
        throw std::invalid_argument("calibrate_threshold: target must be positive");
    DetectorConfig cfg = cfg_without_b;
    cfg.threshold = std::numeric_limits<double>::infinity();
    cfg.validate();

    std::vector<double> maxima =
        detail::simulate_prechange_maxima(pre_pool, cfg, n_sequences, m, seed);
    std::vector<double> sorted = maxima;
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() > kNoStat))
        throw std::runtime_error("calibrate_threshold: a sequence produced no valid scan");

    auto percentile = [&sorted](double q) {
        const double idx = q * (sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(idx);
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (idx - lo) * (sorted[hi] - sorted[lo]);
    };
    // the grid must reach survival fractions well below 1/2, or targets near
    // m / ln 2 and below are unreachable without overshooting
    double lo = percentile(0.005);
    double hi = percentile(0.999);
    if (!(hi > 0.0))
        throw std::runtime_error("calibrate_threshold: simulated maxima are not positive");
    lo = std::max(lo, hi * 1e-6);  // keep the log-spaced grid well defined

    constexpr int kGridSize = 60;
    CalibrationResult result;
    result.grid.resize(kGridSize);
    for (int i = 0; i < kGridSize; ++i)
        result.grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (kGridSize - 1));

    result.grid_arl.resize(kGridSize);
    for (int i = 0; i < kGridSize; ++i) {
        const double b = result.grid[i];
        const auto below =
            std::count_if(maxima.begin(), maxima.end(), [b](double v) { return v < b; });
        result.grid_arl[i] =
            arl_from_survival(static_cast<double>(below) / maxima.size(), m);
    }
    for (int i = 0; i < kGridSize; ++i) {
        if (result.grid_arl[i] >= target_arl) {
            result.threshold = result.grid[i];
            result.estimated_arl = result.grid_arl[i];
            return result;
        }
    }
    throw std::runtime_error("calibrate_threshold: target ARL unreachable on grid (max " +
                             std::to_string(result.grid_arl.back()) + ")");
}

struct EddResult {
    double mean_delay = 0.0;
    int censored = 0;             // sequences that never alarmed (counted at m_post)
    std::vector<int> delays;      // per-sequence delay, m_post when censored
};

// Monte-Carlo expected detection delay: each sequence carries m_pre frames of
// pre-change history followed by m_post post-change frames; the statistic is
// evaluated only from the onset of the post-change samples and the delay is
// the first alarm time counted from the onset. Alarmless sequences are
// right-censored at m_post.
inline EddResult estimate_edd(std::span<const std::vector<double>> pre_pool,
                              std::span<const std::vector<double>> post_pool, double b,
                              const DetectorConfig& cfg_in, int n_sequences, int m_pre,
                              int m_post, std::uint64_t seed) {
    if (pre_pool.empty() || post_pool.empty())
        throw std::invalid_argument("estimate_edd: empty pool");
    DetectorConfig cfg = cfg_in;
    cfg.threshold = b;
    cfg.validate();
    if (m_pre < 2 * (cfg.m0 / 2))
        throw std::invalid_argument("estimate_edd: m_pre shorter than the first scan window");
    if (m_post < 1) throw std::invalid_argument("estimate_edd: m_post must be positive");

    EddResult result;
    result.delays.resize(n_sequences, m_post);
    detail::ScanWorkspace ws;
    double sum = 0.0;
    for (int s = 0; s < n_sequences; ++s) {
        auto rng = make_rng(seed, "edd-seq", static_cast<std::uint64_t>(s));
        std::uniform_int_distribution<std::size_t> pre_pick(0, pre_pool.size() - 1);
        std::uniform_int_distribution<std::size_t> post_pick(0, post_pool.size() - 1);
        StreamBuffer buffer(cfg.bins(), cfg.m1);
        for (int t = 1; t <= m_pre; ++t) buffer.push(pre_pool[pre_pick(rng)]);
        int delay = m_post;
        bool alarmed = false;
        for (int tau = 1; tau <= m_post; ++tau) {
            buffer.push(post_pool[post_pick(rng)]);
            const ScanResult r = detail::scan_statistic_impl(buffer, m_pre + tau, cfg, ws);
            if (r.chi_max >= b) {
                delay = tau;
                alarmed = true;
                break;
            }
        }
        if (!alarmed) ++result.censored;
        result.delays[s] = delay;
        sum += delay;
    }
    result.mean_delay = sum / n_sequences;
    return result;
}

}  // namespace percept
