#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "percept/diagram_distance.hpp"
#include "percept/persistence.hpp"

namespace percept {

// Pre-change mean/covariance model for the Hotelling-T^2 CUSUM. The drift
// d_H is subtracted from every quadratic-form increment.
struct HotellingModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov_inverse;
    int window = 10;
    double drift = 0.0;
};

namespace detail {

inline Eigen::VectorXd trailing_mean(const Eigen::MatrixXd& rows, int t, int window) {
    const int lo = std::max(0, t - window);
    const int count = t - lo + 1;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(rows.cols());
    for (int i = lo; i <= t; ++i) m += rows.row(i).transpose();
    return m / count;
}

}  // namespace detail

// Fits the pre-change model from training rows: sample mean, regularized
// inverse covariance (ridge lambda = ridge_scale * trace / p) and the drift
// at the given quantile of the training quadratic-form increments.
inline HotellingModel fit_hotelling(const Eigen::MatrixXd& training, int window,
                                    double drift_quantile = 0.9, double ridge_scale = 1e-6) {
    const int n = static_cast<int>(training.rows());
    const int p = static_cast<int>(training.cols());
    if (n < 2) throw std::invalid_argument("fit_hotelling: need at least 2 training rows");
    if (window < 1) throw std::invalid_argument("fit_hotelling: window must be positive");

    HotellingModel model;
    model.window = window;
    model.mean = training.colwise().mean();
    Eigen::MatrixXd centered = training.rowwise() - model.mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1);
    if (ridge_scale > 0.0)
        cov += (ridge_scale * cov.trace() / p) * Eigen::MatrixXd::Identity(p, p);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    const Eigen::VectorXd d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || d.minCoeff() <= 0.0 ||
        d.minCoeff() < 1e-12 * d.maxCoeff())
        throw std::runtime_error(
            "fit_hotelling: covariance is singular; enable the ridge regularization");
    model.cov_inverse = ldlt.solve(Eigen::MatrixXd::Identity(p, p));

    // one quadratic form per training time, evaluated with the same windowed
    // mean the monitor uses; ramp-up times with truncated windows would
    // inflate the quantile and are skipped
    if (n <= window + 1)
        throw std::invalid_argument("fit_hotelling: need more training rows than the window");
    std::vector<double> forms;
    forms.reserve(n - window);
    for (int t = window; t < n; ++t) {
        const Eigen::VectorXd d = detail::trailing_mean(training, t, window) - model.mean;
        forms.push_back(d.dot(model.cov_inverse * d));
    }
    std::sort(forms.begin(), forms.end());
    const double idx = drift_quantile * (forms.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, forms.size() - 1);
    model.drift = forms[lo] + (idx - lo) * (forms[hi] - forms[lo]);
    return model;
}

// Recomputes the drift quantile from full-window quadratic forms on the
// given rows. Pass held-out pre-change data when the model itself was
// estimated: in-sample forms understate fresh-data variation whenever the
// mean/covariance (or an upstream PCA) is fit on few rows.
inline void calibrate_drift(HotellingModel& model, const Eigen::MatrixXd& rows,
                            double drift_quantile = 0.9) {
    const int n = static_cast<int>(rows.rows());
    if (n <= model.window + 1)
        throw std::invalid_argument("calibrate_drift: need more rows than the window");
    std::vector<double> forms;
    forms.reserve(n - model.window);
    for (int t = model.window; t < n; ++t) {
        const Eigen::VectorXd d = detail::trailing_mean(rows, t, model.window) - model.mean;
        forms.push_back(d.dot(model.cov_inverse * d));
    }
    std::sort(forms.begin(), forms.end());
    const double idx = drift_quantile * (forms.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, forms.size() - 1);
    model.drift = forms[lo] + (idx - lo) * (forms[hi] - forms[lo]);
}

// CUSUM recursion S_t = max(S_{t-1} + QF(windowed mean) - d_H, 0), with
// early windows truncated at the stream start. Keeping the state clipped at
// zero leaves alarm times for any positive threshold unchanged relative to
// the unclipped form and keeps the in-control trace at zero.
inline std::vector<double> hotelling_cusum(const Eigen::MatrixXd& stream,
                                           const HotellingModel& model) {
    if (stream.cols() != model.mean.size())
        throw std::invalid_argument("hotelling_cusum: dimension mismatch");
    const int n = static_cast<int>(stream.rows());
    std::vector<double> trace(n);
    double s = 0.0;
    for (int t = 0; t < n; ++t) {
        const Eigen::VectorXd d = detail::trailing_mean(stream, t, model.window) - model.mean;
        s = std::max(s + d.dot(model.cov_inverse * d) - model.drift, 0.0);
        trace[t] = s;
    }
    return trace;
}

inline double rbf_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double bandwidth) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * bandwidth * bandwidth));
}

// Biased V-statistic MMD estimator with Gaussian RBF kernel; self-pairs are
// retained so identical sample multisets give exactly zero. Clamped at zero
// against floating-point cancellation.
inline double mmd_statistic(const Eigen::MatrixXd& pre, const Eigen::MatrixXd& post,
                            double bandwidth) {
    if (pre.rows() == 0 || post.rows() == 0)
        throw std::invalid_argument("mmd_statistic: empty sample set");
    if (pre.cols() != post.cols())
        throw std::invalid_argument("mmd_statistic: dimension mismatch");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("mmd_statistic: bandwidth must be positive");
    const int m = static_cast<int>(pre.rows());
    const int n = static_cast<int>(post.rows());
    double kxx = 0.0, kyy = 0.0, kxy = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) kxx += rbf_kernel(pre.row(i), pre.row(j), bandwidth);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) kyy += rbf_kernel(post.row(i), post.row(j), bandwidth);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) kxy += rbf_kernel(pre.row(i), post.row(j), bandwidth);
    const double v = kxx / (static_cast<double>(m) * m) + kyy / (static_cast<double>(n) * n) -
                     2.0 * kxy / (static_cast<double>(m) * n);
    return std::max(v, 0.0);
}

// Median of the n(n-1)/2 pairwise distances (mean of the middle two for an
// even count).
inline double median_heuristic(const Eigen::MatrixXd& samples) {
    const int n = static_cast<int>(samples.rows());
    if (n < 2) throw std::invalid_argument("median_heuristic: need at least 2 samples");
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d.push_back((samples.row(i) - samples.row(j)).norm());
    std::sort(d.begin(), d.end());
    const std::size_t k = d.size();
    const double med = (k % 2 == 1) ? d[k / 2] : 0.5 * (d[k / 2 - 1] + d[k / 2]);
    if (!(med > 0.0)) throw std::invalid_argument("median_heuristic: all points identical");
    return med;
}

struct MmdTracePoint {
    int t = 0;       // 1-based time of the block boundary
    double value = 0.0;
};

// Sliding-window MMD: at each time t the pre block holds the w_pre frames
// before the post block of the most recent w_post frames; the bandwidth is
// recomputed per t by the median heuristic on the union. Times before
// w_pre + w_post have no statistic (trace gap).
inline std::vector<MmdTracePoint> mmd_detector(const Eigen::MatrixXd& stream, int window_pre = 40,
                                               int window_post = 40) {
    if (window_pre < 1 || window_post < 1)
        throw std::invalid_argument("mmd_detector: windows must be positive");
    const int n = static_cast<int>(stream.rows());
    std::vector<MmdTracePoint> trace;
    for (int t = window_pre + window_post; t <= n; ++t) {
        const Eigen::MatrixXd pre = stream.middleRows(t - window_pre - window_post, window_pre);
        const Eigen::MatrixXd post = stream.middleRows(t - window_post, window_post);
        Eigen::MatrixXd both(window_pre + window_post, stream.cols());
        both << pre, post;
        const double bw = median_heuristic(both);
        trace.push_back({t, mmd_statistic(pre, post, bw)});
    }
    return trace;
}

// Adjacent-frame Wasserstein baseline: S_t = W1(D_t, D_{t+1}), one value per
// adjacent pair.
inline std::vector<double> wasserstein_detector(std::span<const PersistenceDiagram> stream) {
    if (stream.size() < 2)
        throw std::invalid_argument("wasserstein_detector: need at least 2 diagrams");
    std::vector<double> trace(stream.size() - 1);
    for (std::size_t t = 0; t + 1 < stream.size(); ++t)
        trace[t] = wasserstein1_distance(stream[t], stream[t + 1]);
    return trace;
}

}  // namespace percept
