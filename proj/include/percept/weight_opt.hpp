#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "percept/binning.hpp"
#include "percept/rng.hpp"

namespace percept {

enum class WeightMode { absolute, relative };

// Worst-case weighted-l2 separation problem over the probability simplex:
// maximize over feasible weights the minimum weighted squared difference
// between rho-separated pre/post distributions. Training estimates, when
// provided, anchor the inner feasible set to balls around them.
struct WeightProblem {
    int bins = 0;
    double rho = 0.1;
    WeightMode mode = WeightMode::absolute;
    std::optional<std::vector<double>> anchor_pre;
    std::optional<std::vector<double>> anchor_post;
    double anchor_radius = 0.25;

    void validate() const {
        if (bins < 2) throw std::invalid_argument("WeightProblem: need at least 2 bins");
        if (!(rho > 0.0) || rho > std::sqrt(2.0) + 1e-12)
            throw std::invalid_argument("WeightProblem: rho must lie in (0, sqrt(2)]");
        for (const auto& a : {anchor_pre, anchor_post})
            if (a && static_cast<int>(a->size()) != bins)
                throw std::invalid_argument("WeightProblem: anchor length mismatch");
    }
};

struct WeightResult {
    std::vector<double> sigma;
    double achieved_f = 0.0;
    std::vector<double> worst_pre, worst_post;
};

namespace detail {

// Euclidean projection onto the probability simplex.
inline void project_simplex(std::span<double> x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> u(x.begin(), x.end());
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    for (int i = 0; i < n; ++i) {
        css += u[i];
        const double trial = (css - 1.0) / (i + 1);
        if (u[i] - trial > 0.0) theta = trial;
    }
    for (int i = 0; i < n; ++i) x[i] = std::max(0.0, x[i] - theta);
}

inline void project_ball(std::span<double> x, std::span<const double> center, double radius) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - center[i];
        d2 += d * d;
    }
    const double d = std::sqrt(d2);
    if (d <= radius || d == 0.0) return;
    const double scale = radius / d;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = center[i] + (x[i] - center[i]) * scale;
}

// Alternate simplex/ball projections; a handful of rounds is plenty at the
// accuracy the solver needs.
inline void project_feasible(std::span<double> x, const std::optional<std::vector<double>>& anchor,
                             double radius) {
    if (!anchor) {
        project_simplex(x);
        return;
    }
    for (int round = 0; round < 6; ++round) {
        project_simplex(x);
        project_ball(x, *anchor, radius);
    }
    project_simplex(x);
}

inline double pair_objective(std::span<const double> sigma, std::span<const double> p,
                             std::span<const double> q, WeightMode mode) {
    double s = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double diff = p[i] - q[i];
        if (mode == WeightMode::absolute) {
            s += sigma[i] * diff * diff;
        } else {
            const double denom = std::max(q[i], 1e-6);
            s += sigma[i] * (diff / denom) * (diff / denom);
        }
    }
    return s;
}

inline void pair_gradient(std::span<const double> sigma, std::span<const double> p,
                          std::span<const double> q, WeightMode mode, std::span<double> gp,
                          std::span<double> gq) {
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double diff = p[i] - q[i];
        if (mode == WeightMode::absolute) {
            gp[i] = 2.0 * sigma[i] * diff;
            gq[i] = -2.0 * sigma[i] * diff;
        } else {
            const double denom = std::max(q[i], 1e-6);
            gp[i] = 2.0 * sigma[i] * diff / (denom * denom);
            // denominator treated as constant inside the floored region
            gq[i] = -2.0 * sigma[i] * diff / (denom * denom);
            if (q[i] > 1e-6)
                gq[i] -= 2.0 * sigma[i] * diff * diff / (denom * denom * denom);
        }
    }
}

inline double norm2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Pushes p and q apart along their difference until the separation
// constraint holds again, then re-projects.
inline void enforce_separation(std::span<double> p, std::span<double> q, double rho,
                               const WeightProblem& prob, std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 12; ++attempt) {
        const double d = norm2(p, q);
        if (d >= rho) return;
        std::vector<double> dir(p.size());
        if (d > 1e-12) {
            for (std::size_t i = 0; i < p.size(); ++i) dir[i] = (p[i] - q[i]) / d;
        } else {
            std::normal_distribution<double> g(0.0, 1.0);
            double n = 0.0;
            for (auto& v : dir) {
                v = g(rng);
                n += v * v;
            }
            n = std::sqrt(std::max(n, 1e-12));
            for (auto& v : dir) v /= n;
        }
        const double push = 0.6 * (rho - d) + 1e-4;
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] += push * dir[i];
            q[i] -= push * dir[i];
        }
        project_feasible(p, prob.anchor_pre, prob.anchor_radius);
        project_feasible(q, prob.anchor_post, prob.anchor_radius);
    }
}

struct InnerSolution {
    std::vector<double> p, q;
    double value = std::numeric_limits<double>::infinity();
    bool feasible = false;
};

// Inner minimization of the weighted separation over rho-separated simplex
// points, by projected gradient descent with random restarts. Non-convex
// because of the reverse-ball constraint; restarts keep it honest.
inline InnerSolution solve_inner(std::span<const double> sigma, const WeightProblem& prob,
                                 std::uint64_t seed, int restarts = 20, int iters = 250) {
    const int L = prob.bins;
    InnerSolution best;
    for (int r = 0; r < restarts; ++r) {
        auto rng = make_rng(seed, "weights-inner", static_cast<std::uint64_t>(r));
        std::exponential_distribution<double> e(1.0);
        std::vector<double> p(L), q(L), gp(L), gq(L);
        double sp = 0.0, sq = 0.0;
        for (int i = 0; i < L; ++i) {
            p[i] = e(rng);
            q[i] = e(rng);
            sp += p[i];
            sq += q[i];
        }
        for (int i = 0; i < L; ++i) {
            p[i] /= sp;
            q[i] /= sq;
        }
        project_feasible(p, prob.anchor_pre, prob.anchor_radius);
        project_feasible(q, prob.anchor_post, prob.anchor_radius);
        enforce_separation(p, q, prob.rho, prob, rng);

        double step = 0.25;
        for (int it = 0; it < iters; ++it) {
            pair_gradient(sigma, p, q, prob.mode, gp, gq);
            for (int i = 0; i < L; ++i) {
                p[i] -= step * gp[i];
                q[i] -= step * gq[i];
            }
            project_feasible(p, prob.anchor_pre, prob.anchor_radius);
            project_feasible(q, prob.anchor_post, prob.anchor_radius);
            enforce_separation(p, q, prob.rho, prob, rng);
            step *= 0.985;
        }
        const double sep = norm2(p, q);
        const bool ok = sep >= prob.rho - 1e-6;
        const double val = pair_objective(sigma, p, q, prob.mode);
        if (ok && val < best.value) {
            best.value = val;
            best.p = p;
            best.q = q;
            best.feasible = true;
        }
    }
    return best;
}

}  // namespace detail

// Evaluates f(sigma): the inner worst-case separation under the problem's
// constraints, with the same solver the optimizer uses. The seed feeds the
// inner restarts directly, so a caller can reproduce any inner solve the
// optimizer performed.
inline double weight_objective(std::span<const double> sigma, const WeightProblem& prob,
                               std::uint64_t seed) {
    prob.validate();
    auto sol = detail::solve_inner(sigma, prob, seed);
    if (!sol.feasible)
        throw std::runtime_error("weight_objective: inner solver found no feasible pair");
    return sol.value;
}

// Outer maximization over the weight box {sigma >= 0, max_i sigma_i <= 1}
// (the simplex-vertex maximum of g makes the quadratic constraint a box) by
// projected supergradient ascent on the inner solution.
inline WeightResult optimize_weights(const WeightProblem& prob, std::uint64_t seed) {
    prob.validate();
    const int L = prob.bins;
    std::vector<double> sigma(L, 0.5);

    WeightResult best;
    best.sigma = sigma;
    best.achieved_f = -std::numeric_limits<double>::infinity();

    constexpr int kOuterIters = 40;
    for (int it = 0; it < kOuterIters; ++it) {
        auto sol = detail::solve_inner(sigma, prob, derive_seed(seed, "weights-outer", it));
        if (!sol.feasible) continue;
        if (sol.value > best.achieved_f) {
            best.achieved_f = sol.value;
            best.sigma = sigma;
            best.worst_pre = sol.p;
            best.worst_post = sol.q;
        }
        // supergradient of min-of-linear: the active pair's coefficients
        double gmax = 0.0;
        std::vector<double> grad(L);
        for (int i = 0; i < L; ++i) {
            const double diff = sol.p[i] - sol.q[i];
            if (prob.mode == WeightMode::absolute) {
                grad[i] = diff * diff;
            } else {
                const double denom = std::max(sol.q[i], 1e-6);
                grad[i] = (diff / denom) * (diff / denom);
            }
            gmax = std::max(gmax, std::abs(grad[i]));
        }
        if (gmax <= 0.0) break;
        const double step = 0.6 / (gmax * std::sqrt(static_cast<double>(it + 1)));
        for (int i = 0; i < L; ++i)
            sigma[i] = std::clamp(sigma[i] + step * grad[i], 0.0, 1.0);
    }

    // the all-ones point is always feasible; never return anything worse
    std::vector<double> ones(L, 1.0);
    auto ones_sol = detail::solve_inner(ones, prob, derive_seed(seed, "weights-ones"));
    if (ones_sol.feasible && ones_sol.value > best.achieved_f) {
        best.achieved_f = ones_sol.value;
        best.sigma = ones;
        best.worst_pre = ones_sol.p;
        best.worst_post = ones_sol.q;
    }
    if (!(best.achieved_f > -std::numeric_limits<double>::infinity()))
        throw std::runtime_error("optimize_weights: no feasible inner solution found");
    return best;
}

struct BinCountResult {
    int bins = 0;
    WeightResult weights;
};

// Scores each candidate bin count by rebinnning the training diagrams,
// anchoring the weight problem at the estimated pre/post distributions and
// optimizing; the candidate with the highest achieved objective wins, with
// ties going to the smaller count.
inline BinCountResult select_bin_count(std::span<const int> candidates,
                                       std::span<const TiltedDiagram> training_pre,
                                       std::span<const TiltedDiagram> training_post, double rho,
                                       WeightMode mode, std::uint64_t seed,
                                       std::span<const int> dims) {
    if (candidates.empty()) throw std::invalid_argument("select_bin_count: no candidates");
    if (training_pre.empty() || training_post.empty())
        throw std::invalid_argument("select_bin_count: empty training data");

    std::vector<int> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    BinCountResult best;
    double best_f = -std::numeric_limits<double>::infinity();
    for (int L : sorted) {
        HistogramBins bins = make_equal_width_bins(training_pre, L, dims);
        auto mean_omega = [&bins](std::span<const TiltedDiagram> diagrams) {
            std::vector<double> mean(bins.total_bins(), 0.0);
            for (const auto& d : diagrams) {
                auto h = bin_diagram(d, bins);
                for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += h.omega[i];
            }
            for (auto& v : mean) v /= static_cast<double>(diagrams.size());
            return mean;
        };
        WeightProblem prob;
        prob.bins = static_cast<int>(bins.total_bins());
        prob.rho = rho;
        prob.mode = mode;
        prob.anchor_pre = mean_omega(training_pre);
        prob.anchor_post = mean_omega(training_post);
        auto res = optimize_weights(prob, derive_seed(seed, "select-L", L));
        // the inner solver is approximate, so candidates within a 2% band
        // count as tied and the smaller L (visited first) is kept
        const double margin =
            best.bins == 0 ? -std::numeric_limits<double>::infinity()
                           : std::max(1e-9, 0.02 * std::abs(best_f));
        if (res.achieved_f > best_f + margin) {
            best_f = res.achieved_f;
            best.bins = L;
            best.weights = std::move(res);
        }
    }
    return best;
}

}  // namespace percept
