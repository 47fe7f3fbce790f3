// percept: command-line front end for the topological change-point pipeline.
//
// Subcommands: simulate | diagrams | calibrate | detect | baseline | arl-edd.
// Each reads one section of a JSON config file (the section named after the
// subcommand, or the whole file when no such section exists). Exit codes:
// 0 ok, 1 usage/config error, 2 data error, 3 numeric failure.

#include <CLI11.hpp>

#include <algorithm>
#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "percept/io.hpp"
#include "percept/percept.hpp"

namespace fs = std::filesystem;
using percept::io::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    json section;
    std::optional<std::uint64_t> seed_override;
    std::string out_dir;

    std::uint64_t seed(std::uint64_t fallback) const {
        if (seed_override) return *seed_override;
        if (section.contains("seed")) return section.at("seed").get<std::uint64_t>();
        return fallback;
    }

    std::string out_path(const std::string& configured) const {
        if (out_dir.empty() || fs::path(configured).is_absolute()) return configured;
        fs::create_directories(out_dir);
        return (fs::path(out_dir) / configured).string();
    }
};

json load_section(const std::string& config_path, const std::string& command) {
    auto root = percept::io::load_json(config_path);
    if (root.contains(command)) return root.at(command);
    return root;
}

double json_num(const json& j, const std::string& key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

int json_int(const json& j, const std::string& key, int fallback) {
    return j.contains(key) ? j.at(key).get<int>() : fallback;
}

std::string json_str(const json& j, const std::string& key, const std::string& fallback) {
    return j.contains(key) ? j.at(key).get<std::string>() : fallback;
}

std::string require_str(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing config key: " + key);
    return j.at(key).get<std::string>();
}

// ---- shared config fragments ----

percept::Scenario parse_scenario(const json& j, std::uint64_t seed) {
    percept::Scenario sc;
    const std::string kind = json_str(j, "kind", "noise_change");
    if (kind == "shape_change")
        sc.kind = percept::ScenarioKind::shape_change;
    else if (kind == "noise_change")
        sc.kind = percept::ScenarioKind::noise_change;
    else
        throw ConfigError("unknown scenario kind: " + kind);

    const int dim = json_int(j, "dim", 2);
    try {
        if (j.contains("pre_axes"))
            sc.pre_axes = j.at("pre_axes").get<std::vector<double>>();
        else
            sc.pre_axes = percept::geometry_axes(json_str(j, "geometry", "circle"), dim);
        if (j.contains("post_axes"))
            sc.post_axes = j.at("post_axes").get<std::vector<double>>();
        else if (j.contains("post_geometry"))
            sc.post_axes = percept::geometry_axes(j.at("post_geometry").get<std::string>(), dim);
        else
            sc.post_axes = sc.pre_axes;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    sc.sigma_pre = json_num(j, "sigma_pre", 0.05);
    sc.sigma_post = json_num(j, "sigma_post", 0.10);
    sc.frames = json_int(j, "frames", 400);
    sc.change_at = json_int(j, "change_at", 200);
    sc.points_per_frame = json_int(j, "points_per_frame", 100);
    sc.seed = seed;
    return sc;
}

percept::FiltrationConfig parse_filtration(const json& j) {
    percept::FiltrationConfig cfg;
    if (!j.contains("filtration")) return cfg;
    const auto& f = j.at("filtration");
    const std::string type = json_str(f, "type", "rips");
    if (type == "rips")
        cfg.kind = percept::FiltrationConfig::Kind::rips;
    else if (type == "lower_star")
        cfg.kind = percept::FiltrationConfig::Kind::lower_star;
    else
        throw ConfigError("unknown filtration type: " + type);
    cfg.max_radius = json_num(f, "max_radius", cfg.max_radius);
    cfg.max_dim = json_int(f, "max_dim", cfg.max_dim);
    return cfg;
}

percept::EssentialPolicy parse_policy(const json& j, const std::string& key) {
    if (!j.contains(key)) return percept::EssentialPolicy::drop();
    const auto& v = j.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() == "drop") return percept::EssentialPolicy::drop();
        throw ConfigError("essential policy must be \"drop\" or {\"cap\": value}");
    }
    if (v.is_object() && v.contains("cap"))
        return percept::EssentialPolicy::cap_at(v.at("cap").get<double>());
    throw ConfigError("essential policy must be \"drop\" or {\"cap\": value}");
}

percept::EssentialConfig parse_essential(const json& j) {
    percept::EssentialConfig cfg;
    if (!j.contains("essential")) return cfg;
    const auto& e = j.at("essential");
    cfg.h0 = parse_policy(e, "h0");
    cfg.h1 = parse_policy(e, "h1");
    return cfg;
}

json essential_to_json(const percept::EssentialConfig& cfg) {
    auto one = [](const percept::EssentialPolicy& p) -> json {
        if (p.kind == percept::EssentialPolicy::Kind::drop) return "drop";
        return json{{"cap", p.cap_value}};
    };
    return json{{"h0", one(cfg.h0)}, {"h1", one(cfg.h1)}};
}

percept::PartitionSpec parse_partition_spec(const json& j) {
    percept::PartitionSpec spec;
    if (!j.contains("partition")) throw ConfigError("missing config key: partition");
    const auto& p = j.at("partition");
    const std::string type = json_str(p, "type", "voronoi");
    if (type == "histogram") {
        const std::string placement = json_str(p, "placement", "equal_width");
        if (placement == "equal_width")
            spec.kind = percept::PartitionSpec::Kind::histogram_equal_width;
        else if (placement == "equal_mass")
            spec.kind = percept::PartitionSpec::Kind::histogram_equal_mass;
        else
            throw ConfigError("unknown histogram placement: " + placement);
        spec.bins = json_int(p, "bins", 10);
    } else if (type == "voronoi") {
        spec.kind = percept::PartitionSpec::Kind::voronoi;
        spec.k_pre = json_int(p, "k_pre", 3);
        spec.k_post = json_int(p, "k_post", 3);
    } else {
        throw ConfigError("unknown partition type: " + type);
    }
    if (p.contains("dims")) spec.dims = p.at("dims").get<std::vector<int>>();
    return spec;
}

// ---- subcommands ----

int cmd_simulate(const Context& ctx) {
    auto sc = parse_scenario(ctx.section, ctx.seed(1));
    auto frames = percept::generate_scenario(sc);
    const std::string out = ctx.out_path(json_str(ctx.section, "out", "stream.csv"));
    percept::io::write_cloud_stream(out, frames);
    std::cout << "wrote " << frames.size() << " frames to " << out << "\n";
    return 0;
}

std::vector<percept::PersistenceDiagram> diagrams_from_config(const Context& ctx) {
    const std::string modality = json_str(ctx.section, "modality", "pointcloud");
    const std::string input = require_str(ctx.section, "input");
    auto filt = parse_filtration(ctx.section);

    if (modality == "pointcloud") {
        if (filt.kind != percept::FiltrationConfig::Kind::rips)
            throw ConfigError("pointcloud modality requires a rips filtration");
        auto frames = percept::io::read_cloud_stream(input);
        for (const auto& f : frames)
            if (f.size() == 0) throw percept::io::IoError("empty frame in " + input);
        return percept::diagrams_for_clouds(frames, filt);
    }
    if (modality == "timeseries") {
        if (filt.kind != percept::FiltrationConfig::Kind::rips)
            throw ConfigError("timeseries modality requires a rips filtration");
        const int window = ctx.section.contains("takens")
                               ? json_int(ctx.section.at("takens"), "window", 10)
                               : 10;
        auto series = percept::io::read_point_matrix(input);
        std::vector<percept::PersistenceDiagram> out;
        for (int t = window - 1; t < static_cast<int>(series.size()); ++t)
            out.push_back(
                percept::diagram_for_cloud(percept::takens_embed(series, window, t), filt));
        if (out.empty())
            throw percept::io::IoError("series shorter than the embedding window");
        return out;
    }
    if (modality == "image") {
        if (ctx.section.contains("filtration") &&
            filt.kind != percept::FiltrationConfig::Kind::lower_star)
            throw ConfigError("image modality requires a lower_star filtration");
        std::vector<std::string> files;
        if (fs::is_directory(input)) {
            for (const auto& entry : fs::directory_iterator(input)) {
                const auto ext = entry.path().extension().string();
                if (ext == ".pgm" || ext == ".csv") files.push_back(entry.path().string());
            }
            std::sort(files.begin(), files.end());
        } else {
            files.push_back(input);
        }
        if (files.empty()) throw percept::io::IoError("no images found in " + input);
        std::vector<percept::PersistenceDiagram> out;
        for (const auto& f : files) {
            auto img = fs::path(f).extension() == ".pgm" ? percept::io::read_pgm(f)
                                                         : percept::io::read_image_csv(f);
            out.push_back(percept::diagram_for_image(img));
        }
        return out;
    }
    throw ConfigError("unknown modality: " + modality);
}

int cmd_diagrams(const Context& ctx) {
    auto diagrams = diagrams_from_config(ctx);
    const std::string out = ctx.out_path(json_str(ctx.section, "out", "diagrams.json"));
    percept::io::write_diagram_stream(out, diagrams);
    std::cout << "wrote " << diagrams.size() << " diagrams to " << out << "\n";
    return 0;
}

int cmd_calibrate(const Context& ctx) {
    const auto& j = ctx.section;
    const std::uint64_t seed = ctx.seed(7);
    auto essential = parse_essential(j);
    auto spec = parse_partition_spec(j);

    auto pre_diagrams = percept::io::read_diagram_stream(require_str(j, "diagrams"));
    std::vector<percept::PersistenceDiagram> post_diagrams;
    if (j.contains("post_diagrams"))
        post_diagrams =
            percept::io::read_diagram_stream(j.at("post_diagrams").get<std::string>());

    auto pre_tilted = percept::tilt_stream(pre_diagrams, essential);
    auto post_tilted = percept::tilt_stream(post_diagrams, essential);

    const json wj = j.contains("weights") ? j.at("weights") : json::object();
    std::optional<percept::BinCountResult> selected;
    if (wj.contains("bin_candidates")) {
        if (spec.kind != percept::PartitionSpec::Kind::histogram_equal_width)
            throw ConfigError("bin_candidates requires an equal-width histogram partition");
        if (post_tilted.empty())
            throw ConfigError("bin-count selection requires post_diagrams training data");
        auto candidates = wj.at("bin_candidates").get<std::vector<int>>();
        selected = percept::select_bin_count(
            candidates, pre_tilted, post_tilted, json_num(wj, "rho", 0.1),
            json_str(wj, "mode", "absolute") == "relative" ? percept::WeightMode::relative
                                                           : percept::WeightMode::absolute,
            percept::derive_seed(seed, "bin-count"), spec.dims);
        spec.bins = selected->bins;
    }

    auto partition = percept::fit_partition(spec, pre_tilted, post_tilted,
                                            percept::derive_seed(seed, "partition"));
    const std::size_t bins = percept::partition_bins(partition);
    auto pool = percept::bin_stream(pre_tilted, partition);

    std::vector<double> weights(bins, 1.0);
    double achieved_f = 0.0;
    const std::string source = json_str(wj, "source", "uniform");
    if (source == "file") {
        weights = percept::io::load_json(require_str(wj, "file")).get<std::vector<double>>();
        if (weights.size() != bins) throw ConfigError("weights file length mismatch");
    } else if (source == "optimize") {
        if (post_tilted.empty())
            throw ConfigError("weight optimization requires post_diagrams training data");
        if (selected) {
            // the bin-count search already optimized weights for the winner
            weights = selected->weights.sigma;
            achieved_f = selected->weights.achieved_f;
        } else {
            percept::WeightProblem prob;
            prob.bins = static_cast<int>(bins);
            prob.rho = json_num(wj, "rho", 0.1);
            prob.mode = json_str(wj, "mode", "absolute") == "relative"
                            ? percept::WeightMode::relative
                            : percept::WeightMode::absolute;
            prob.anchor_pre = percept::pool_distribution(pool);
            prob.anchor_post =
                percept::pool_distribution(percept::bin_stream(post_tilted, partition));
            auto res = percept::optimize_weights(prob, percept::derive_seed(seed, "weights"));
            weights = res.sigma;
            achieved_f = res.achieved_f;
        }
    } else if (source != "uniform") {
        throw ConfigError("unknown weights source: " + source);
    }

    percept::DetectorConfig cfg;
    cfg.weights = weights;
    cfg.m0 = json_int(j, "m0", 20);
    cfg.m1 = json_int(j, "m1", 80);

    double threshold;
    double estimated_arl = std::numeric_limits<double>::quiet_NaN();
    const json tj = j.contains("threshold") ? j.at("threshold") : json::object();
    if (tj.contains("value")) {
        threshold = tj.at("value").get<double>();
    } else {
        auto cal = percept::calibrate_threshold(
            json_num(tj, "target_arl", 2000.0), pool, cfg, json_int(tj, "sequences", 200),
            json_int(tj, "length", 2000), percept::derive_seed(seed, "calibrate"));
        threshold = cal.threshold;
        estimated_arl = cal.estimated_arl;
    }

    json out;
    out["partition"] = percept::io::partition_to_json(partition);
    out["essential"] = essential_to_json(essential);
    out["weights"] = weights;
    out["threshold"] = threshold;
    out["m0"] = cfg.m0;
    out["m1"] = cfg.m1;
    out["seed"] = seed;
    json meta;
    meta["bins"] = bins;
    meta["training_frames"] = pre_diagrams.size();
    if (std::isfinite(estimated_arl)) meta["estimated_arl"] = estimated_arl;
    if (achieved_f > 0.0) meta["weight_objective"] = achieved_f;
    auto p_hat = percept::pool_distribution(pool);
    meta["p_pre"] = p_hat;
    if (threshold > 0.0) {
        try {
            meta["arl_approximation"] =
                percept::arl_approximation(threshold, p_hat, weights, cfg.m0, cfg.m1);
        } catch (const std::exception&) {
            // degenerate p_hat: the closed-form value is advisory only
        }
    }
    out["meta"] = meta;
    const std::string path = ctx.out_path(json_str(j, "out", "calibration.json"));
    percept::io::save_json(path, out);
    std::cout << "calibration written to " << path << " (threshold " << threshold << ")\n";
    return 0;
}

struct Calibration {
    percept::Partition partition;
    percept::EssentialConfig essential;
    percept::DetectorConfig config;
};

Calibration load_calibration(const std::string& path) {
    auto j = percept::io::load_json(path);
    Calibration cal{percept::io::partition_from_json(j.at("partition")),
                    percept::EssentialConfig{}, percept::DetectorConfig{}};
    if (j.contains("essential")) {
        cal.essential.h0 = parse_policy(j.at("essential"), "h0");
        cal.essential.h1 = parse_policy(j.at("essential"), "h1");
    }
    cal.config.weights = j.at("weights").get<std::vector<double>>();
    cal.config.threshold = j.at("threshold").get<double>();
    cal.config.m0 = json_int(j, "m0", 20);
    cal.config.m1 = json_int(j, "m1", 80);
    return cal;
}

int cmd_detect(const Context& ctx) {
    const auto& j = ctx.section;
    auto diagrams = percept::io::read_diagram_stream(require_str(j, "diagrams"));
    auto cal = load_calibration(require_str(j, "calibration"));
    auto tilted = percept::tilt_stream(diagrams, cal.essential);
    auto stream = percept::bin_stream(tilted, cal.partition);
    auto trace = percept::run_detector(stream, cal.config);

    const std::string trace_path = ctx.out_path(json_str(j, "out_trace", "trace.csv"));
    percept::io::write_trace_csv(trace_path, trace);

    json summary;
    summary["frames"] = stream.size();
    summary["threshold"] = cal.config.threshold;
    summary["alarm_time"] = trace.alarm_time ? json(*trace.alarm_time) : json(nullptr);
    percept::io::save_json(ctx.out_path(json_str(j, "out_summary", "alarm.json")), summary);
    std::cout << "trace written to " << trace_path << "; alarm "
              << (trace.alarm_time ? std::to_string(*trace.alarm_time) : std::string("none"))
              << "\n";
    return 0;
}

int cmd_baseline(const Context& ctx) {
    const auto& j = ctx.section;
    const std::string method = require_str(j, "method");
    const double threshold = json_num(j, "threshold", std::numeric_limits<double>::infinity());
    const std::string trace_path = ctx.out_path(json_str(j, "out_trace", "baseline_trace.csv"));

    // vectorized frame matrix for hotelling/mmd: point-cloud streams flatten
    // per frame, image directories flatten per image
    auto load_matrix = [&j]() {
        const std::string modality = json_str(j, "modality", "pointcloud");
        const std::string input = require_str(j, "input");
        if (modality == "pointcloud")
            return std::pair<Eigen::MatrixXd, bool>(
                percept::vectorize_clouds(percept::io::read_cloud_stream(input)), false);
        if (modality == "image") {
            std::vector<std::string> files;
            if (fs::is_directory(input)) {
                for (const auto& entry : fs::directory_iterator(input)) {
                    const auto ext = entry.path().extension().string();
                    if (ext == ".pgm" || ext == ".csv") files.push_back(entry.path().string());
                }
                std::sort(files.begin(), files.end());
            } else {
                files.push_back(input);
            }
            if (files.empty()) throw percept::io::IoError("no images found in " + input);
            std::vector<percept::ImageGrid> images;
            for (const auto& f : files)
                images.push_back(fs::path(f).extension() == ".pgm"
                                     ? percept::io::read_pgm(f)
                                     : percept::io::read_image_csv(f));
            return std::pair<Eigen::MatrixXd, bool>(percept::vectorize_images(images), true);
        }
        throw ConfigError("unknown modality: " + modality);
    };

    std::vector<std::pair<int, double>> rows;
    if (method == "wasserstein") {
        auto diagrams = percept::io::read_diagram_stream(require_str(j, "diagrams"));
        auto values = percept::wasserstein_detector(diagrams);
        for (std::size_t t = 0; t < values.size(); ++t)
            rows.emplace_back(static_cast<int>(t + 1), values[t]);
    } else if (method == "hotelling") {
        auto [matrix, is_image] = load_matrix();
        const int train =
            json_int(j, "training_frames", static_cast<int>(matrix.rows()) / 2);
        if (train < 2 || train > matrix.rows())
            throw ConfigError("hotelling: training_frames out of range");
        // 15 components for simulated point clouds, 30 for image pipelines
        auto pca = percept::fit_pca(matrix.topRows(train),
                                    json_int(j, "pca_components", is_image ? 30 : 15));
        Eigen::MatrixXd projected = percept::pca_project_rows(pca, matrix);
        auto model =
            percept::fit_hotelling(projected.topRows(train), json_int(j, "window", 10),
                                   json_num(j, "drift_quantile", 0.9));
        auto values = percept::hotelling_cusum(projected, model);
        for (std::size_t t = 0; t < values.size(); ++t)
            rows.emplace_back(static_cast<int>(t + 1), values[t]);
    } else if (method == "mmd") {
        auto [matrix, is_image] = load_matrix();
        auto points = percept::mmd_detector(matrix, json_int(j, "window_pre", 40),
                                            json_int(j, "window_post", 40));
        for (const auto& p : points) rows.emplace_back(p.t, p.value);
    } else {
        throw ConfigError("unknown baseline method: " + method);
    }
    percept::io::write_value_trace_csv(trace_path, rows, threshold);
    std::cout << "trace written to " << trace_path << "\n";
    return 0;
}

// ---- arl-edd ----

struct MethodSim {
    std::function<std::vector<double>(int n_seq, int m, std::uint64_t seed)> prechange_maxima;
    std::function<std::vector<percept::EddResult>(std::span<const double> thresholds, int n_seq,
                                                  int m_pre, int m_post, std::uint64_t seed)>
        edd;
};

// Hotelling CUSUM over pool-resampled sequences, with first-crossing delays
// extracted for every threshold in one pass.
MethodSim hotelling_sim(std::vector<Eigen::VectorXd> pre_pool,
                        std::vector<Eigen::VectorXd> post_pool, percept::HotellingModel model) {
    auto shared = std::make_shared<percept::HotellingModel>(std::move(model));
    auto pre = std::make_shared<std::vector<Eigen::VectorXd>>(std::move(pre_pool));
    auto post = std::make_shared<std::vector<Eigen::VectorXd>>(std::move(post_pool));

    struct Walker {
        const percept::HotellingModel& model;
        double state = 0.0;
        Eigen::VectorXd sum;
        std::deque<const Eigen::VectorXd*> ring;
        explicit Walker(const percept::HotellingModel& m)
            : model(m), sum(Eigen::VectorXd::Zero(m.mean.size())) {}
        double step(const Eigen::VectorXd& x) {
            ring.push_back(&x);
            sum += x;
            if (static_cast<int>(ring.size()) > model.window + 1) {
                sum -= *ring.front();
                ring.pop_front();
            }
            const Eigen::VectorXd d = sum / static_cast<double>(ring.size()) - model.mean;
            state = std::max(state + d.dot(model.cov_inverse * d) - model.drift, 0.0);
            return state;
        }
    };

    MethodSim sim;
    sim.prechange_maxima = [pre, shared](int n_seq, int m, std::uint64_t seed) {
        std::vector<double> maxima(n_seq, 0.0);
        for (int s = 0; s < n_seq; ++s) {
            auto rng = percept::make_rng(seed, "hot-arl", s);
            std::uniform_int_distribution<std::size_t> pick(0, pre->size() - 1);
            Walker w(*shared);
            // warm the averaging window so ramp-up quadratic forms do not
            // contaminate the maxima
            for (int t = 0; t <= shared->window; ++t) w.step((*pre)[pick(rng)]);
            w.state = 0.0;
            double best = 0.0;
            for (int t = 0; t < m; ++t) best = std::max(best, w.step((*pre)[pick(rng)]));
            maxima[s] = best;
        }
        return maxima;
    };
    sim.edd = [pre, post, shared](std::span<const double> thresholds, int n_seq, int m_pre,
                                  int m_post, std::uint64_t seed) {
        std::vector<percept::EddResult> results(thresholds.size());
        for (auto& r : results) r.delays.assign(n_seq, m_post);
        for (int s = 0; s < n_seq; ++s) {
            auto rng = percept::make_rng(seed, "hot-edd", s);
            std::uniform_int_distribution<std::size_t> pre_pick(0, pre->size() - 1);
            std::uniform_int_distribution<std::size_t> post_pick(0, post->size() - 1);
            Walker w(*shared);
            for (int t = 0; t < m_pre; ++t) w.step((*pre)[pre_pick(rng)]);
            std::size_t next = 0;
            for (int tau = 1; tau <= m_post && next < thresholds.size(); ++tau) {
                const double v = w.step((*post)[post_pick(rng)]);
                while (next < thresholds.size() && v >= thresholds[next]) {
                    results[next].delays[s] = tau;
                    ++next;
                }
            }
            for (std::size_t b = next; b < thresholds.size(); ++b) ++results[b].censored;
        }
        for (auto& r : results) {
            double total = 0.0;
            for (int d : r.delays) total += d;
            r.mean_delay = total / n_seq;
        }
        return results;
    };
    return sim;
}

// Adjacent-frame Wasserstein statistic over pool-resampled diagram
// sequences. Pairwise distances between pool members are memoized; the
// matrix fills lazily as pairs are drawn.
MethodSim wasserstein_sim(std::vector<percept::PersistenceDiagram> pre_pool,
                          std::vector<percept::PersistenceDiagram> post_pool) {
    struct Shared {
        std::vector<percept::PersistenceDiagram> pool;  // pre then post
        std::size_t n_pre = 0;
        std::vector<double> dist;  // flattened, NaN = not yet computed
        double at(std::size_t i, std::size_t j) {
            if (i > j) std::swap(i, j);
            double& v = dist[i * pool.size() + j];
            if (std::isnan(v)) v = percept::wasserstein1_distance(pool[i], pool[j]);
            return v;
        }
    };
    auto shared = std::make_shared<Shared>();
    shared->n_pre = pre_pool.size();
    shared->pool = std::move(pre_pool);
    shared->pool.insert(shared->pool.end(), std::make_move_iterator(post_pool.begin()),
                        std::make_move_iterator(post_pool.end()));
    shared->dist.assign(shared->pool.size() * shared->pool.size(),
                        std::numeric_limits<double>::quiet_NaN());

    MethodSim sim;
    sim.prechange_maxima = [shared](int n_seq, int m, std::uint64_t seed) {
        std::vector<double> maxima(n_seq, 0.0);
        for (int s = 0; s < n_seq; ++s) {
            auto rng = percept::make_rng(seed, "w-arl", s);
            std::uniform_int_distribution<std::size_t> pick(0, shared->n_pre - 1);
            std::size_t prev = pick(rng);
            double best = 0.0;
            for (int t = 1; t < m; ++t) {
                const std::size_t cur = pick(rng);
                best = std::max(best, shared->at(prev, cur));
                prev = cur;
            }
            maxima[s] = best;
        }
        return maxima;
    };
    sim.edd = [shared](std::span<const double> thresholds, int n_seq, int m_pre, int m_post,
                       std::uint64_t seed) {
        std::vector<percept::EddResult> results(thresholds.size());
        for (auto& r : results) r.delays.assign(n_seq, m_post);
        for (int s = 0; s < n_seq; ++s) {
            auto rng = percept::make_rng(seed, "w-edd", s);
            std::uniform_int_distribution<std::size_t> pre_pick(0, shared->n_pre - 1);
            std::uniform_int_distribution<std::size_t> post_pick(
                shared->n_pre, shared->pool.size() - 1);
            std::size_t prev = pre_pick(rng);
            for (int t = 1; t < m_pre; ++t) prev = pre_pick(rng);
            std::size_t next_b = 0;
            for (int tau = 1; tau <= m_post && next_b < thresholds.size(); ++tau) {
                const std::size_t cur = post_pick(rng);
                const double v = shared->at(prev, cur);
                prev = cur;
                while (next_b < thresholds.size() && v >= thresholds[next_b]) {
                    results[next_b].delays[s] = tau;
                    ++next_b;
                }
            }
            for (std::size_t b = next_b; b < thresholds.size(); ++b) ++results[b].censored;
        }
        for (auto& r : results) {
            double total = 0.0;
            for (int d : r.delays) total += d;
            r.mean_delay = total / n_seq;
        }
        return results;
    };
    return sim;
}

// Sliding-window MMD over pool-resampled frame sequences; the bandwidth is
// recomputed per step via the median heuristic, which makes this the most
// expensive of the four simulators.
MethodSim mmd_sim(Eigen::MatrixXd pre_rows, Eigen::MatrixXd post_rows, int w_pre, int w_post) {
    struct Shared {
        Eigen::MatrixXd pre, post;
        int w_pre, w_post;

        double statistic(const std::deque<std::pair<bool, int>>& window) const {
            Eigen::MatrixXd both(w_pre + w_post, pre.cols());
            for (int i = 0; i < w_pre + w_post; ++i) {
                const auto& [is_post, idx] = window[i];
                both.row(i) = is_post ? post.row(idx) : pre.row(idx);
            }
            const double bw = percept::median_heuristic(both);
            return percept::mmd_statistic(both.topRows(w_pre), both.bottomRows(w_post), bw);
        }
    };
    auto shared = std::make_shared<Shared>();
    shared->pre = std::move(pre_rows);
    shared->post = std::move(post_rows);
    shared->w_pre = w_pre;
    shared->w_post = w_post;
    const int fill = w_pre + w_post;

    MethodSim sim;
    sim.prechange_maxima = [shared, fill](int n_seq, int m, std::uint64_t seed) {
        std::vector<double> maxima(n_seq, 0.0);
        for (int s = 0; s < n_seq; ++s) {
            auto rng = percept::make_rng(seed, "mmd-arl", s);
            std::uniform_int_distribution<int> pick(0, static_cast<int>(shared->pre.rows()) - 1);
            std::deque<std::pair<bool, int>> window;
            double best = 0.0;
            for (int t = 0; t < m; ++t) {
                window.emplace_back(false, pick(rng));
                if (static_cast<int>(window.size()) > fill) window.pop_front();
                if (static_cast<int>(window.size()) == fill)
                    best = std::max(best, shared->statistic(window));
            }
            maxima[s] = best;
        }
        return maxima;
    };
    sim.edd = [shared, fill](std::span<const double> thresholds, int n_seq, int m_pre,
                             int m_post, std::uint64_t seed) {
        std::vector<percept::EddResult> results(thresholds.size());
        for (auto& r : results) r.delays.assign(n_seq, m_post);
        for (int s = 0; s < n_seq; ++s) {
            auto rng = percept::make_rng(seed, "mmd-edd", s);
            std::uniform_int_distribution<int> pre_pick(0,
                                                        static_cast<int>(shared->pre.rows()) - 1);
            std::uniform_int_distribution<int> post_pick(
                0, static_cast<int>(shared->post.rows()) - 1);
            std::deque<std::pair<bool, int>> window;
            for (int t = 0; t < std::max(m_pre, fill); ++t) {
                window.emplace_back(false, pre_pick(rng));
                if (static_cast<int>(window.size()) > fill) window.pop_front();
            }
            std::size_t next_b = 0;
            for (int tau = 1; tau <= m_post && next_b < thresholds.size(); ++tau) {
                window.emplace_back(true, post_pick(rng));
                if (static_cast<int>(window.size()) > fill) window.pop_front();
                const double v = shared->statistic(window);
                while (next_b < thresholds.size() && v >= thresholds[next_b]) {
                    results[next_b].delays[s] = tau;
                    ++next_b;
                }
            }
            for (std::size_t b = next_b; b < thresholds.size(); ++b) ++results[b].censored;
        }
        for (auto& r : results) {
            double total = 0.0;
            for (int d : r.delays) total += d;
            r.mean_delay = total / n_seq;
        }
        return results;
    };
    return sim;
}

MethodSim percept_sim(std::vector<std::vector<double>> pre_pool,
                      std::vector<std::vector<double>> post_pool, percept::DetectorConfig cfg) {
    auto pre = std::make_shared<std::vector<std::vector<double>>>(std::move(pre_pool));
    auto post = std::make_shared<std::vector<std::vector<double>>>(std::move(post_pool));
    auto shared_cfg = std::make_shared<percept::DetectorConfig>(std::move(cfg));

    MethodSim sim;
    sim.prechange_maxima = [pre, shared_cfg](int n_seq, int m, std::uint64_t seed) {
        return percept::simulate_scan_maxima(*pre, *shared_cfg, n_seq, m, seed);
    };
    sim.edd = [pre, post, shared_cfg](std::span<const double> thresholds, int n_seq, int m_pre,
                                      int m_post, std::uint64_t seed) {
        std::vector<percept::EddResult> results;
        results.reserve(thresholds.size());
        for (double b : thresholds)
            results.push_back(
                percept::estimate_edd(*pre, *post, b, *shared_cfg, n_seq, m_pre, m_post, seed));
        return results;
    };
    return sim;
}

int cmd_arl_edd(const Context& ctx) {
    const auto& j = ctx.section;
    const std::uint64_t seed = ctx.seed(11);
    const std::string method = json_str(j, "method", "percept");

    auto scenario_section = j.contains("scenario") ? j.at("scenario") : j;
    auto base = parse_scenario(scenario_section, 0);
    const int n_train = json_int(j, "train_frames", 150);
    const int n_pool = json_int(j, "pool_frames", 300);

    auto make_clouds = [&base](bool post, int count, std::uint64_t stream_seed) {
        std::vector<percept::PointCloud> frames;
        frames.reserve(count);
        for (int t = 0; t < count; ++t) {
            auto rng = percept::make_rng(stream_seed, "frame", t);
            frames.push_back(percept::sample_shape(post ? base.post_axes : base.pre_axes,
                                                   base.points_per_frame,
                                                   post ? base.sigma_post : base.sigma_pre,
                                                   rng));
        }
        return frames;
    };

    auto train_pre = make_clouds(false, n_train, percept::derive_seed(seed, "train-pre"));
    auto train_post = make_clouds(true, n_train, percept::derive_seed(seed, "train-post"));
    auto pool_pre = make_clouds(false, n_pool, percept::derive_seed(seed, "pool-pre"));
    auto pool_post = make_clouds(true, n_pool, percept::derive_seed(seed, "pool-post"));

    const int m0 = json_int(j, "m0", 20);
    MethodSim sim;
    if (method == "percept") {
        auto filt = parse_filtration(j);
        auto essential = parse_essential(j);
        auto spec = parse_partition_spec(j);
        auto tilt_pre =
            percept::tilt_stream(percept::diagrams_for_clouds(train_pre, filt), essential);
        auto tilt_post =
            percept::tilt_stream(percept::diagrams_for_clouds(train_post, filt), essential);
        auto partition = percept::fit_partition(spec, tilt_pre, tilt_post,
                                                percept::derive_seed(seed, "partition"));
        auto f_pre = percept::bin_stream(
            percept::tilt_stream(percept::diagrams_for_clouds(pool_pre, filt), essential),
            partition);
        auto f_post = percept::bin_stream(
            percept::tilt_stream(percept::diagrams_for_clouds(pool_post, filt), essential),
            partition);
        percept::DetectorConfig cfg;
        cfg.weights.assign(percept::partition_bins(partition), 1.0);
        cfg.m0 = m0;
        cfg.m1 = json_int(j, "m1", 80);
        sim = percept_sim(std::move(f_pre), std::move(f_post), cfg);
    } else if (method == "hotelling") {
        auto train_rows = percept::vectorize_clouds(train_pre);
        auto pca = percept::fit_pca(train_rows, json_int(j, "pca_components", 15));
        auto model = percept::fit_hotelling(percept::pca_project_rows(pca, train_rows),
                                            json_int(j, "hotelling_window", 10),
                                            json_num(j, "drift_quantile", 0.9));
        std::vector<Eigen::VectorXd> pre_vecs, post_vecs;
        for (const auto& c : pool_pre)
            pre_vecs.push_back(percept::pca_project(pca, percept::vectorize_cloud(c)));
        for (const auto& c : pool_post)
            post_vecs.push_back(percept::pca_project(pca, percept::vectorize_cloud(c)));
        sim = hotelling_sim(std::move(pre_vecs), std::move(post_vecs), std::move(model));
    } else if (method == "wasserstein") {
        auto filt = parse_filtration(j);
        sim = wasserstein_sim(percept::diagrams_for_clouds(pool_pre, filt),
                              percept::diagrams_for_clouds(pool_post, filt));
    } else if (method == "mmd") {
        sim = mmd_sim(percept::vectorize_clouds(pool_pre), percept::vectorize_clouds(pool_post),
                      json_int(j, "window_pre", 40), json_int(j, "window_post", 40));
    } else {
        throw ConfigError("unknown arl-edd method: " + method);
    }

    // the per-step median bandwidth makes MMD sequences far more expensive;
    // its defaults are scaled down accordingly
    const bool slow = method == "mmd";
    const int n_seq = json_int(j, "sequences", slow ? 50 : 200);
    const int arl_length = json_int(j, "arl_length", slow ? 600 : 2000);
    const int edd_history = json_int(j, "edd_history",
                                     slow ? json_int(j, "window_pre", 40) +
                                                json_int(j, "window_post", 40)
                                          : 2 * (m0 / 2));
    const int edd_length = json_int(j, "edd_length", slow ? 600 : 2000);

    auto maxima = sim.prechange_maxima(n_seq, arl_length, percept::derive_seed(seed, "arl"));
    std::vector<double> sorted = maxima;
    std::sort(sorted.begin(), sorted.end());
    auto arl_at = [&](double b) {
        const auto below =
            std::count_if(maxima.begin(), maxima.end(), [b](double v) { return v < b; });
        return percept::arl_from_survival(static_cast<double>(below) / maxima.size(),
                                          arl_length);
    };

    std::vector<double> thresholds;
    if (j.contains("threshold_grid")) {
        thresholds = j.at("threshold_grid").get<std::vector<double>>();
        if (thresholds.empty()) throw ConfigError("threshold_grid must be nonempty");
    } else {
        std::vector<double> targets{500.0, 1000.0, 2000.0};
        if (j.contains("arl_targets")) targets = j.at("arl_targets").get<std::vector<double>>();
        if (targets.empty()) throw ConfigError("arl_targets must be nonempty");
        for (double target : targets) {
            auto it = std::find_if(sorted.begin(), sorted.end(),
                                   [&](double b) { return arl_at(b) >= target; });
            if (it == sorted.end())
                throw std::runtime_error("arl-edd: target ARL " + std::to_string(target) +
                                         " unreachable with simulated maxima");
            thresholds.push_back(*it);
        }
    }
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    auto edd_results =
        sim.edd(thresholds, n_seq, edd_history, edd_length, percept::derive_seed(seed, "edd"));

    const std::string out = ctx.out_path(json_str(j, "out", "curve.csv"));
    auto os = percept::io::detail::open_out(out);
    os << "log_ARL,EDD,arl,threshold,censored_fraction,method,sigma_post\n";
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const double arl = arl_at(thresholds[i]);
        os << percept::io::detail::format_double(std::log(arl)) << ','
           << percept::io::detail::format_double(edd_results[i].mean_delay) << ','
           << percept::io::detail::format_double(arl) << ','
           << percept::io::detail::format_double(thresholds[i]) << ','
           << percept::io::detail::format_double(
                  static_cast<double>(edd_results[i].censored) / n_seq)
           << ',' << method << ',' << percept::io::detail::format_double(base.sigma_post)
           << "\n";
    }
    std::cout << "curve written to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"percept: topological online change-point detection"};
    app.require_subcommand(1);

    std::string config_path;
    std::string seed_text;
    std::string out_dir;

    std::map<std::string, int (*)(const Context&)> handlers{
        {"simulate", &cmd_simulate},   {"diagrams", &cmd_diagrams},
        {"calibrate", &cmd_calibrate}, {"detect", &cmd_detect},
        {"baseline", &cmd_baseline},   {"arl-edd", &cmd_arl_edd},
    };
    const std::map<std::string, std::string> descriptions{
        {"simulate", "generate a synthetic scenario stream"},
        {"diagrams", "compute persistence diagrams for a stream"},
        {"calibrate", "fit partition/weights and calibrate the threshold"},
        {"detect", "run the online detector over a diagram stream"},
        {"baseline", "run a comparison detector (hotelling | mmd | wasserstein)"},
        {"arl-edd", "Monte-Carlo ARL vs EDD curves (percept | hotelling)"},
    };
    for (auto& [name, handler] : handlers) {
        auto* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed_text, "override the config seed");
        sub->add_option("--out", out_dir, "directory for outputs");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        std::optional<std::uint64_t> seed_override;
        if (!seed_text.empty()) seed_override = std::stoull(seed_text);
        Context ctx{load_section(config_path, command), seed_override, out_dir};
        return handlers.at(command)(ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const percept::io::IoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
