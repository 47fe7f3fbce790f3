#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "percept/binning.hpp"
#include "percept/detector.hpp"
#include "percept/lower_star.hpp"
#include "percept/persistence.hpp"
#include "percept/point_cloud.hpp"

namespace percept::io {

using nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

inline double parse_double(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw IoError("cannot parse number: '" + s + "'");
    }
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

}  // namespace detail

// ---- point cloud streams (packed CSV: frame,c0,...,c{d-1}) ----

inline void write_cloud_stream(const std::string& path,
                               std::span<const PointCloud> frames) {
    auto out = detail::open_out(path);
    std::size_t dim = 0;
    for (const auto& f : frames)
        if (f.size() > 0) dim = f.dim();
    out << "frame";
    for (std::size_t d = 0; d < dim; ++d) out << ",c" << d;
    out << "\n";
    for (std::size_t t = 0; t < frames.size(); ++t) {
        for (std::size_t i = 0; i < frames[t].size(); ++i) {
            out << (t + 1);
            for (std::size_t d = 0; d < frames[t].dim(); ++d)
                out << ',' << detail::format_double(frames[t][i][d]);
            out << "\n";
        }
    }
}

inline std::vector<PointCloud> read_cloud_stream(const std::string& path) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty stream file: " + path);
    std::vector<PointCloud> frames;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = detail::split(line, ',');
        if (fields.size() < 2) throw IoError("malformed stream row: " + line);
        const long frame = std::strtol(fields[0].c_str(), nullptr, 10);
        if (frame < 1) throw IoError("frame indices must start at 1");
        while (frames.size() < static_cast<std::size_t>(frame))
            frames.emplace_back(fields.size() - 1);
        std::vector<double> p(fields.size() - 1);
        for (std::size_t d = 0; d + 1 < fields.size(); ++d)
            p[d] = detail::parse_double(fields[d + 1]);
        frames[frame - 1].push_back(std::span<const double>(p.data(), p.size()));
    }
    if (frames.empty()) throw IoError("stream file has no frames: " + path);
    return frames;
}

// ---- single point cloud / time series (CSV, one row per point/step) ----

inline PointCloud read_point_matrix(const std::string& path) {
    auto in = detail::open_in(path);
    PointCloud cloud;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = detail::split(line, ',');
        if (first) {
            first = false;
            bool header = false;
            for (char c : fields[0])
                if (std::isalpha(static_cast<unsigned char>(c))) header = true;
            if (header) continue;
        }
        std::vector<double> p(fields.size());
        for (std::size_t d = 0; d < fields.size(); ++d) p[d] = detail::parse_double(fields[d]);
        cloud.push_back(std::span<const double>(p.data(), p.size()));
    }
    if (cloud.size() == 0) throw IoError("no rows in: " + path);
    return cloud;
}

// ---- images (plain PGM P2/P5 or CSV grid) ----

inline ImageGrid read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P2" && magic != "P5") throw IoError("not a PGM file: " + path);
    auto next_token = [&in, &path]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw IoError("truncated PGM: " + path);
    };
    const int cols = std::stoi(next_token());
    const int rows = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (cols < 1 || rows < 1 || maxval < 1) throw IoError("bad PGM header: " + path);
    ImageGrid img;
    img.rows = rows;
    img.cols = cols;
    img.values.resize(static_cast<std::size_t>(rows) * cols);
    if (magic == "P2") {
        for (auto& v : img.values) v = detail::parse_double(next_token());
    } else {
        in.get();  // single whitespace after maxval
        if (maxval > 255) throw IoError("P5 with maxval > 255 unsupported: " + path);
        std::vector<unsigned char> raw(img.values.size());
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!in) throw IoError("truncated PGM data: " + path);
        for (std::size_t i = 0; i < raw.size(); ++i) img.values[i] = raw[i];
    }
    return img;
}

inline void write_pgm(const std::string& path, const ImageGrid& img, int maxval = 255) {
    auto out = detail::open_out(path);
    out << "P2\n" << img.cols << ' ' << img.rows << '\n' << maxval << '\n';
    for (std::size_t r = 0; r < img.rows; ++r) {
        for (std::size_t c = 0; c < img.cols; ++c) {
            long v = std::lround(img.at(r, c));
            v = std::max(0l, std::min(static_cast<long>(maxval), v));
            out << v << (c + 1 < img.cols ? ' ' : '\n');
        }
    }
}

inline ImageGrid read_image_csv(const std::string& path) {
    auto in = detail::open_in(path);
    ImageGrid img;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = detail::split(line, ',');
        if (img.cols == 0) img.cols = fields.size();
        if (fields.size() != img.cols) throw IoError("ragged image rows in: " + path);
        for (const auto& f : fields) img.values.push_back(detail::parse_double(f));
        ++img.rows;
    }
    if (img.empty()) throw IoError("empty image: " + path);
    return img;
}

// ---- diagrams (JSON list of {birth, death|"inf", dim} per frame) ----

inline json diagram_to_json(const PersistenceDiagram& d) {
    json arr = json::array();
    for (const auto& f : d.features) {
        json item;
        item["birth"] = f.birth;
        if (f.essential())
            item["death"] = "inf";
        else
            item["death"] = f.death;
        item["dim"] = f.dim;
        arr.push_back(std::move(item));
    }
    return arr;
}

inline PersistenceDiagram diagram_from_json(const json& arr) {
    PersistenceDiagram d;
    for (const auto& item : arr) {
        Feature f;
        f.birth = item.at("birth").get<double>();
        const auto& death = item.at("death");
        f.death = death.is_string() ? kEssentialDeath : death.get<double>();
        f.dim = item.at("dim").get<int>();
        if (!f.essential() && !(f.death > f.birth))
            throw IoError("diagram feature with death <= birth");
        d.features.push_back(f);
    }
    return d;
}

inline void write_diagram_stream(const std::string& path,
                                 std::span<const PersistenceDiagram> diagrams) {
    json root;
    root["diagrams"] = json::array();
    for (const auto& d : diagrams) root["diagrams"].push_back(diagram_to_json(d));
    auto out = detail::open_out(path);
    out << root.dump(1, '\t') << "\n";
}

inline std::vector<PersistenceDiagram> read_diagram_stream(const std::string& path) {
    auto in = detail::open_in(path);
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw IoError(std::string("bad diagram JSON: ") + e.what());
    }
    std::vector<PersistenceDiagram> out;
    for (const auto& arr : root.at("diagrams")) out.push_back(diagram_from_json(arr));
    return out;
}

// ---- partitions ----

inline json partition_to_json(const Partition& partition) {
    json j;
    if (std::holds_alternative<HistogramBins>(partition)) {
        const auto& h = std::get<HistogramBins>(partition);
        j["type"] = "histogram";
        j["dims"] = h.dims;
        j["breakpoints"] = h.breakpoints;
    } else {
        const auto& v = std::get<VoronoiPartition>(partition);
        j["type"] = "voronoi";
        j["dims"] = v.dims;
        j["centers"] = json::array();
        for (const auto& c : v.centers) j["centers"].push_back({c[0], c[1]});
    }
    return j;
}

inline Partition partition_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "histogram") {
        HistogramBins h;
        h.dims = j.at("dims").get<std::vector<int>>();
        h.breakpoints = j.at("breakpoints").get<std::vector<std::vector<double>>>();
        return h;
    }
    if (type == "voronoi") {
        VoronoiPartition v;
        v.dims = j.at("dims").get<std::vector<int>>();
        for (const auto& c : j.at("centers"))
            v.centers.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
        return v;
    }
    throw IoError("unknown partition type: " + type);
}

// ---- traces (CSV: t,chi_max,k_star,alarm; shared by all methods) ----

inline void write_trace_csv(const std::string& path, const StatTrace& trace) {
    auto out = detail::open_out(path);
    out << "t,chi_max,k_star,alarm\n";
    for (const auto& row : trace.rows)
        out << row.t << ',' << detail::format_double(row.chi_max) << ',' << row.k_star << ','
            << (row.alarm ? 1 : 0) << "\n";
}

inline void write_value_trace_csv(const std::string& path,
                                  std::span<const std::pair<int, double>> rows,
                                  double threshold) {
    auto out = detail::open_out(path);
    out << "t,chi_max,k_star,alarm\n";
    for (const auto& [t, v] : rows)
        out << t << ',' << detail::format_double(v) << ",-1," << (v >= threshold ? 1 : 0)
            << "\n";
}

inline StatTrace read_trace_csv(const std::string& path) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty trace: " + path);
    StatTrace trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = detail::split(line, ',');
        if (fields.size() != 4) throw IoError("malformed trace row: " + line);
        TraceRow row;
        row.t = std::stoi(fields[0]);
        row.chi_max = detail::parse_double(fields[1]);
        row.k_star = std::stoi(fields[2]);
        row.alarm = fields[3] == "1";
        if (row.alarm && !trace.alarm_time) trace.alarm_time = row.t;
        trace.rows.push_back(row);
    }
    return trace;
}

inline json load_json(const std::string& path) {
    auto in = detail::open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(std::string("bad JSON in ") + path + ": " + e.what());
    }
    return j;
}

inline void save_json(const std::string& path, const json& j) {
    auto out = detail::open_out(path);
    out << j.dump(1, '\t') << "\n";
}

}  // namespace percept::io
