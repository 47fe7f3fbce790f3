#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "percept/simplex.hpp"

namespace percept {

// 2-D grid of intensity values, row-major.
struct ImageGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    bool empty() const { return rows == 0 || cols == 0; }
};

// Lower-star (sublevel set) filtration of a triangulated image grid. Pixels
// are vertices at their intensity; edges join horizontal, vertical and
// diagonal neighbours at the max of their endpoints; each grid cell carries
// the top-left-to-bottom-right diagonal and two triangular faces at the max
// of their vertices.
inline Filtration build_lower_star_filtration(const ImageGrid& image) {
    if (image.empty())
        throw std::invalid_argument("build_lower_star_filtration: empty grid");
    if (image.values.size() != image.rows * image.cols)
        throw std::invalid_argument("build_lower_star_filtration: size mismatch");
    for (double v : image.values)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument(
                "build_lower_star_filtration: intensities must be finite and nonnegative");

    const int rows = static_cast<int>(image.rows);
    const int cols = static_cast<int>(image.cols);
    auto id = [cols](int r, int c) { return r * cols + c; };

    Filtration f;
    f.entries.reserve(static_cast<std::size_t>(rows) * cols * 6);

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            f.entries.push_back({Simplex::vertex(id(r, c)), image.at(r, c)});

    auto add_edge = [&](int r1, int c1, int r2, int c2) {
        const double v = std::max(image.at(r1, c1), image.at(r2, c2));
        f.entries.push_back({Simplex::edge(id(r1, c1), id(r2, c2)), v});
    };
    auto add_triangle = [&](int r1, int c1, int r2, int c2, int r3, int c3) {
        const double v = std::max(image.at(r1, c1), std::max(image.at(r2, c2), image.at(r3, c3)));
        f.entries.push_back({Simplex::triangle(id(r1, c1), id(r2, c2), id(r3, c3)), v});
    };

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c)
            add_edge(r, c, r, c + 1);
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c < cols; ++c)
            add_edge(r, c, r + 1, c);
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c + 1 < cols; ++c) {
            add_edge(r, c, r + 1, c + 1);
            add_triangle(r, c, r + 1, c, r + 1, c + 1);
            add_triangle(r, c, r, c + 1, r + 1, c + 1);
        }
    }

    sort_filtration(f);
    return f;
}

}  // namespace percept
