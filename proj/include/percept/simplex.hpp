#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace percept {

// Simplex of dimension 0..2 (vertex, edge, triangle). Vertices are kept
// strictly increasing so lexicographic comparisons are well defined.
struct Simplex {
    std::array<int, 3> v{-1, -1, -1};
    int n = 0;  // number of vertices, 1..3

    int dim() const { return n - 1; }

    static Simplex vertex(int a) {
        Simplex s;
        s.v[0] = a;
        s.n = 1;
        return s;
    }
    static Simplex edge(int a, int b) {
        if (a == b) throw std::invalid_argument("Simplex: repeated vertex");
        if (a > b) std::swap(a, b);
        Simplex s;
        s.v[0] = a;
        s.v[1] = b;
        s.n = 2;
        return s;
    }
    static Simplex triangle(int a, int b, int c) {
        std::array<int, 3> t{a, b, c};
        std::sort(t.begin(), t.end());
        if (t[0] == t[1] || t[1] == t[2])
            throw std::invalid_argument("Simplex: repeated vertex");
        Simplex s;
        s.v = t;
        s.n = 3;
        return s;
    }

    // Facets (codimension-1 faces), lexicographic order.
    std::vector<Simplex> facets() const {
        std::vector<Simplex> out;
        if (n == 2) {
            out.push_back(vertex(v[0]));
            out.push_back(vertex(v[1]));
        } else if (n == 3) {
            out.push_back(edge(v[0], v[1]));
            out.push_back(edge(v[0], v[2]));
            out.push_back(edge(v[1], v[2]));
        }
        return out;
    }

    friend bool operator==(const Simplex& a, const Simplex& b) {
        return a.n == b.n && a.v == b.v;
    }
    // Lexicographic within equal dimension; lower dimension first otherwise.
    friend bool operator<(const Simplex& a, const Simplex& b) {
        if (a.n != b.n) return a.n < b.n;
        return a.v < b.v;
    }
};

struct FiltrationEntry {
    Simplex simplex;
    double value = 0.0;
};

// Ordered list of simplices with nondecreasing filtration values. Entries are
// sorted by (value, dim, lexicographic vertices) which guarantees every face
// precedes its cofaces.
struct Filtration {
    std::vector<FiltrationEntry> entries;

    std::size_t size() const { return entries.size(); }
};

inline void sort_filtration(Filtration& f) {
    std::sort(f.entries.begin(), f.entries.end(),
              [](const FiltrationEntry& a, const FiltrationEntry& b) {
                  if (a.value != b.value) return a.value < b.value;
                  return a.simplex < b.simplex;
              });
}

// Checks the filtration invariant: sorted order, and every facet present with
// value not exceeding its coface's value. Throws on violation.
inline void validate_filtration(const Filtration& f) {
    struct Key {
        std::array<int, 3> v;
        int n;
        bool operator<(const Key& o) const {
            if (n != o.n) return n < o.n;
            return v < o.v;
        }
    };
    std::vector<std::pair<Key, double>> seen;
    seen.reserve(f.entries.size());
    double prev = -1.0;
    for (const auto& e : f.entries) {
        if (e.value < 0.0 || e.value < prev)
            throw std::invalid_argument("Filtration: values must be nonnegative and nondecreasing");
        prev = e.value;
        seen.push_back({{e.simplex.v, e.simplex.n}, e.value});
    }
    std::sort(seen.begin(), seen.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    auto lookup = [&seen](const Simplex& s) -> const double* {
        Key k{s.v, s.n};
        auto it = std::lower_bound(seen.begin(), seen.end(), k,
                                   [](const auto& a, const Key& b) { return a.first < b; });
        if (it == seen.end() || !(it->first.v == k.v && it->first.n == k.n)) return nullptr;
        return &it->second;
    };
    for (const auto& e : f.entries) {
        for (const Simplex& face : e.simplex.facets()) {
            const double* fv = lookup(face);
            if (fv == nullptr)
                throw std::invalid_argument("Filtration: missing face");
            if (*fv > e.value)
                throw std::invalid_argument("Filtration: face enters after its coface");
        }
    }
}

}  // namespace percept
