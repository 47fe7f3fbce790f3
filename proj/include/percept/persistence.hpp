#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "percept/simplex.hpp"

namespace percept {

inline constexpr double kEssentialDeath = std::numeric_limits<double>::infinity();

struct Feature {
    double birth = 0.0;
    double death = kEssentialDeath;
    int dim = 0;

    bool essential() const { return !(death < kEssentialDeath); }
    double persistence() const { return death - birth; }
};

// Multiset of (birth, death, homology dimension) features. Essential classes
// carry death = +inf. Zero-persistence pairs are not reported.
struct PersistenceDiagram {
    std::vector<Feature> features;
};

struct TiltedFeature {
    double birth = 0.0;
    double persistence = 0.0;
    int dim = 0;
};

// Tilted view: (birth, death - birth).
struct TiltedDiagram {
    std::vector<TiltedFeature> features;
};

// Essential-class handling for the tilted view: drop the feature, or assign
// it persistence cap - birth.
struct EssentialPolicy {
    enum class Kind { drop, cap } kind = Kind::drop;
    double cap_value = 0.0;

    static EssentialPolicy drop() { return {}; }
    static EssentialPolicy cap_at(double value) { return {Kind::cap, value}; }
};

namespace detail {

struct SimplexKeyHash {
    std::size_t operator()(const std::array<int, 4>& k) const {
        std::size_t h = 1469598103934665603ULL;
        for (int x : k) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b9;
            h *= 1099511628211ULL;
        }
        return h;
    }
};

// Symmetric difference of two sorted index lists (Z/2 column addition).
inline void add_column(std::vector<int>& a, const std::vector<int>& b, std::vector<int>& tmp) {
    tmp.clear();
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(tmp));
    a.swap(tmp);
}

}  // namespace detail

// Persistence pairing of a (sorted) filtration via the standard column
// reduction over Z/2, run top dimension first so paired creator columns can
// be cleared instead of reduced. Homology is reported in dimensions 0 and 1;
// dimension-2 creators are ignored. Deterministic given the filtration's
// sort order.
inline PersistenceDiagram compute_persistence(const Filtration& filtration) {
    Filtration sorted = filtration;
    sort_filtration(sorted);
    const int n = static_cast<int>(sorted.entries.size());
    if (n == 0) throw std::invalid_argument("compute_persistence: empty filtration");

    std::unordered_map<std::array<int, 4>, int, detail::SimplexKeyHash> index;
    index.reserve(static_cast<std::size_t>(n) * 2);
    for (int i = 0; i < n; ++i) {
        const Simplex& s = sorted.entries[i].simplex;
        auto [it, inserted] = index.insert({{s.v[0], s.v[1], s.v[2], s.n}, i});
        if (!inserted) throw std::invalid_argument("compute_persistence: duplicate simplex");
    }
    auto index_of = [&index](const Simplex& s) {
        auto it = index.find({s.v[0], s.v[1], s.v[2], s.n});
        if (it == index.end())
            throw std::invalid_argument("compute_persistence: missing face in filtration");
        return it->second;
    };

    std::vector<int> low_to_col(n, -1);          // creator row -> killing column
    std::vector<std::vector<int>> reduced(n);    // reduced columns that stayed nonzero
    std::vector<char> cleared(n, 0);             // creator rows paired by a higher column
    std::vector<std::pair<int, int>> pairs;      // (creator, destroyer)
    std::vector<char> is_h1_creator(n, 0);       // edges whose column reduced to zero

    std::vector<int> col, tmp;
    for (int d = 2; d >= 1; --d) {
        for (int j = 0; j < n; ++j) {
            if (sorted.entries[j].simplex.dim() != d || cleared[j]) continue;
            col.clear();
            for (const Simplex& face : sorted.entries[j].simplex.facets())
                col.push_back(index_of(face));
            std::sort(col.begin(), col.end());
            while (!col.empty()) {
                const int pivot = col.back();
                const int k = low_to_col[pivot];
                if (k < 0) break;
                detail::add_column(col, reduced[k], tmp);
            }
            if (!col.empty()) {
                const int pivot = col.back();
                low_to_col[pivot] = j;
                reduced[j] = col;
                cleared[pivot] = 1;
                pairs.emplace_back(pivot, j);
            } else if (d == 1) {
                is_h1_creator[j] = 1;
            }
        }
    }

    PersistenceDiagram diagram;
    for (auto [creator, destroyer] : pairs) {
        const double birth = sorted.entries[creator].value;
        const double death = sorted.entries[destroyer].value;
        if (death > birth)
            diagram.features.push_back({birth, death, sorted.entries[creator].simplex.dim()});
    }
    for (int j = 0; j < n; ++j) {
        const int d = sorted.entries[j].simplex.dim();
        if (d == 0 && !cleared[j])
            diagram.features.push_back({sorted.entries[j].value, kEssentialDeath, 0});
        else if (d == 1 && is_h1_creator[j] && !cleared[j])
            diagram.features.push_back({sorted.entries[j].value, kEssentialDeath, 1});
    }
    std::sort(diagram.features.begin(), diagram.features.end(),
              [](const Feature& a, const Feature& b) {
                  if (a.dim != b.dim) return a.dim < b.dim;
                  if (a.birth != b.birth) return a.birth < b.birth;
                  return a.death < b.death;
              });
    return diagram;
}

inline TiltedDiagram tilt(const PersistenceDiagram& diagram, const EssentialPolicy& policy) {
    if (policy.kind == EssentialPolicy::Kind::cap) {
        for (const Feature& f : diagram.features)
            if (f.essential() && policy.cap_value < f.birth)
                throw std::invalid_argument("tilt: cap value below an essential birth");
    }
    TiltedDiagram out;
    out.features.reserve(diagram.features.size());
    for (const Feature& f : diagram.features) {
        if (f.essential()) {
            if (policy.kind == EssentialPolicy::Kind::drop) continue;
            const double p = policy.cap_value - f.birth;
            if (p > 0.0) out.features.push_back({f.birth, p, f.dim});
        } else {
            out.features.push_back({f.birth, f.death - f.birth, f.dim});
        }
    }
    return out;
}

inline double total_persistence(const TiltedDiagram& d) {
    double s = 0.0;
    for (const auto& f : d.features) s += f.persistence;
    return s;
}

}  // namespace percept
