// Fixtures shared by the unit tests and the acceptance runner: the worked
// examples as graded complexes, and random generators.
#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "conley.hpp"

namespace fixtures {

using namespace conley;

inline std::shared_ptr<const Poset> vee_poset() {
    // p < q > r
    return std::make_shared<const Poset>(std::vector<std::string>{"p", "q", "r"},
                                         std::vector<std::pair<std::string, std::string>>{{"p", "q"}, {"r", "q"}});
}

/// Interval [0,2] as v0, v1, v2, e0, e1 graded v0 -> p, v2 -> r, rest -> q.
inline GradedComplex example_interval(std::uint32_t modulus = 2) {
    auto P = vee_poset();
    const std::uint32_t p = 0, q = 1, r = 2;
    return interval_complex(2, P, {p, q, r}, {q, q}, modulus);
}

/// Same complex graded by the chain 0 < 1 < 2 with p -> 0, r -> 1, q -> 2.
inline GradedComplex example_persistence(std::uint32_t modulus = 2) {
    auto P = std::make_shared<const Poset>(Poset::chain({"0", "1", "2"}));
    return interval_complex(2, P, {0, 2, 1}, {2, 2}, modulus);
}

/// Interval with N edges cut in thirds (M = N/3): cells ending at or before
/// M go to p, cells starting at or after 2M go to r, the rest to q.
inline GradedComplex example_thirds(std::size_t n_edges, std::uint32_t modulus = 2) {
    const std::size_t M = n_edges / 3;
    const std::uint32_t p = 0, q = 1, r = 2;
    auto grade = [&](std::size_t l, std::size_t rt) { return rt <= M ? p : (l >= 2 * M ? r : q); };
    std::vector<std::uint32_t> vg(n_edges + 1), eg(n_edges);
    for (std::size_t k = 0; k <= n_edges; ++k) vg[k] = grade(k, k);
    for (std::size_t k = 0; k < n_edges; ++k) eg[k] = grade(k, k + 1);
    return interval_complex(n_edges, vee_poset(), vg, eg, modulus);
}

/// Cell-mode grid text for the 3x2 block open on the right (axis 0). In the
/// reduced example the middle column's squares and the middle horizontal
/// edge are missing; in the graded example they form fiber 1.
inline std::string grid_text(bool graded) {
    std::ostringstream os;
    os << "shape: 3 2 open: 0 cells\n";
    for (int x = 0; x < 6; ++x) {
        for (int y = 0; y < 5; ++y) {
            bool middle = x == 3 && y >= 1 && y <= 3;
            os << (y ? " " : "") << (middle ? (graded ? "1" : ".") : "0");
        }
        os << "\n";
    }
    return os.str();
}

inline GradedComplex example_cubical(bool graded, std::uint32_t modulus = 2) {
    std::istringstream in(grid_text(graded));
    return build_complex(parse_grid(in), modulus);
}

inline std::set<std::string> ids_of(const CellComplex& X) {
    std::set<std::string> out;
    for (CellIndex c = 0; c < X.size(); ++c) out.insert(X.id(c));
    return out;
}

// ---------------------------------------------------------------------------
// Random instances

/// Random poset on n elements: i < j added with probability `density`.
inline std::shared_ptr<const Poset> random_poset(std::mt19937& rng, std::size_t n, double density = 0.4) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("g" + std::to_string(i));
    std::vector<std::pair<std::size_t, std::size_t>> rel;
    std::bernoulli_distribution coin(density);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng)) rel.push_back({i, j});
    return std::make_shared<const Poset>(labels, rel);
}

/// Random simplicial complex on at most `vertices` vertices with at most
/// `max_cells` simplices, alternating-sign boundary (valid for every p).
inline std::shared_ptr<const CellComplex> random_simplicial(std::mt19937& rng, std::uint32_t modulus,
                                                            std::size_t vertices = 6, std::size_t max_cells = 60,
                                                            int max_dim = 3) {
    std::set<std::vector<int>> simplices;
    std::uniform_int_distribution<int> size_dist(1, max_dim + 1);
    auto add_closed = [&](const std::vector<int>& s, std::set<std::vector<int>>& into) {
        for (unsigned mask = 1; mask < (1u << s.size()); ++mask) {
            std::vector<int> face;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (mask >> i & 1) face.push_back(s[i]);
            into.insert(face);
        }
    };
    for (int attempt = 0; attempt < 12; ++attempt) {
        std::vector<int> verts(vertices);
        for (std::size_t i = 0; i < vertices; ++i) verts[i] = static_cast<int>(i);
        std::shuffle(verts.begin(), verts.end(), rng);
        std::vector<int> s(verts.begin(), verts.begin() + std::min<std::size_t>(size_dist(rng), vertices));
        std::sort(s.begin(), s.end());
        auto trial = simplices;
        add_closed(s, trial);
        if (trial.size() > max_cells) continue;
        simplices = std::move(trial);
    }
    if (simplices.empty()) simplices.insert({0});
    auto name = [](const std::vector<int>& s) {
        std::string out = "s";
        for (int v : s) out += std::to_string(v);
        return out;
    };
    CellComplex::Builder b(modulus);
    for (const auto& s : simplices) b.add_cell(name(s), static_cast<int>(s.size()) - 1);
    for (const auto& s : simplices) {
        if (s.size() < 2) continue;
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::vector<int> face(s);
            face.erase(face.begin() + static_cast<long>(i));
            b.add_boundary(name(s), name(face), i % 2 ? -1 : 1);
        }
    }
    return std::make_shared<const CellComplex>(b.build());
}

/// Order-preserving random grading: cells in increasing dimension pick a
/// random element above the grades of all their faces. Retries on dead ends.
inline GradedComplex random_grading(std::mt19937& rng, std::shared_ptr<const CellComplex> X,
                                    std::shared_ptr<const Poset> P) {
    std::vector<CellIndex> order(X->size());
    for (CellIndex c = 0; c < X->size(); ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](CellIndex a, CellIndex b) { return X->dim(a) < X->dim(b); });
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<std::uint32_t> grade(X->size(), 0);
        bool ok = true;
        for (CellIndex c : order) {
            ElementSet allowed = P->full_set();
            for (const Term& t : X->boundary(c)) allowed &= P->up(grade[t.cell]);
            std::vector<std::size_t> choices;
            for (auto i = allowed.find_first(); i != ElementSet::npos; i = allowed.find_next(i)) choices.push_back(i);
            if (choices.empty()) {
                ok = false;
                break;
            }
            grade[c] = static_cast<std::uint32_t>(choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)]);
        }
        if (ok) return GradedComplex(X, P, std::move(grade));
    }
    // A one-point image always works.
    return GradedComplex(X, P, std::vector<std::uint32_t>(X->size(), static_cast<std::uint32_t>(P->topological_order().back())));
}

inline GradedComplex random_graded_complex(std::mt19937& rng, std::uint32_t modulus, std::size_t max_cells = 60,
                                           std::size_t max_poset = 5) {
    auto X = random_simplicial(rng, modulus, 6, max_cells);
    auto P = random_poset(rng, std::uniform_int_distribution<std::size_t>(1, max_poset)(rng));
    return random_grading(rng, X, P);
}

/// Random linear extension of P.
inline std::vector<std::size_t> random_extension(std::mt19937& rng, const Poset& P) {
    std::vector<std::size_t> out;
    ElementSet placed = P.empty_set();
    while (out.size() < P.size()) {
        std::vector<std::size_t> ready;
        for (std::size_t x = 0; x < P.size(); ++x) {
            if (placed.test(x)) continue;
            ElementSet below = P.down(x);
            below.reset(x);
            if (below.is_subset_of(placed)) ready.push_back(x);
        }
        std::size_t pick = ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng)];
        out.push_back(pick);
        placed.set(pick);
    }
    return out;
}

/// Random cubical grid graded in the product lattice {0..a-1} x {0..b-1}:
/// each top cube gets a random pair and every other cell the componentwise
/// minimum over the cubes in its star.
inline GradedComplex random_lattice_grid(std::mt19937& rng, const std::vector<std::size_t>& shape, std::size_t a,
                                         std::size_t b, std::uint32_t modulus = 2) {
    CubicalGrid grid;
    grid.shape = shape;
    grid.open.assign(shape.size(), false);
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    grid.values.assign(n, "0");
    auto base = build_complex(grid, modulus);
    const auto& X = base.complex();

    std::vector<std::string> labels;
    std::vector<std::pair<std::size_t, std::size_t>> rel;
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            labels.push_back(std::to_string(i) + "." + std::to_string(j));
            if (i + 1 < a) rel.push_back({i * b + j, (i + 1) * b + j});
            if (j + 1 < b) rel.push_back({i * b + j, i * b + j + 1});
        }
    auto P = std::make_shared<const Poset>(labels, rel);

    const int top = X.max_dim();
    std::vector<std::pair<std::size_t, std::size_t>> value(X.size(), {a, b});
    std::uniform_int_distribution<std::size_t> da(0, a - 1), db(0, b - 1);
    for (CellIndex c = 0; c < X.size(); ++c)
        if (X.dim(c) == top) value[c] = {da(rng), db(rng)};
    // Process cells top-down; the star minimum equals the minimum over cofaces.
    std::vector<CellIndex> order(X.size());
    for (CellIndex c = 0; c < X.size(); ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](CellIndex x, CellIndex y) { return X.dim(x) > X.dim(y); });
    for (CellIndex c : order) {
        if (X.dim(c) == top) continue;
        for (const Term& t : X.coboundary(c)) {
            value[c].first = std::min(value[c].first, value[t.cell].first);
            value[c].second = std::min(value[c].second, value[t.cell].second);
        }
    }
    std::vector<std::uint32_t> grade(X.size());
    for (CellIndex c = 0; c < X.size(); ++c) grade[c] = static_cast<std::uint32_t>(value[c].first * b + value[c].second);
    return GradedComplex(base.complex_ptr(), P, std::move(grade), base.cube());
}

/// Random two-level grid in top-cell mode.
inline CubicalGrid random_two_level_grid(std::mt19937& rng, std::size_t width, std::size_t height) {
    CubicalGrid grid;
    grid.shape = {width, height};
    grid.open = {false, false};
    grid.values.resize(width * height);
    std::bernoulli_distribution coin(0.5);
    for (auto& v : grid.values) v = coin(rng) ? "1" : "0";
    return grid;
}

}  // namespace fixtures
