// Cubical complexes from value grids, interval complexes, and matchings
// along coordinate directions.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "conley/graded.hpp"
#include "conley/morse.hpp"

namespace conley {

/// Values on a cubical grid. In top-cell mode there is one value per
/// top-dimensional cube and lower cells take the minimum over the cubes in
/// their star; in cell mode every cell of the Khalimsky grid carries its own
/// value. "." marks an absent cell. Values are listed row-major with the last
/// axis varying fastest.
struct CubicalGrid {
    std::vector<std::size_t> shape;  // cubes per axis
    std::vector<bool> open;          // drop the upper boundary layer on this axis
    bool cells = false;
    std::vector<std::string> values;

    std::size_t axes() const { return shape.size(); }
    /// Number of Khalimsky coordinates on an axis.
    std::uint32_t extent(std::size_t axis) const {
        return static_cast<std::uint32_t>(2 * shape[axis] + 1 - (open[axis] ? 1 : 0));
    }
    std::size_t expected_values() const {
        std::size_t n = 1;
        for (std::size_t i = 0; i < axes(); ++i) n *= cells ? extent(i) : shape[i];
        return n;
    }
};

inline constexpr std::string_view absent_marker = ".";

/// Header `shape: n1 n2 ... [open: a1 a2 ...] [cells]`, then values.
/// Lines starting with '#' are comments.
inline CubicalGrid parse_grid(std::istream& in) {
    std::string line, header;
    std::ostringstream rest;
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        if (header.empty()) {
            header = line;
            continue;
        }
        rest << line << '\n';
    }
    if (header.empty()) throw Error("grid file is empty");

    auto parse_count = [](const std::string& tok, const char* what) {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size()) throw Error(std::string("bad ") + what + " '" + tok + "'");
        return v;
    };

    CubicalGrid g;
    std::istringstream hs(header);
    std::string tok, section;
    std::vector<std::size_t> open_axes;
    while (hs >> tok) {
        if (tok == "shape:" || tok == "open:") {
            section = tok;
        } else if (tok == "cells") {
            g.cells = true;
            section.clear();
        } else if (section == "shape:") {
            g.shape.push_back(parse_count(tok, "extent"));
        } else if (section == "open:") {
            open_axes.push_back(parse_count(tok, "open axis"));
        } else {
            throw Error("unexpected token '" + tok + "' in grid header");
        }
    }
    if (g.shape.empty()) throw Error("grid header needs `shape:` with at least one extent");
    for (auto n : g.shape)
        if (n == 0) throw Error("grid extents must be positive");
    g.open.assign(g.shape.size(), false);
    for (auto a : open_axes) {
        if (a >= g.shape.size()) throw Error("open axis " + std::to_string(a) + " out of range");
        g.open[a] = true;
    }
    std::istringstream vs(rest.str());
    while (vs >> tok) g.values.push_back(tok);
    if (g.values.size() != g.expected_values())
        throw Error("grid has " + std::to_string(g.values.size()) + " values, shape needs " +
                    std::to_string(g.expected_values()));
    return g;
}

namespace detail {

/// Distinct labels in increasing order: numeric when every label parses as
/// a number, lexicographic otherwise.
inline std::vector<std::string> sorted_labels(const std::vector<std::string>& values,
                                              std::map<std::string, std::uint32_t>& rank_of) {
    std::vector<std::pair<double, std::string>> numeric;
    bool all_numeric = true;
    for (const auto& v : values) {
        if (v == absent_marker) continue;
        double d = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
        if (ec != std::errc() || p != v.data() + v.size()) {
            all_numeric = false;
            break;
        }
        numeric.push_back({d, v});
    }
    std::vector<std::string> labels;
    if (all_numeric) {
        std::stable_sort(numeric.begin(), numeric.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < numeric.size(); ++i) {
            if (i == 0 || numeric[i].first != numeric[i - 1].first) labels.push_back(numeric[i].second);
            rank_of[numeric[i].second] = static_cast<std::uint32_t>(labels.size() - 1);
        }
    } else {
        for (const auto& v : values)
            if (v != absent_marker) rank_of[v] = 0;
        std::uint32_t r = 0;
        for (auto& [label, rank] : rank_of) {
            rank = r++;
            labels.push_back(label);
        }
    }
    return labels;
}

inline std::string interval_id(std::uint32_t x) {
    if (x % 2 == 0) return "[" + std::to_string(x / 2) + "]";
    return "[" + std::to_string(x / 2) + "," + std::to_string(x / 2 + 1) + "]";
}

}  // namespace detail

inline std::string cubical_cell_id(std::span<const std::uint32_t> x) {
    std::string out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) out += "x";
        out += detail::interval_id(x[i]);
    }
    return out;
}

/// Graded cubical complex of a grid. Cell order is row-major over Khalimsky
/// coordinates; grades live in the chain of distinct sorted values.
inline GradedComplex build_complex(const CubicalGrid& grid, std::uint32_t modulus = 2) {
    const std::size_t d = grid.axes();
    if (d == 0) throw Error("grid needs at least one axis");
    if (grid.open.size() != d) throw Error("open flags do not match the number of axes");
    if (grid.values.size() != grid.expected_values())
        throw Error("grid has " + std::to_string(grid.values.size()) + " values, shape needs " +
                    std::to_string(grid.expected_values()));

    CubicalEmbedding frame;
    for (std::size_t i = 0; i < d; ++i) frame.extent.push_back(grid.extent(i));
    const std::uint64_t space = frame.key_space();
    if (space > (std::uint64_t(1) << 31)) throw Error("grid too large");

    std::map<std::string, std::uint32_t> rank_of;
    auto labels = detail::sorted_labels(grid.values, rank_of);
    if (labels.empty()) labels.push_back("0");
    constexpr std::uint32_t none = static_cast<std::uint32_t>(-1);

    // Grade per Khalimsky key, none when the cell is absent.
    std::vector<std::uint32_t> grade_at(space, none);
    std::vector<std::uint32_t> x(d);
    auto decode = [&](std::uint64_t k) {
        for (std::size_t i = d; i-- > 0;) {
            x[i] = static_cast<std::uint32_t>(k % frame.extent[i]);
            k /= frame.extent[i];
        }
    };

    if (grid.cells) {
        for (std::uint64_t k = 0; k < space; ++k) {
            const auto& v = grid.values[k];
            if (v != absent_marker) grade_at[k] = rank_of.at(v);
        }
    } else {
        // Top cubes first, then every cell takes the minimum over the
        // present cubes around it.
        std::vector<std::uint32_t> cube_grade(grid.values.size(), none);
        for (std::size_t t = 0; t < grid.values.size(); ++t)
            if (grid.values[t] != absent_marker) cube_grade[t] = rank_of.at(grid.values[t]);
        std::vector<std::uint32_t> y(d);
        for (std::uint64_t k = 0; k < space; ++k) {
            decode(k);
            std::uint32_t best = none;
            // Enumerate the up to 2^d cubes whose closure contains x.
            for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
                bool ok = true;
                std::size_t t = 0;
                for (std::size_t i = 0; i < d && ok; ++i) {
                    std::int64_t c;
                    if (x[i] % 2 == 1) {
                        if (mask >> i & 1) ok = false;
                        c = x[i];
                    } else {
                        c = (mask >> i & 1) ? std::int64_t(x[i]) + 1 : std::int64_t(x[i]) - 1;
                    }
                    if (c < 0 || c >= std::int64_t(2 * grid.shape[i] + 1)) ok = false;
                    t = t * grid.shape[i] + static_cast<std::size_t>(c / 2);
                }
                if (!ok || cube_grade[t] == none) continue;
                best = std::min(best, cube_grade[t]);
            }
            grade_at[k] = best;
        }
    }

    std::vector<std::uint64_t> strides(d, 1);
    for (std::size_t i = d - 1; i-- > 0;) strides[i] = strides[i + 1] * frame.extent[i + 1];

    std::vector<CellIndex> index_at(space, no_cell);
    CellComplex::Builder b(modulus);
    std::vector<std::uint32_t> grades;
    auto cube = std::make_shared<CubicalEmbedding>(frame);
    for (std::uint64_t k = 0; k < space; ++k) {
        if (grade_at[k] == none) continue;
        decode(k);
        int dim = 0;
        for (auto xi : x) dim += xi % 2;
        index_at[k] = b.add_cell(cubical_cell_id(x), dim);
        grades.push_back(grade_at[k]);
        cube->coords.insert(cube->coords.end(), x.begin(), x.end());
    }
    const PrimeField& f = b.field();
    for (std::uint64_t k = 0; k < space; ++k) {
        CellIndex c = index_at[k];
        if (c == no_cell) continue;
        decode(k);
        int m = 0;
        for (std::size_t i = 0; i < d; ++i) {
            if (x[i] % 2 == 0) continue;
            std::int64_t sign = (m % 2 == 0) ? 1 : -1;
            ++m;
            CellIndex lower = index_at[k - strides[i]];
            bool upper_exists = x[i] + 1 < frame.extent[i];
            CellIndex upper = upper_exists ? index_at[k + strides[i]] : no_cell;
            if (lower == no_cell || (upper_exists && upper == no_cell)) {
                std::uint64_t missing = lower == no_cell ? k - strides[i] : k + strides[i];
                decode(missing);
                std::string face = cubical_cell_id(x);
                decode(k);
                throw Error("cell " + cubical_cell_id(x) + " is present but its face " + face + " is not");
            }
            b.add_boundary(c, lower, f.reduce(-sign));
            if (upper != no_cell) b.add_boundary(c, upper, f.reduce(sign));
        }
    }
    auto X = std::make_shared<const CellComplex>(b.build());
    auto P = std::make_shared<const Poset>(Poset::chain(labels));
    return GradedComplex(std::move(X), std::move(P), std::move(grades), std::move(cube));
}

/// Subdivided interval: vertices v0..vN then edges e0..e{N-1}, with
/// d(e_k) = v_{k+1} - v_k. Carries 1-d cubical coordinates.
inline std::shared_ptr<const CellComplex> interval_cells(std::size_t n_edges, std::uint32_t modulus = 2) {
    CellComplex::Builder b(modulus);
    for (std::size_t k = 0; k <= n_edges; ++k) b.add_cell("v" + std::to_string(k), 0);
    for (std::size_t k = 0; k < n_edges; ++k) {
        CellIndex e = b.add_cell("e" + std::to_string(k), 1);
        b.add_boundary(e, static_cast<CellIndex>(k), -1);
        b.add_boundary(e, static_cast<CellIndex>(k + 1), 1);
    }
    return std::make_shared<const CellComplex>(b.build());
}

/// Interval complex graded by per-vertex and per-edge poset elements.
/// Throws when the labels are not order-consistent.
inline GradedComplex interval_complex(std::size_t n_edges, std::shared_ptr<const Poset> P,
                                      const std::vector<std::uint32_t>& vertex_grade,
                                      const std::vector<std::uint32_t>& edge_grade, std::uint32_t modulus = 2) {
    if (vertex_grade.size() != n_edges + 1 || edge_grade.size() != n_edges)
        throw Error("interval grading has the wrong number of labels");
    auto X = interval_cells(n_edges, modulus);
    std::vector<std::uint32_t> grades(vertex_grade);
    grades.insert(grades.end(), edge_grade.begin(), edge_grade.end());
    auto cube = std::make_shared<CubicalEmbedding>();
    cube->extent = {static_cast<std::uint32_t>(2 * n_edges + 1)};
    for (std::size_t k = 0; k <= n_edges; ++k) cube->coords.push_back(static_cast<std::uint32_t>(2 * k));
    for (std::size_t k = 0; k < n_edges; ++k) cube->coords.push_back(static_cast<std::uint32_t>(2 * k + 1));
    return GradedComplex(std::move(X), std::move(P), std::move(grades), std::move(cube));
}

/// Pairs each cell with even coordinate on `axis` with the cell one step up
/// along that axis, when it exists in the current complex, has nonzero
/// incidence, and lies in the same fiber. Pairs on cycles of << are dropped.
inline Matching coordinate_matching(const GradedComplex& g, std::size_t axis) {
    auto cube = g.cube();
    if (!cube) throw Error("complex carries no cubical coordinates");
    if (axis >= cube->axes()) throw Error("axis out of range");
    const auto& X = g.complex();
    const std::uint64_t space = cube->key_space();
    if (space > (std::uint64_t(1) << 31)) throw Error("cubical frame too large");

    std::vector<CellIndex> index_at(space, no_cell);
    for (CellIndex c = 0; c < X.size(); ++c) index_at[cube->key(cube->of(c))] = c;
    std::uint64_t stride = 1;
    for (std::size_t i = axis + 1; i < cube->axes(); ++i) stride *= cube->extent[i];

    std::vector<std::pair<CellIndex, CellIndex>> pairs;
    for (CellIndex c = 0; c < X.size(); ++c) {
        auto x = cube->of(c);
        if (x[axis] % 2 != 0 || x[axis] + 1 >= cube->extent[axis]) continue;
        CellIndex up = index_at[cube->key(x) + stride];
        if (up == no_cell || g.grade(up) != g.grade(c) || X.kappa(up, c) == 0) continue;
        pairs.push_back({c, up});
    }
    return Matching::from_pairs(X, pairs, true);
}

}  // namespace conley
