// Poset-graded cell complexes: fibers, filtered pieces, strictness and
// fiber graphs.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conley/complex.hpp"
#include "conley/morse.hpp"
#include "conley/order.hpp"

namespace conley {

/// Khalimsky coordinates of cubical cells: on each axis an odd coordinate
/// means the cell has extent along that axis. `extent[i]` is the number of
/// coordinate values on axis i.
struct CubicalEmbedding {
    std::vector<std::uint32_t> extent;
    std::vector<std::uint32_t> coords;  // cell-major, extent.size() per cell

    std::size_t axes() const { return extent.size(); }
    std::span<const std::uint32_t> of(CellIndex c) const { return {coords.data() + std::size_t(c) * axes(), axes()}; }

    std::uint64_t key(std::span<const std::uint32_t> x) const {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < axes(); ++i) k = k * extent[i] + x[i];
        return k;
    }
    std::uint64_t key_space() const {
        std::uint64_t n = 1;
        for (auto e : extent) n *= e;
        return n;
    }

    /// Embedding of a sub-collection of cells, in the given order.
    CubicalEmbedding select(std::span<const CellIndex> cells) const {
        CubicalEmbedding out{extent, {}};
        out.coords.reserve(cells.size() * axes());
        for (CellIndex c : cells) {
            auto x = of(c);
            out.coords.insert(out.coords.end(), x.begin(), x.end());
        }
        return out;
    }
};

/// A cell complex with an order-preserving grading into a finite poset.
class GradedComplex {
public:
    GradedComplex() = default;

    /// Validates that kappa(x, y) != 0 (or an explicit face relation) implies
    /// grade(y) <= grade(x).
    GradedComplex(std::shared_ptr<const CellComplex> X, std::shared_ptr<const Poset> P,
                  std::vector<std::uint32_t> grade,
                  std::shared_ptr<const CubicalEmbedding> cube = nullptr)
        : X_(std::move(X)), P_(std::move(P)), grade_(std::move(grade)), cube_(std::move(cube)) {
        if (grade_.size() != X_->size()) throw Error("grading does not cover every cell");
        for (auto g : grade_)
            if (g >= P_->size()) throw Error("grade outside the poset");
        if (cube_ && cube_->coords.size() != X_->size() * cube_->axes())
            throw Error("cubical coordinates do not cover every cell");
        for (CellIndex c = 0; c < X_->size(); ++c) {
            for (const Term& t : X_->boundary(c)) check_pair(c, t.cell);
            for (CellIndex f : X_->explicit_faces(c)) check_pair(c, f);
        }
    }

    /// One-point grading.
    static GradedComplex trivial(std::shared_ptr<const CellComplex> X,
                                 std::shared_ptr<const CubicalEmbedding> cube = nullptr) {
        auto P = std::make_shared<const Poset>(Poset::single("0"));
        std::vector<std::uint32_t> g(X->size(), 0);
        return GradedComplex(std::move(X), std::move(P), std::move(g), std::move(cube));
    }

    const CellComplex& complex() const { return *X_; }
    const Poset& poset() const { return *P_; }
    std::shared_ptr<const CellComplex> complex_ptr() const { return X_; }
    std::shared_ptr<const Poset> poset_ptr() const { return P_; }
    std::shared_ptr<const CubicalEmbedding> cube() const { return cube_; }

    std::uint32_t grade(CellIndex c) const { return grade_[c]; }
    const std::vector<std::uint32_t>& grades() const { return grade_; }
    std::size_t size() const { return X_->size(); }

private:
    void check_pair(CellIndex cell, CellIndex face) const {
        if (!P_->leq(grade_[face], grade_[cell]))
            throw Error("grading is not order-preserving: face '" + X_->id(face) + "' (grade " +
                        P_->label(grade_[face]) + ") of '" + X_->id(cell) + "' (grade " + P_->label(grade_[cell]) +
                        ")");
    }

    std::shared_ptr<const CellComplex> X_;
    std::shared_ptr<const Poset> P_;
    std::vector<std::uint32_t> grade_;
    std::shared_ptr<const CubicalEmbedding> cube_;
};

inline std::vector<CellIndex> fiber_cells(const GradedComplex& g, std::size_t p) {
    if (p >= g.poset().size()) throw Error("unknown poset element index " + std::to_string(p));
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < g.size(); ++c)
        if (g.grade(c) == p) out.push_back(c);
    return out;
}

/// X^p = nu^{-1}(p); convex because nu is order-preserving.
inline CellComplex fiber(const GradedComplex& g, std::size_t p) {
    auto cells = fiber_cells(g, p);
    return restrict_unchecked(g.complex(), cells);
}

inline CellComplex fiber(const GradedComplex& g, std::string_view label) {
    return fiber(g, g.poset().index_of(label));
}

/// Cells graded in the down-set a, in index order.
inline std::vector<CellIndex> filtered_cells(const GradedComplex& g, const ElementSet& a) {
    if (!is_down_set(g.poset(), a)) throw Error("element set is not a down-set");
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < g.size(); ++c)
        if (a.test(g.grade(c))) out.push_back(c);
    return out;
}

/// Closed subcomplex nu^{-1}(a) for a down-set a.
inline CellComplex filtered_piece(const GradedComplex& g, const ElementSet& a) {
    auto cells = filtered_cells(g, a);
    return restrict_unchecked(g.complex(), cells);
}

/// Linear map given per source basis cell, in target indices.
using CellMap = std::function<Chain(CellIndex)>;

/// pi^p f pi^q != 0 implies p <= q.
inline bool is_p_filtered(const GradedComplex& src, const GradedComplex& dst, const CellMap& map) {
    if (src.poset_ptr() != dst.poset_ptr() && src.poset().labels() != dst.poset().labels())
        throw Error("graded complexes use different posets");
    const Poset& P = dst.poset();
    for (CellIndex c = 0; c < src.size(); ++c)
        for (const Term& t : map(c))
            if (!P.leq(dst.grade(t.cell), src.grade(c))) return false;
    return true;
}

/// Every fiber has zero internal boundary.
inline bool is_strict(const GradedComplex& g) {
    const auto& X = g.complex();
    for (CellIndex c = 0; c < X.size(); ++c)
        for (const Term& t : X.boundary(c))
            if (g.grade(t.cell) == g.grade(c)) return false;
    return true;
}

/// Strictness as a filtering: for every join-irreducible down(s) of O(P),
/// the boundary of every chain on nu^{-1}(down(s)) lies on nu^{-1} of its
/// predecessor (the union of down(p), p < s).
inline bool is_strict_filtering(const GradedComplex& g) {
    const Poset& P = g.poset();
    const auto& X = g.complex();
    for (std::size_t s = 0; s < P.size(); ++s) {
        const ElementSet& piece = P.down(s);
        ElementSet pred = P.empty_set();
        for (std::size_t p = piece.find_first(); p != ElementSet::npos; p = piece.find_next(p))
            if (p != s) pred |= P.down(p);
        for (CellIndex c = 0; c < X.size(); ++c) {
            if (!piece.test(g.grade(c))) continue;
            for (const Term& t : X.boundary(c))
                if (!pred.test(g.grade(t.cell))) return false;
        }
    }
    return true;
}

/// Same complex, grades pushed forward along an order-preserving map P -> Q.
inline GradedComplex regrade(const GradedComplex& g, std::shared_ptr<const Poset> Q,
                             const std::vector<std::size_t>& map) {
    if (!order_preserving(g.poset(), *Q, map)) throw Error("regrading map is not order-preserving");
    std::vector<std::uint32_t> grades(g.size());
    for (CellIndex c = 0; c < g.size(); ++c) grades[c] = static_cast<std::uint32_t>(map[g.grade(c)]);
    return GradedComplex(g.complex_ptr(), std::move(Q), std::move(grades), g.cube());
}

struct FiberGraph {
    std::vector<std::string> labels;
    std::vector<IntPolynomial> polynomials;
    /// Hasse covers (lower, upper).
    std::vector<std::pair<std::size_t, std::size_t>> covers;

    const IntPolynomial& at(std::string_view label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return polynomials[i];
        throw Error("unknown poset element '" + std::string(label) + "'");
    }
};

inline FiberGraph fiber_graph(const GradedComplex& g) {
    FiberGraph out;
    const Poset& P = g.poset();
    out.labels = P.labels();
    std::vector<std::vector<std::int64_t>> counts(P.size());
    for (CellIndex c = 0; c < g.size(); ++c) {
        auto& v = counts[g.grade(c)];
        auto d = static_cast<std::size_t>(g.complex().dim(c));
        if (v.size() <= d) v.resize(d + 1, 0);
        ++v[d];
    }
    for (auto& v : counts) out.polynomials.emplace_back(std::move(v));
    out.covers = P.covers();
    return out;
}

/// d^pp = d^pp gamma^pp d^pp on every source cell, with all maps cut down
/// to their same-grade parts.
inline bool is_fiber_perfect(const Reduction& r, std::span<const std::uint32_t> grade) {
    const auto& X = r.source();
    auto diagonal = [&](const Chain& c, std::uint32_t p) {
        std::vector<Term> keep;
        for (const Term& t : c)
            if (grade[t.cell] == p) keep.push_back(t);
        return Chain(std::move(keep));
    };
    for (CellIndex c = 0; c < X.size(); ++c) {
        const std::uint32_t p = grade[c];
        Chain d = diagonal(boundary_of_cell(c, X), p);
        Chain gd = diagonal(r.gamma(d), p);
        Chain dgd = diagonal(boundary(gd, X), p);
        if (d != dgd) return false;
    }
    return true;
}

}  // namespace conley
