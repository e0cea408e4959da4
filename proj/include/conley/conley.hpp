// Iterated graded Morse reduction: homology of a complex and connection
// matrices of graded complexes, with the tower of reductions retained.
#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conley/cubical.hpp"
#include "conley/graded.hpp"
#include "conley/linalg.hpp"
#include "conley/morse.hpp"

namespace conley {

enum class Strategy {
    coreduction,
    coordinate,  // match along cubical axes first, then finish by coreduction
};

inline std::string_view to_string(Strategy s) { return s == Strategy::coreduction ? "coreduction" : "coordinate"; }

inline Strategy parse_strategy(std::string_view s) {
    if (s == "coreduction") return Strategy::coreduction;
    if (s == "coordinate") return Strategy::coordinate;
    throw Error("unknown strategy '" + std::string(s) + "'");
}

struct ConleyOptions {
    Strategy strategy = Strategy::coreduction;
    unsigned threads = 1;
    /// When false, only the composed reduction is kept.
    bool keep_tower = true;
};

struct TowerStep {
    Reduction reduction;
    std::string matcher;  // "coreduction" or "axis <i>"
};

struct ConleyResult {
    GradedComplex result;
    std::vector<TowerStep> tower;
    /// Source is the input complex, target is result.complex().
    Reduction composed;
    std::size_t steps = 0;
};

namespace detail {

class TowerBuilder {
public:
    TowerBuilder(const GradedComplex& g, const ConleyOptions& opt) : opt_(opt) {
        out_.result = g;
        const auto& order = g.poset().topological_order();
        block_rank_.resize(g.poset().size());
        for (std::size_t i = 0; i < order.size(); ++i) block_rank_[order[i]] = static_cast<std::uint32_t>(i);
    }

    const GradedComplex& current() const { return out_.result; }

    /// Applies one matching; false when it pairs nothing.
    bool step(Matching m, std::string matcher) {
        if (m.pair_count() == 0) return false;
        const GradedComplex& cur = out_.result;
        Reduction r = build_reduction(cur.complex_ptr(), std::move(m), opt_.threads);
        std::vector<std::uint32_t> grades;
        grades.reserve(r.embedding().size());
        for (CellIndex c : r.embedding()) grades.push_back(cur.grade(c));
        std::shared_ptr<const CubicalEmbedding> cube;
        if (cur.cube()) cube = std::make_shared<const CubicalEmbedding>(cur.cube()->select(r.embedding()));
        out_.result = GradedComplex(r.target_ptr(), cur.poset_ptr(), std::move(grades), std::move(cube));
        out_.composed = out_.steps == 0 ? r : compose(out_.composed, r);
        if (opt_.keep_tower) out_.tower.push_back({r, std::move(matcher)});
        ++out_.steps;
        return true;
    }

    bool coreduction_step() {
        const GradedComplex& cur = out_.result;
        return step(matching_coreduction(cur.complex(), cur.grades(), block_rank_, opt_.threads), "coreduction");
    }

    ConleyResult finish() {
        if (out_.steps == 0) out_.composed = Reduction::identity(out_.result.complex_ptr());
        if (!is_strict(out_.result)) throw Error("reduction tower stopped at a complex that is not strict");
        return std::move(out_);
    }

private:
    const ConleyOptions& opt_;
    ConleyResult out_;
    std::vector<std::uint32_t> block_rank_;
};

}  // namespace detail

/// Repeats fiber-wise matching and reduction until no fiber admits a pair.
/// The result is strict; its boundary is a connection matrix.
inline ConleyResult connection_matrix(const GradedComplex& g, const ConleyOptions& opt = {}) {
    detail::TowerBuilder tower(g, opt);
    if (opt.strategy == Strategy::coordinate) {
        auto cube = g.cube();
        if (!cube) throw Error("coordinate strategy needs a cubical complex");
        const std::size_t d = cube->axes();
        std::size_t idle = 0, axis = 0;
        while (idle < d) {
            if (tower.step(coordinate_matching(tower.current(), axis), "axis " + std::to_string(axis)))
                idle = 0;
            else
                ++idle;
            axis = (axis + 1) % d;
        }
    }
    while (tower.coreduction_step()) {
    }
    return tower.finish();
}

/// Homology by reduction to a minimal complex (one-point grading).
inline ConleyResult homology(std::shared_ptr<const CellComplex> X, const ConleyOptions& opt = {},
                             std::shared_ptr<const CubicalEmbedding> cube = nullptr) {
    return connection_matrix(GradedComplex::trivial(std::move(X), std::move(cube)), opt);
}

inline IntPolynomial poincare_polynomial(std::shared_ptr<const CellComplex> X, const ConleyOptions& opt = {}) {
    return f_polynomial(homology(std::move(X), opt).result.complex());
}

inline IntPolynomial poincare_polynomial(const CellComplex& X) {
    return poincare_polynomial(std::make_shared<const CellComplex>(X));
}

// ---------------------------------------------------------------------------
// Blocks of the connection matrix

/// Block of the boundary with columns on cells graded in J and rows on cells
/// graded in I. Column k lists (row position, coefficient).
struct SparseBlock {
    std::vector<CellIndex> rows, cols;
    std::vector<Chain> columns;

    bool is_zero() const {
        for (const auto& c : columns)
            if (!c.empty()) return false;
        return true;
    }
    std::size_t rank(const PrimeField& f) const { return conley::rank(columns, f); }
    Coefficient at(std::size_t row, std::size_t col) const {
        return columns[col].coefficient(static_cast<CellIndex>(row));
    }
};

inline SparseBlock connecting_block(const GradedComplex& g, const ElementSet& I, const ElementSet& J) {
    if (!is_convex(g.poset(), I) || !is_convex(g.poset(), J)) throw Error("block index sets must be convex");
    SparseBlock out;
    const auto& X = g.complex();
    std::vector<CellIndex> row_pos(X.size(), no_cell);
    for (CellIndex c = 0; c < X.size(); ++c) {
        if (I.test(g.grade(c))) {
            row_pos[c] = static_cast<CellIndex>(out.rows.size());
            out.rows.push_back(c);
        }
        if (J.test(g.grade(c))) out.cols.push_back(c);
    }
    for (CellIndex c : out.cols) {
        std::vector<Term> terms;
        for (const Term& t : X.boundary(c))
            if (row_pos[t.cell] != no_cell) terms.push_back({row_pos[t.cell], t.coef});
        out.columns.emplace_back(std::move(terms));
    }
    return out;
}

inline SparseBlock connecting_block(const ConleyResult& r, const ElementSet& I, const ElementSet& J) {
    return connecting_block(r.result, I, J);
}

struct BlockSummary {
    std::size_t to, from;  // poset elements: rows graded `to`, columns graded `from`
    std::size_t rows, cols, rank;
};

/// Nonzero off-diagonal blocks Delta^{pq} between single fibers, ordered
/// by (to, from).
inline std::vector<BlockSummary> nonzero_blocks(const GradedComplex& g) {
    const Poset& P = g.poset();
    const auto& X = g.complex();
    std::vector<std::uint8_t> seen(P.size() * P.size(), 0);
    for (CellIndex c = 0; c < X.size(); ++c)
        for (const Term& t : X.boundary(c)) seen[g.grade(t.cell) * P.size() + g.grade(c)] = 1;
    std::vector<BlockSummary> out;
    for (std::size_t p = 0; p < P.size(); ++p)
        for (std::size_t q = 0; q < P.size(); ++q) {
            if (p == q || !seen[p * P.size() + q]) continue;
            ElementSet I = P.empty_set(), J = P.empty_set();
            I.set(p);
            J.set(q);
            auto block = connecting_block(g, I, J);
            out.push_back({p, q, block.rows.size(), block.cols.size(), block.rank(X.field())});
        }
    return out;
}

struct BlockRankInvariant {
    static constexpr std::size_t whole = std::numeric_limits<std::size_t>::max();
    std::size_t p;  // `whole` for the principal down-set of q itself
    std::size_t q;
    int degree;     // rank of the degree-`degree` boundary on the block
    std::size_t rank;
    friend bool operator==(const BlockRankInvariant&, const BlockRankInvariant&) = default;
};

/// Ranks of the diagonal blocks Delta^{I,I} for I = down(q) and
/// I = down(q) \ down(p), split by degree. These depend only on the
/// isomorphism class of the Conley complex.
inline std::vector<BlockRankInvariant> block_rank_invariants(const GradedComplex& g) {
    const Poset& P = g.poset();
    const auto& X = g.complex();
    std::vector<BlockRankInvariant> out;
    auto add = [&](std::size_t p, std::size_t q, const ElementSet& I) {
        auto block = connecting_block(g, I, I);
        for (int j = 1; j <= std::max(X.max_dim(), 0); ++j) {
            std::vector<Chain> cols;
            for (std::size_t k = 0; k < block.cols.size(); ++k)
                if (X.dim(block.cols[k]) == j) cols.push_back(block.columns[k]);
            out.push_back({p, q, j, rank(std::move(cols), X.field())});
        }
    };
    for (std::size_t q = 0; q < P.size(); ++q) {
        add(BlockRankInvariant::whole, q, P.down(q));
        for (std::size_t p = 0; p < P.size(); ++p) {
            if (p == q) continue;
            ElementSet I = P.down(q) - P.down(p);
            if (I.none()) continue;
            add(p, q, I);
        }
    }
    return out;
}

inline FiberGraph conley_morse_graph(const ConleyResult& r) { return fiber_graph(r.result); }

}  // namespace conley
