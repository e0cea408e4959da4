// Persistent homology of down-set filtrations: persistent Betti numbers for
// arbitrary pairs, diagrams for linear extensions, and a direct-versus-Conley
// comparison.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conley/conley.hpp"
#include "conley/graded.hpp"
#include "conley/linalg.hpp"
#include "conley/order.hpp"

namespace conley {

/// beta_j^{a,b}: rank of H_j(nu^{-1}(a)) -> H_j(nu^{-1}(b)), computed as
/// dim(Z_j(a) + B_j(b)) - dim B_j(b).
inline std::size_t persistent_betti(const GradedComplex& g, const ElementSet& a, const ElementSet& b, int j) {
    const Poset& P = g.poset();
    if (!is_down_set(P, a) || !is_down_set(P, b)) throw Error("persistence needs down-sets");
    if (!a.is_subset_of(b)) throw Error("persistence pair needs a to be contained in b");
    const auto& X = g.complex();
    const auto& f = X.field();

    std::vector<CellIndex> cells_a;
    std::vector<Chain> cols_a, cols_b;
    for (CellIndex c = 0; c < X.size(); ++c) {
        if (X.dim(c) == j && a.test(g.grade(c))) {
            cells_a.push_back(c);
            cols_a.push_back(boundary_of_cell(c, X));
        }
        if (X.dim(c) == j + 1 && b.test(g.grade(c))) cols_b.push_back(boundary_of_cell(c, X));
    }
    auto kernel = kernel_basis(std::move(cols_a), f);
    std::vector<Chain> cycles;
    for (const Chain& k : kernel) {
        std::vector<Term> terms;
        for (const Term& t : k) terms.push_back({cells_a[t.cell], t.coef});
        cycles.emplace_back(std::move(terms));
    }
    std::size_t boundaries = rank(cols_b, f);
    cols_b.insert(cols_b.end(), cycles.begin(), cycles.end());
    return rank(std::move(cols_b), f) - boundaries;
}

struct PersistenceInterval {
    static constexpr std::size_t infinity = std::numeric_limits<std::size_t>::max();
    int dim;
    std::size_t birth;
    std::size_t death;  // infinity for essential classes
    friend bool operator==(const PersistenceInterval&, const PersistenceInterval&) = default;
    friend auto operator<=>(const PersistenceInterval&, const PersistenceInterval&) = default;
};

struct PersistenceDiagram {
    std::vector<PersistenceInterval> intervals;  // sorted
    /// Step i of the filtration is the down-set {extension[0..i]}.
    std::vector<std::size_t> extension;

    /// Intervals of dimension j alive on the whole step range [a, b].
    std::size_t betti(int j, std::size_t a, std::size_t b) const {
        std::size_t n = 0;
        for (const auto& iv : intervals)
            if (iv.dim == j && iv.birth <= a && iv.death > b) ++n;
        return n;
    }
};

/// Standard column reduction of the boundary matrix with cells ordered by
/// (step, dim, index). Zero-length pairs are dropped.
inline PersistenceDiagram diagram_total_order(const GradedComplex& g, const std::vector<std::size_t>& extension) {
    const Poset& P = g.poset();
    if (!is_linear_extension(P, extension)) throw Error("not a linear extension of the poset");
    const auto& X = g.complex();
    std::vector<std::size_t> step_of(P.size());
    for (std::size_t i = 0; i < extension.size(); ++i) step_of[extension[i]] = i;

    std::vector<CellIndex> order(X.size());
    for (CellIndex c = 0; c < X.size(); ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](CellIndex x, CellIndex y) {
        auto sx = step_of[g.grade(x)], sy = step_of[g.grade(y)];
        return sx != sy ? sx < sy : X.dim(x) < X.dim(y);
    });
    std::vector<CellIndex> pos(X.size());
    for (CellIndex i = 0; i < order.size(); ++i) pos[order[i]] = i;

    std::vector<Chain> cols;
    cols.reserve(X.size());
    for (CellIndex c : order) {
        std::vector<Term> terms;
        for (const Term& t : X.boundary(c)) terms.push_back({pos[t.cell], t.coef});
        cols.emplace_back(std::move(terms));
    }
    auto red = reduce_columns(std::move(cols), X.field());

    PersistenceDiagram out;
    out.extension = extension;
    std::vector<std::uint8_t> paired(X.size(), 0);
    for (auto [low, owner] : red.pivot_owner) {
        paired[low] = paired[owner] = 1;
        std::size_t birth = step_of[g.grade(order[low])], death = step_of[g.grade(order[owner])];
        if (birth != death) out.intervals.push_back({X.dim(order[low]), birth, death});
    }
    for (CellIndex i = 0; i < order.size(); ++i)
        if (!paired[i] && red.columns[i].empty())
            out.intervals.push_back({X.dim(order[i]), step_of[g.grade(order[i])], PersistenceInterval::infinity});
    std::sort(out.intervals.begin(), out.intervals.end());
    return out;
}

inline std::string format_death(std::size_t death) {
    return death == PersistenceInterval::infinity ? "inf" : std::to_string(death);
}

/// `dim,birth,death` with one row per interval.
inline std::string diagram_csv(const PersistenceDiagram& d) {
    std::ostringstream os;
    os << "dim,birth,death\n";
    for (const auto& iv : d.intervals) os << iv.dim << ',' << iv.birth << ',' << format_death(iv.death) << '\n';
    return os.str();
}

struct DownSetPair {
    ElementSet a, b;
};

/// Every pair a <= b of down-sets (the lattice must be enumerable).
inline std::vector<DownSetPair> all_down_set_pairs(const Poset& P, std::size_t cap = default_lattice_cap) {
    auto lattice = down_set_lattice(P, cap);
    std::vector<DownSetPair> out;
    for (const auto& a : lattice)
        for (const auto& b : lattice)
            if (a.is_subset_of(b)) out.push_back({a, b});
    return out;
}

struct PersistenceCheck {
    std::size_t checked = 0;
    std::vector<std::string> mismatches;
    bool ok() const { return mismatches.empty(); }
};

/// Compares beta_j^{a,b} of the input with those of its Conley complex on the
/// given pairs (all down-set pairs when empty), for every degree.
inline PersistenceCheck compare_persistence(const GradedComplex& g, const std::vector<DownSetPair>& pairs = {},
                                       const ConleyOptions& opt = {}) {
    PersistenceCheck report;
    ConleyResult r = connection_matrix(g, opt);
    const auto all = pairs.empty() ? all_down_set_pairs(g.poset()) : pairs;
    const int top = std::max(g.complex().max_dim(), 0);
    for (const auto& [a, b] : all) {
        for (int j = 0; j <= top; ++j) {
            ++report.checked;
            auto direct = persistent_betti(g, a, b, j);
            auto via = persistent_betti(r.result, a, b, j);
            if (direct != via)
                report.mismatches.push_back("beta_" + std::to_string(j) + "^{" + format_set(g.poset(), a) + "," +
                                            format_set(g.poset(), b) + "}: direct " + std::to_string(direct) +
                                            ", conley " + std::to_string(via));
        }
    }
    return report;
}

}  // namespace conley
