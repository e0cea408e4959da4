// Finite cell complexes (X, <=, kappa, dim) over GF(p) and their chain complexes.
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "conley/chain.hpp"
#include "conley/field.hpp"

namespace conley {

/// Sums a bag of terms (duplicates allowed) into a normalized chain.
inline Chain sum_terms(std::vector<Term> raw, const PrimeField& f) {
    std::sort(raw.begin(), raw.end(), [](const Term& a, const Term& b) { return a.cell < b.cell; });
    std::vector<Term> out;
    out.reserve(raw.size());
    for (const Term& t : raw) {
        if (!out.empty() && out.back().cell == t.cell)
            out.back().coef = f.add(out.back().coef, t.coef);
        else
            out.push_back({t.cell, f.reduce(t.coef)});
    }
    std::erase_if(out, [](const Term& t) { return t.coef == 0; });
    return Chain(std::move(out));
}

namespace detail {

/// Compressed sparse rows of (index, coefficient) pairs.
struct SparseRows {
    std::vector<std::size_t> offsets{0};
    std::vector<Term> entries;

    std::span<const Term> row(CellIndex i) const {
        return {entries.data() + offsets[i], entries.data() + offsets[i + 1]};
    }
    std::size_t rows() const { return offsets.size() - 1; }
};

inline SparseRows transpose(const SparseRows& rows, std::size_t n) {
    SparseRows out;
    std::vector<std::size_t> counts(n + 1, 0);
    for (const Term& t : rows.entries) ++counts[t.cell + 1];
    for (std::size_t i = 0; i < n; ++i) counts[i + 1] += counts[i];
    out.offsets = counts;
    out.entries.resize(rows.entries.size());
    std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
    for (CellIndex r = 0; r < rows.rows(); ++r)
        for (const Term& t : rows.row(r)) out.entries[fill[t.cell]++] = {r, t.coef};
    return out;
}

}  // namespace detail

/// A finite cell complex. Cells are addressed by dense indices in insertion
/// order; string ids are kept for I/O. The boundary is stored per cell as
/// (face, kappa) lists with a coboundary index built alongside. Immutable
/// once built.
class CellComplex {
public:
    class Builder;

    CellComplex() : field_(2) { boundary_.offsets = {0}; coboundary_.offsets = {0}; }

    std::size_t size() const { return dims_.size(); }
    bool empty() const { return dims_.empty(); }
    const PrimeField& field() const { return field_; }
    std::uint32_t modulus() const { return field_.modulus(); }

    const std::string& id(CellIndex c) const { return ids_[c]; }
    int dim(CellIndex c) const { return dims_[c]; }
    const std::vector<int>& dims() const { return dims_; }
    int max_dim() const { return dims_.empty() ? -1 : *std::max_element(dims_.begin(), dims_.end()); }

    std::optional<CellIndex> find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    CellIndex index_of(std::string_view id) const {
        if (auto c = find(id)) return *c;
        throw Error("unknown cell id '" + std::string(id) + "'");
    }

    /// kappa(c, face) != 0 entries, sorted by face index.
    std::span<const Term> boundary(CellIndex c) const { return boundary_.row(c); }
    /// kappa(coface, c) != 0 entries, sorted by coface index.
    std::span<const Term> coboundary(CellIndex c) const { return coboundary_.row(c); }

    Coefficient kappa(CellIndex cell, CellIndex face) const {
        auto row = boundary(cell);
        auto it = std::lower_bound(row.begin(), row.end(), face,
                                   [](const Term& t, CellIndex x) { return t.cell < x; });
        return (it != row.end() && it->cell == face) ? it->coef : 0;
    }

    /// Face relations supplied explicitly in addition to the kappa support.
    std::span<const CellIndex> explicit_faces(CellIndex c) const {
        if (explicit_faces_.empty()) return {};
        return {explicit_faces_flat_.data() + explicit_faces_[c], explicit_faces_flat_.data() + explicit_faces_[c + 1]};
    }
    std::span<const CellIndex> explicit_cofaces(CellIndex c) const {
        if (explicit_cofaces_.empty()) return {};
        return {explicit_cofaces_flat_.data() + explicit_cofaces_[c],
                explicit_cofaces_flat_.data() + explicit_cofaces_[c + 1]};
    }
    bool has_explicit_faces() const { return !explicit_faces_flat_.empty(); }

    std::size_t incidence_count() const { return boundary_.entries.size(); }

private:
    friend class Builder;

    PrimeField field_;
    std::vector<std::string> ids_;
    std::vector<int> dims_;
    std::unordered_map<std::string, CellIndex> index_;
    detail::SparseRows boundary_;
    detail::SparseRows coboundary_;
    std::vector<std::size_t> explicit_faces_;
    std::vector<CellIndex> explicit_faces_flat_;
    std::vector<std::size_t> explicit_cofaces_;
    std::vector<CellIndex> explicit_cofaces_flat_;
};

/// Single-owner mutable builder. Boundary entries may reference cells added
/// later; references are resolved in build().
class CellComplex::Builder {
public:
    explicit Builder(std::uint32_t modulus = 2) : field_(modulus) {}
    explicit Builder(PrimeField field) : field_(field) {}

    const PrimeField& field() const { return field_; }
    std::size_t size() const { return dims_.size(); }

    CellIndex add_cell(std::string id, int dim) {
        if (dim < 0) throw Error("cell '" + id + "' has negative dimension");
        auto [it, inserted] = index_.emplace(id, static_cast<CellIndex>(dims_.size()));
        if (!inserted) throw Error("duplicate cell id '" + id + "'");
        ids_.push_back(std::move(id));
        dims_.push_back(dim);
        return it->second;
    }

    void add_boundary(CellIndex cell, CellIndex face, std::int64_t coef) {
        Coefficient c = field_.reduce(coef);
        if (c != 0) raw_boundary_.push_back({cell, face, c});
    }
    void add_boundary(std::string_view cell, std::string_view face, std::int64_t coef) {
        pending_.push_back({std::string(cell), std::string(face), coef, false});
    }
    void add_face(CellIndex cell, CellIndex face) { raw_faces_.push_back({cell, face}); }
    void add_face(std::string_view cell, std::string_view face) {
        pending_.push_back({std::string(cell), std::string(face), 0, true});
    }

    /// Throws on duplicate (cell, face) boundary entries or unknown ids.
    CellComplex build() {
        for (auto& p : pending_) {
            CellIndex c = lookup(p.cell), f = lookup(p.face);
            if (p.is_face)
                add_face(c, f);
            else
                add_boundary(c, f, p.coef);
        }
        pending_.clear();

        CellComplex out;
        out.field_ = field_;
        const std::size_t n = dims_.size();
        std::sort(raw_boundary_.begin(), raw_boundary_.end(), [](const RawEntry& a, const RawEntry& b) {
            return a.cell != b.cell ? a.cell < b.cell : a.face < b.face;
        });
        out.boundary_.offsets.assign(n + 1, 0);
        out.boundary_.entries.reserve(raw_boundary_.size());
        for (std::size_t i = 0; i < raw_boundary_.size(); ++i) {
            const auto& e = raw_boundary_[i];
            if (e.cell >= n || e.face >= n) throw Error("boundary entry references a missing cell");
            if (i > 0 && raw_boundary_[i - 1].cell == e.cell && raw_boundary_[i - 1].face == e.face)
                throw Error("duplicate boundary entry (" + ids_[e.cell] + ", " + ids_[e.face] + ")");
            out.boundary_.entries.push_back({e.face, e.coef});
            ++out.boundary_.offsets[e.cell + 1];
        }
        for (std::size_t i = 0; i < n; ++i) out.boundary_.offsets[i + 1] += out.boundary_.offsets[i];
        out.coboundary_ = detail::transpose(out.boundary_, n);

        if (!raw_faces_.empty()) {
            auto build_csr = [n](std::vector<std::pair<CellIndex, CellIndex>> pairs, std::vector<std::size_t>& offs,
                                 std::vector<CellIndex>& flat) {
                std::sort(pairs.begin(), pairs.end());
                pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
                offs.assign(n + 1, 0);
                for (auto& [a, b] : pairs) ++offs[a + 1];
                for (std::size_t i = 0; i < n; ++i) offs[i + 1] += offs[i];
                flat.reserve(pairs.size());
                for (auto& [a, b] : pairs) flat.push_back(b);
            };
            std::vector<std::pair<CellIndex, CellIndex>> down, up;
            for (auto [c, f] : raw_faces_) {
                if (c >= n || f >= n) throw Error("face relation references a missing cell");
                down.push_back({c, f});
                up.push_back({f, c});
            }
            build_csr(std::move(down), out.explicit_faces_, out.explicit_faces_flat_);
            build_csr(std::move(up), out.explicit_cofaces_, out.explicit_cofaces_flat_);
        }

        out.ids_ = std::move(ids_);
        out.dims_ = std::move(dims_);
        out.index_ = std::move(index_);
        *this = Builder(field_);
        return out;
    }

private:
    struct RawEntry {
        CellIndex cell, face;
        Coefficient coef;
    };
    struct Pending {
        std::string cell, face;
        std::int64_t coef;
        bool is_face;
    };

    CellIndex lookup(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw Error("unknown cell id '" + id + "'");
        return it->second;
    }

    PrimeField field_;
    std::vector<std::string> ids_;
    std::vector<int> dims_;
    std::unordered_map<std::string, CellIndex> index_;
    std::vector<RawEntry> raw_boundary_;
    std::vector<std::pair<CellIndex, CellIndex>> raw_faces_;
    std::vector<Pending> pending_;
};

// ---------------------------------------------------------------------------
// Chains

/// Linear extension of d(xi) = sum kappa(xi, xi') xi'.
inline Chain boundary(const Chain& c, const CellComplex& X) {
    std::vector<Term> raw;
    for (const Term& t : c) {
        if (t.cell >= X.size()) throw Error("chain references a cell outside the complex");
        for (const Term& f : X.boundary(t.cell)) raw.push_back({f.cell, X.field().mul(t.coef, f.coef)});
    }
    return sum_terms(std::move(raw), X.field());
}

inline Chain boundary_of_cell(CellIndex cell, const CellComplex& X) {
    auto row = X.boundary(cell);
    return Chain(std::vector<Term>(row.begin(), row.end()));
}

/// Builds a chain from (id, coefficient) pairs.
inline Chain make_chain(const CellComplex& X, std::initializer_list<std::pair<std::string_view, std::int64_t>> terms) {
    std::vector<Term> raw;
    for (auto& [id, coef] : terms) raw.push_back({X.index_of(id), X.field().reduce(coef)});
    return sum_terms(std::move(raw), X.field());
}

inline std::string format_chain(const CellComplex& X, const Chain& c) {
    if (c.empty()) return "0";
    std::string out;
    for (const Term& t : c) {
        if (!out.empty()) out += " + ";
        if (t.coef != 1) out += std::to_string(t.coef) + "*";
        out += X.id(t.cell);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
    dimension_mismatch,      // kappa(x, y) != 0 but dim x != dim y + 1
    boundary_squared,        // sum_y kappa(x, y) kappa(y, z) != 0
    face_order_dimension,    // explicit face of larger dimension
    face_order_cycle,        // face relation is not antisymmetric
};

inline std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::dimension_mismatch: return "dimension";
        case ViolationKind::boundary_squared: return "boundary-squared";
        case ViolationKind::face_order_dimension: return "face-order-dimension";
        case ViolationKind::face_order_cycle: return "face-order-cycle";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    std::string cell;
    std::string other;
};

struct ValidationReport {
    static constexpr std::size_t max_violations = 100;

    std::vector<Violation> violations;
    bool truncated = false;

    bool ok() const { return violations.empty(); }

    void add(ViolationKind kind, std::string cell, std::string other) {
        if (violations.size() >= max_violations) {
            truncated = true;
            return;
        }
        violations.push_back({kind, std::move(cell), std::move(other)});
    }

    std::string to_string() const {
        std::ostringstream os;
        for (const auto& v : violations)
            os << "violation " << conley::to_string(v.kind) << ": " << v.cell << " -> " << v.other << "\n";
        if (truncated) os << "(further violations truncated)\n";
        return os.str();
    }
};

/// Checks the three cell-complex conditions. Never throws.
inline ValidationReport validate(const CellComplex& X) {
    ValidationReport report;
    const auto& f = X.field();
    for (CellIndex c = 0; c < X.size(); ++c)
        for (const Term& t : X.boundary(c))
            if (X.dim(c) != X.dim(t.cell) + 1) report.add(ViolationKind::dimension_mismatch, X.id(c), X.id(t.cell));

    ChainAccumulator acc(X.size());
    for (CellIndex c = 0; c < X.size() && !report.truncated; ++c) {
        for (const Term& t : X.boundary(c))
            for (const Term& s : X.boundary(t.cell)) acc.add(s.cell, f.mul(t.coef, s.coef), f);
        Chain dd = acc.take();
        for (const Term& t : dd) report.add(ViolationKind::boundary_squared, X.id(c), X.id(t.cell));
    }

    if (X.has_explicit_faces()) {
        for (CellIndex c = 0; c < X.size(); ++c)
            for (CellIndex face : X.explicit_faces(c))
                if (X.dim(face) > X.dim(c)) report.add(ViolationKind::face_order_dimension, X.id(c), X.id(face));
        // Kahn's algorithm over the union of kappa-support and explicit relations.
        std::vector<std::size_t> indeg(X.size(), 0);
        for (CellIndex c = 0; c < X.size(); ++c) {
            for (const Term& t : X.boundary(c))
                if (t.cell != c) ++indeg[t.cell];
            for (CellIndex face : X.explicit_faces(c))
                if (face != c) ++indeg[face];
        }
        std::vector<CellIndex> stack;
        for (CellIndex c = 0; c < X.size(); ++c)
            if (indeg[c] == 0) stack.push_back(c);
        std::size_t seen = 0;
        while (!stack.empty()) {
            CellIndex c = stack.back();
            stack.pop_back();
            ++seen;
            auto relax = [&](CellIndex face) {
                if (face != c && --indeg[face] == 0) stack.push_back(face);
            };
            for (const Term& t : X.boundary(c)) relax(t.cell);
            for (CellIndex face : X.explicit_faces(c)) relax(face);
        }
        if (seen != X.size())
            for (CellIndex c = 0; c < X.size(); ++c)
                if (indeg[c] != 0) report.add(ViolationKind::face_order_cycle, X.id(c), X.id(c));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Face order queries

namespace detail {

template <class Next>
std::vector<CellIndex> reach(const CellComplex& X, std::span<const CellIndex> seeds, Next&& next) {
    std::vector<std::uint8_t> seen(X.size(), 0);
    std::vector<CellIndex> out, stack(seeds.begin(), seeds.end());
    for (CellIndex s : seeds) seen[s] = 1;
    while (!stack.empty()) {
        CellIndex c = stack.back();
        stack.pop_back();
        out.push_back(c);
        next(c, [&](CellIndex n) {
            if (!seen[n]) {
                seen[n] = 1;
                stack.push_back(n);
            }
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Down-set of the given cells in the face order, sorted.
inline std::vector<CellIndex> closure(const CellComplex& X, std::span<const CellIndex> cells) {
    for (CellIndex c : cells)
        if (c >= X.size()) throw Error("unknown cell index");
    return detail::reach(X, cells, [&X](CellIndex c, auto&& visit) {
        for (const Term& t : X.boundary(c)) visit(t.cell);
        for (CellIndex f : X.explicit_faces(c)) visit(f);
    });
}

/// Up-set of the given cells in the face order, sorted.
inline std::vector<CellIndex> star(const CellComplex& X, std::span<const CellIndex> cells) {
    for (CellIndex c : cells)
        if (c >= X.size()) throw Error("unknown cell index");
    return detail::reach(X, cells, [&X](CellIndex c, auto&& visit) {
        for (const Term& t : X.coboundary(c)) visit(t.cell);
        for (CellIndex f : X.explicit_cofaces(c)) visit(f);
    });
}

inline std::vector<CellIndex> closure(const CellComplex& X, CellIndex cell) { return closure(X, std::span(&cell, 1)); }
inline std::vector<CellIndex> star(const CellComplex& X, CellIndex cell) { return star(X, std::span(&cell, 1)); }

/// face <= cell in the face order.
inline bool face_leq(const CellComplex& X, CellIndex face, CellIndex cell) {
    if (face == cell) return true;
    if (X.dim(face) > X.dim(cell) && !X.has_explicit_faces()) return false;
    auto down = closure(X, cell);
    return std::binary_search(down.begin(), down.end(), face);
}

/// Cells maximal in the face order.
inline std::vector<CellIndex> top_cells(const CellComplex& X) {
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < X.size(); ++c)
        if (X.coboundary(c).empty() && X.explicit_cofaces(c).empty()) out.push_back(c);
    return out;
}

inline bool is_convex(const CellComplex& X, std::span<const CellIndex> cells) {
    auto up = star(X, cells);
    auto down = closure(X, cells);
    std::vector<CellIndex> both;
    std::set_intersection(up.begin(), up.end(), down.begin(), down.end(), std::back_inserter(both));
    std::vector<CellIndex> s(cells.begin(), cells.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return both == s;
}

/// Restriction to a sorted, duplicate-free cell subset without a convexity
/// check. Kappa and explicit faces are restricted; ids and relative order kept.
inline CellComplex restrict_unchecked(const CellComplex& X, std::span<const CellIndex> sorted_cells) {
    std::vector<CellIndex> new_index(X.size(), static_cast<CellIndex>(-1));
    CellComplex::Builder b(X.field());
    for (CellIndex c : sorted_cells) new_index[c] = b.add_cell(X.id(c), X.dim(c));
    for (CellIndex c : sorted_cells) {
        for (const Term& t : X.boundary(c))
            if (new_index[t.cell] != static_cast<CellIndex>(-1)) b.add_boundary(new_index[c], new_index[t.cell], t.coef);
        for (CellIndex f : X.explicit_faces(c))
            if (new_index[f] != static_cast<CellIndex>(-1)) b.add_face(new_index[c], new_index[f]);
    }
    return b.build();
}

/// Subcomplex on a convex subset; throws if the subset is not convex.
inline CellComplex restrict(const CellComplex& X, std::span<const CellIndex> cells) {
    std::vector<CellIndex> s(cells.begin(), cells.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (!is_convex(X, s)) throw Error("cell subset is not convex in the face order");
    return restrict_unchecked(X, s);
}

inline IntPolynomial f_polynomial(const CellComplex& X) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(X.max_dim() + 1), 0);
    for (int d : X.dims()) ++counts[static_cast<std::size_t>(d)];
    return IntPolynomial(std::move(counts));
}

}  // namespace conley
