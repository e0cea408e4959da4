// Acyclic partial matchings, the splitting homotopy they induce, and the
// reductions (psi, phi, gamma) built from them, including composition.
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "conley/complex.hpp"
#include "conley/parallel.hpp"

namespace conley {

/// Role of a cell in a matching (A, w: Q -> K).
enum class MatchRole : std::uint8_t {
    critical,  // A
    lower,     // Q, the face side of a pair
    upper,     // K = w(Q)
};

inline constexpr CellIndex no_cell = static_cast<CellIndex>(-1);

/// An acyclic partial matching. Lower cells carry a rank that is a linear
/// extension of the relation x << y iff kappa(w(y), x) != 0.
class Matching {
public:
    Matching() = default;

    std::size_t size() const { return role_.size(); }
    MatchRole role(CellIndex c) const { return role_[c]; }
    bool is_critical(CellIndex c) const { return role_[c] == MatchRole::critical; }
    /// Partner of a matched cell, no_cell for critical cells.
    CellIndex mate(CellIndex c) const { return mate_[c]; }
    std::uint64_t rank(CellIndex c) const { return rank_[c]; }

    std::size_t pair_count() const { return pairs_; }
    std::size_t critical_count() const { return size() - 2 * pairs_; }

    std::vector<CellIndex> critical_cells() const {
        std::vector<CellIndex> out;
        out.reserve(critical_count());
        for (CellIndex c = 0; c < size(); ++c)
            if (is_critical(c)) out.push_back(c);
        return out;
    }

    /// Builds and validates a matching from (lower, upper) pairs. A pair
    /// needs kappa(upper, lower) != 0. With prune_cycles, pairs that sit on
    /// or behind a cycle of << are dropped (both cells become critical);
    /// otherwise a cycle throws.
    static Matching from_pairs(const CellComplex& X, const std::vector<std::pair<CellIndex, CellIndex>>& pairs,
                               bool prune_cycles = false) {
        Matching m(X.size());
        for (auto [lo, up] : pairs) {
            if (lo >= X.size() || up >= X.size()) throw Error("matching pair references a missing cell");
            if (lo == up || m.role_[lo] != MatchRole::critical || m.role_[up] != MatchRole::critical)
                throw Error("matching pairs overlap at cell '" + X.id(m.role_[lo] != MatchRole::critical ? lo : up) + "'");
            if (X.kappa(up, lo) == 0)
                throw Error("matched cells '" + X.id(lo) + "' and '" + X.id(up) + "' have zero incidence");
            m.role_[lo] = MatchRole::lower;
            m.role_[up] = MatchRole::upper;
            m.mate_[lo] = up;
            m.mate_[up] = lo;
        }
        m.pairs_ = pairs.size();

        // Kahn over edges x -> y for x << y.
        std::vector<std::uint32_t> indeg(X.size(), 0);
        std::vector<CellIndex> queue;
        for (auto [lo, up] : pairs) {
            for (const Term& t : X.boundary(up))
                if (t.cell != lo && m.role_[t.cell] == MatchRole::lower) ++indeg[lo];
        }
        for (auto [lo, up] : pairs)
            if (indeg[lo] == 0) queue.push_back(lo);
        std::uint64_t next_rank = 0;
        std::size_t head = 0;
        while (head < queue.size()) {
            CellIndex x = queue[head++];
            m.rank_[x] = next_rank++;
            // successors y of x: x is a face of w(y); y is lower.
            for (const Term& t : X.coboundary(x)) {
                if (m.role_[t.cell] != MatchRole::upper) continue;
                CellIndex y = m.mate_[t.cell];
                if (y == x) continue;
                if (--indeg[y] == 0) queue.push_back(y);
            }
        }
        if (queue.size() != pairs.size()) {
            if (!prune_cycles) throw Error("matching is not acyclic");
            std::vector<std::uint8_t> ranked(X.size(), 0);
            for (CellIndex x : queue) ranked[x] = 1;
            for (auto [lo, up] : pairs) {
                if (ranked[lo]) continue;
                m.role_[lo] = m.role_[up] = MatchRole::critical;
                m.mate_[lo] = m.mate_[up] = no_cell;
                --m.pairs_;
            }
        }
        return m;
    }

    /// Used by matching algorithms that produce ranks directly.
    explicit Matching(std::size_t n) : role_(n, MatchRole::critical), mate_(n, no_cell), rank_(n, 0) {}
    void set_pair(CellIndex lower, CellIndex upper, std::uint64_t rank) {
        role_[lower] = MatchRole::lower;
        role_[upper] = MatchRole::upper;
        mate_[lower] = upper;
        mate_[upper] = lower;
        rank_[lower] = rank;
    }
    void set_pair_count(std::size_t n) { pairs_ = n; }

private:
    std::vector<MatchRole> role_;
    std::vector<CellIndex> mate_;
    std::vector<std::uint64_t> rank_;
    std::size_t pairs_ = 0;
};

// ---------------------------------------------------------------------------
// Coreduction-based matching

namespace detail {

/// Coreduction matching restricted to one block of cells (a fiber). Only
/// incidences between cells of the same block are seen. Writes into the
/// shared per-cell arrays, which no other block touches.
struct CoreductionState {
    const CellComplex& X;
    std::span<const std::uint32_t> block_of;  // empty: one block
    std::vector<std::uint32_t> live_faces;
    std::vector<std::uint8_t> alive;
    Matching& out;

    bool same_block(CellIndex a, CellIndex b) const { return block_of.empty() || block_of[a] == block_of[b]; }

    std::size_t run(std::span<const CellIndex> cells, std::uint64_t rank_base) {
        // Cells in (dim, index) order for the free-cell fallback.
        std::vector<CellIndex> by_dim(cells.begin(), cells.end());
        std::stable_sort(by_dim.begin(), by_dim.end(), [&](CellIndex a, CellIndex b) { return X.dim(a) < X.dim(b); });

        std::deque<CellIndex> queue;
        for (CellIndex c : cells) {
            alive[c] = 1;
            std::uint32_t n = 0;
            for (const Term& t : X.boundary(c))
                if (same_block(c, t.cell)) ++n;
            live_faces[c] = n;
        }
        for (CellIndex c : cells)
            if (live_faces[c] == 1) queue.push_back(c);

        auto excise = [&](CellIndex c) {
            alive[c] = 0;
            for (const Term& t : X.coboundary(c)) {
                if (!alive[t.cell] || !same_block(c, t.cell)) continue;
                if (--live_faces[t.cell] == 1) queue.push_back(t.cell);
            }
        };

        std::size_t pairs = 0, remaining = cells.size(), cursor = 0;
        std::uint64_t rank = rank_base;
        while (remaining > 0) {
            while (!queue.empty()) {
                CellIndex up = queue.front();
                queue.pop_front();
                if (!alive[up] || live_faces[up] != 1) continue;
                CellIndex lo = no_cell;
                for (const Term& t : X.boundary(up))
                    if (alive[t.cell] && same_block(up, t.cell)) {
                        lo = t.cell;
                        break;
                    }
                out.set_pair(lo, up, rank++);
                ++pairs;
                remaining -= 2;
                alive[up] = 0;  // so lo's excision does not re-queue it
                excise(lo);
                excise(up);
            }
            if (remaining == 0) break;
            // No coreduction pair: a live cell of minimal dimension is free.
            while (!alive[by_dim[cursor]]) ++cursor;
            CellIndex free_cell = by_dim[cursor];
            --remaining;
            excise(free_cell);
        }
        return pairs;
    }
};

}  // namespace detail

/// Coreduction-based acyclic matching. With `block_of`, pairs only form
/// inside blocks (fibers of a grading) and `block_rank[b]` must order blocks
/// along a linear extension, so ranks stay a linear extension of <<
/// across blocks.
inline Matching matching_coreduction(const CellComplex& X, std::span<const std::uint32_t> block_of = {},
                                     std::span<const std::uint32_t> block_rank = {}, unsigned threads = 1) {
    Matching m(X.size());
    detail::CoreductionState state{X, block_of, std::vector<std::uint32_t>(X.size(), 0),
                                   std::vector<std::uint8_t>(X.size(), 0), m};
    if (block_of.empty()) {
        std::vector<CellIndex> all(X.size());
        for (CellIndex c = 0; c < X.size(); ++c) all[c] = c;
        m.set_pair_count(state.run(all, 0));
        return m;
    }
    std::uint32_t n_blocks = 0;
    for (auto b : block_of) n_blocks = std::max(n_blocks, b + 1);
    std::vector<std::vector<CellIndex>> blocks(n_blocks);
    for (CellIndex c = 0; c < X.size(); ++c) blocks[block_of[c]].push_back(c);
    std::vector<std::size_t> pair_counts(n_blocks, 0);
    parallel_for(n_blocks, threads, [&](std::size_t begin, std::size_t end, unsigned) {
        for (std::size_t b = begin; b < end; ++b) {
            std::uint64_t base = (block_rank.empty() ? std::uint64_t(b) : std::uint64_t(block_rank[b])) << 32;
            pair_counts[b] = state.run(blocks[b], base);
        }
    });
    std::size_t total = 0;
    for (auto p : pair_counts) total += p;
    m.set_pair_count(total);
    return m;
}

/// Problems found by an independent re-check of the matching invariants.
inline std::vector<std::string> check_matching(const CellComplex& X, const Matching& m,
                                               std::span<const std::uint32_t> grade = {}) {
    std::vector<std::string> problems;
    if (m.size() != X.size()) return {"matching size differs from complex size"};
    std::size_t lower = 0, upper = 0;
    for (CellIndex c = 0; c < X.size(); ++c) {
        if (m.role(c) == MatchRole::critical) continue;
        CellIndex mate = m.mate(c);
        if (mate == no_cell || m.mate(mate) != c) {
            problems.push_back("broken pair at " + X.id(c));
            continue;
        }
        if (m.role(c) == MatchRole::lower) {
            ++lower;
            if (m.role(mate) != MatchRole::upper) problems.push_back("pair roles inconsistent at " + X.id(c));
            if (X.kappa(mate, c) == 0) problems.push_back("zero incidence in pair " + X.id(c) + "," + X.id(mate));
            if (!grade.empty() && grade[c] != grade[mate]) problems.push_back("pair crosses fibers at " + X.id(c));
        } else {
            ++upper;
        }
    }
    if (lower != upper) problems.push_back("|Q| != |K|");
    // Cycle detection by iterative DFS colouring on <<.
    std::vector<std::uint8_t> colour(X.size(), 0);
    for (CellIndex s = 0; s < X.size(); ++s) {
        if (m.role(s) != MatchRole::lower || colour[s] != 0) continue;
        std::vector<std::pair<CellIndex, std::size_t>> stack{{s, 0}};
        colour[s] = 1;
        while (!stack.empty()) {
            auto& [y, i] = stack.back();
            auto faces = X.boundary(m.mate(y));
            if (i == faces.size()) {
                colour[y] = 2;
                stack.pop_back();
                continue;
            }
            CellIndex x = faces[i++].cell;
            if (x == y || m.role(x) != MatchRole::lower) continue;
            if (colour[x] == 1) {
                problems.push_back("cycle through " + X.id(x));
                return problems;
            }
            if (colour[x] == 0) {
                colour[x] = 1;
                stack.push_back({x, 0});
            }
        }
    }
    return problems;
}

// ---------------------------------------------------------------------------
// V and Gamma

/// V(x) = kappa(w(x), x)^{-1} w(x) for lower x, zero otherwise.
inline Chain v_map(const CellComplex& X, const Matching& m, CellIndex x) {
    if (m.role(x) != MatchRole::lower) return {};
    CellIndex up = m.mate(x);
    return Chain::basis(up).scaled(X.field().inv(X.kappa(up, x)), X.field());
}

/// Reusable scratch state for evaluating the splitting homotopy of one
/// matching. Not thread-safe; use one engine per thread.
class GammaEngine {
public:
    GammaEngine(const CellComplex& X, const Matching& m) : X_(X), m_(m), acc_(X.size()), queued_(X.size(), 0) {}

    /// Returns gamma(x); when `residual` is given it receives x - d(gamma(x)),
    /// which lies in span(A) + span(K).
    Chain run(const Chain& x, Chain* residual = nullptr) {
        const auto& f = X_.field();
        using Entry = std::pair<std::uint64_t, CellIndex>;
        std::priority_queue<Entry> heap;
        auto touch = [&](CellIndex c) {
            if (m_.role(c) == MatchRole::lower && !queued_[c]) {
                queued_[c] = 1;
                heap.push({m_.rank(c), c});
            }
        };
        for (const Term& t : x) {
            acc_.add(t.cell, t.coef, f);
            touch(t.cell);
        }
        std::vector<Term> out;
        while (!heap.empty()) {
            auto [r, q] = heap.top();
            heap.pop();
            queued_[q] = 0;
            Coefficient a = acc_.get(q);
            if (a == 0) continue;
            CellIndex up = m_.mate(q);
            Coefficient scale = f.div(a, X_.kappa(up, q));
            out.push_back({up, scale});
            Coefficient minus = f.neg(scale);
            for (const Term& t : X_.boundary(up)) {
                acc_.add(t.cell, f.mul(minus, t.coef), f);
                if (t.cell != q && m_.role(t.cell) == MatchRole::lower && m_.rank(t.cell) >= r) {
                    acc_.clear();
                    for (; !heap.empty(); heap.pop()) queued_[heap.top().second] = 0;
                    throw Error("gamma did not terminate: matching is not acyclic");
                }
                touch(t.cell);
            }
        }
        if (residual)
            *residual = acc_.take();
        else
            acc_.clear();
        return sum_terms(std::move(out), f);
    }

private:
    const CellComplex& X_;
    const Matching& m_;
    ChainAccumulator acc_;
    std::vector<std::uint8_t> queued_;
};

inline Chain gamma(const CellComplex& X, const Matching& m, const Chain& c) {
    GammaEngine engine(X, m);
    return engine.run(c);
}

/// Reference evaluation of gamma = sum_i V (id - dV)^i until the iterate
/// vanishes. Quadratic; meant for cross-checking GammaEngine.
inline Chain gamma_series(const CellComplex& X, const Matching& m, const Chain& c, std::size_t max_terms = 0) {
    const auto& f = X.field();
    auto apply_v = [&](const Chain& x) {
        Chain out;
        for (const Term& t : x) out.add_scaled(v_map(X, m, t.cell), t.coef, f);
        return out;
    };
    if (max_terms == 0) max_terms = X.size() + 2;
    Chain total, iterate = c;
    for (std::size_t i = 0; i < max_terms && !iterate.empty(); ++i) {
        Chain v = apply_v(iterate);
        total.add_scaled(v, 1, f);
        // iterate <- (id - dV) iterate
        iterate.add_scaled(boundary(v, X), f.neg(1), f);
        if (v.empty()) break;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Reductions

namespace detail {

struct ReductionImpl {
    std::shared_ptr<const CellComplex> source, target;
    /// target index -> source index of the surviving cell.
    std::vector<CellIndex> embedding;

    virtual ~ReductionImpl() = default;
    virtual Chain psi(CellIndex source_cell) const = 0;
    virtual Chain phi(CellIndex target_cell) const = 0;
    virtual Chain gamma(CellIndex source_cell) const = 0;
};

template <class Fn>
Chain apply_linear(const Chain& c, const PrimeField& f, Fn&& column) {
    Chain out;
    for (const Term& t : c) out.add_scaled(column(t.cell), t.coef, f);
    return out;
}

/// Thread-safe memo of per-basis-cell columns.
class ColumnCache {
public:
    template <class Make>
    Chain get(CellIndex c, Make&& make) const {
        {
            std::lock_guard lock(mutex_);
            auto it = cache_.find(c);
            if (it != cache_.end()) return it->second;
        }
        Chain value = make();
        std::lock_guard lock(mutex_);
        return cache_.emplace(c, std::move(value)).first->second;
    }

private:
    mutable std::mutex mutex_;
    mutable std::unordered_map<CellIndex, Chain> cache_;
};

struct IdentityReduction final : ReductionImpl {
    Chain psi(CellIndex c) const override { return Chain::basis(c); }
    Chain phi(CellIndex c) const override { return Chain::basis(c); }
    Chain gamma(CellIndex) const override { return {}; }
};

struct MorseReduction final : ReductionImpl {
    Matching matching;
    std::vector<CellIndex> target_of;  // source -> target index, no_cell if not critical

    mutable std::mutex pool_mutex;
    mutable std::vector<std::unique_ptr<GammaEngine>> pool;
    ColumnCache gamma_cache, psi_cache, phi_cache;

    template <class Fn>
    auto with_engine(Fn&& fn) const {
        std::unique_ptr<GammaEngine> engine;
        {
            std::lock_guard lock(pool_mutex);
            if (!pool.empty()) {
                engine = std::move(pool.back());
                pool.pop_back();
            }
        }
        if (!engine) engine = std::make_unique<GammaEngine>(*source, matching);
        auto result = fn(*engine);
        std::lock_guard lock(pool_mutex);
        pool.push_back(std::move(engine));
        return result;
    }

    Chain project(const Chain& c) const {
        std::vector<Term> terms;
        for (const Term& t : c)
            if (target_of[t.cell] != no_cell) terms.push_back({target_of[t.cell], t.coef});
        return Chain(std::move(terms));
    }

    Chain gamma(CellIndex c) const override {
        return gamma_cache.get(c, [&] { return with_engine([&](GammaEngine& e) { return e.run(Chain::basis(c)); }); });
    }
    // psi = pi_A (id - d gamma): the Gamma residual, projected.
    Chain psi(CellIndex c) const override {
        return psi_cache.get(c, [&] {
            return with_engine([&](GammaEngine& e) {
                Chain residual;
                e.run(Chain::basis(c), &residual);
                return project(residual);
            });
        });
    }
    // phi = (id - gamma d) iota_A
    Chain phi(CellIndex a) const override {
        return phi_cache.get(a, [&] {
            CellIndex c = embedding[a];
            Chain out = Chain::basis(c);
            Chain g = with_engine([&](GammaEngine& e) { return e.run(boundary_of_cell(c, *source)); });
            out.add_scaled(g, source->field().neg(1), source->field());
            return out;
        });
    }
};

struct ComposedReduction final : ReductionImpl {
    std::shared_ptr<const ReductionImpl> first, second;

    Chain psi(CellIndex c) const override {
        const auto& f = source->field();
        return apply_linear(first->psi(c), f, [&](CellIndex m) { return second->psi(m); });
    }
    Chain phi(CellIndex a) const override {
        const auto& f = source->field();
        return apply_linear(second->phi(a), f, [&](CellIndex m) { return first->phi(m); });
    }
    // gamma'' = gamma + phi gamma' psi
    Chain gamma(CellIndex c) const override {
        const auto& f = source->field();
        Chain out = first->gamma(c);
        Chain inner = apply_linear(first->psi(c), f, [&](CellIndex m) { return second->gamma(m); });
        out.add_scaled(apply_linear(inner, f, [&](CellIndex m) { return first->phi(m); }), 1, f);
        return out;
    }
};

}  // namespace detail

/// A reduction (psi, phi, gamma) from a source complex onto a target complex
/// whose cells are a subset of the source cells. Maps are evaluated lazily
/// per basis cell and memoized. Cheap to copy (shared state).
class Reduction {
public:
    Reduction() = default;

    const CellComplex& source() const { return *impl_->source; }
    const CellComplex& target() const { return *impl_->target; }
    std::shared_ptr<const CellComplex> source_ptr() const { return impl_->source; }
    std::shared_ptr<const CellComplex> target_ptr() const { return impl_->target; }
    /// Source index of each target cell.
    const std::vector<CellIndex>& embedding() const { return impl_->embedding; }

    Chain psi(CellIndex source_cell) const { return impl_->psi(check(source_cell, source())); }
    Chain phi(CellIndex target_cell) const { return impl_->phi(check(target_cell, target())); }
    Chain gamma(CellIndex source_cell) const { return impl_->gamma(check(source_cell, source())); }

    Chain psi(const Chain& c) const {
        return detail::apply_linear(c, source().field(), [&](CellIndex x) { return psi(x); });
    }
    Chain phi(const Chain& c) const {
        return detail::apply_linear(c, source().field(), [&](CellIndex x) { return phi(x); });
    }
    Chain gamma(const Chain& c) const {
        return detail::apply_linear(c, source().field(), [&](CellIndex x) { return gamma(x); });
    }

    /// The matching behind a single Morse step, nullptr for other kinds.
    const Matching* matching() const {
        auto* morse = dynamic_cast<const detail::MorseReduction*>(impl_.get());
        return morse ? &morse->matching : nullptr;
    }

    static Reduction identity(std::shared_ptr<const CellComplex> X) {
        auto impl = std::make_shared<detail::IdentityReduction>();
        impl->source = X;
        impl->target = X;
        impl->embedding.resize(X->size());
        for (CellIndex c = 0; c < X->size(); ++c) impl->embedding[c] = c;
        return Reduction(std::move(impl));
    }

    friend Reduction build_reduction(std::shared_ptr<const CellComplex> X, Matching m, unsigned threads);
    friend Reduction compose(const Reduction& r1, const Reduction& r2);

private:
    explicit Reduction(std::shared_ptr<const detail::ReductionImpl> impl) : impl_(std::move(impl)) {}

    static CellIndex check(CellIndex c, const CellComplex& X) {
        if (c >= X.size()) throw Error("cell index outside the complex");
        return c;
    }

    std::shared_ptr<const detail::ReductionImpl> impl_;
};

/// Morse reduction of X onto the critical cells of m. The target boundary is
/// d^A(xi) = pi_A(d xi - d gamma(d xi)), one Gamma run per critical cell.
inline Reduction build_reduction(std::shared_ptr<const CellComplex> X, Matching m, unsigned threads = 1) {
    if (m.size() != X->size()) throw Error("matching does not belong to this complex");
    auto impl = std::make_shared<detail::MorseReduction>();
    impl->source = X;
    impl->embedding = m.critical_cells();
    impl->target_of.assign(X->size(), no_cell);
    for (CellIndex a = 0; a < impl->embedding.size(); ++a) impl->target_of[impl->embedding[a]] = a;
    impl->matching = std::move(m);

    const auto& crit = impl->embedding;
    std::vector<Chain> delta(crit.size());
    parallel_for(crit.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
        GammaEngine engine(*X, impl->matching);
        for (std::size_t i = begin; i < end; ++i) {
            Chain residual;
            engine.run(boundary_of_cell(crit[i], *X), &residual);
            delta[i] = impl->project(residual);
        }
    });

    CellComplex::Builder b(X->field());
    for (CellIndex c : crit) b.add_cell(X->id(c), X->dim(c));
    for (CellIndex a = 0; a < crit.size(); ++a)
        for (const Term& t : delta[a]) b.add_boundary(a, t.cell, t.coef);
    impl->target = std::make_shared<const CellComplex>(b.build());
    return Reduction(std::move(impl));
}

/// r1: C -> M followed by r2: M -> N.
inline Reduction compose(const Reduction& r1, const Reduction& r2) {
    if (r1.impl_->target != r2.impl_->source && &r1.target() != &r2.source())
        throw Error("cannot compose reductions: target and source complexes differ");
    auto impl = std::make_shared<detail::ComposedReduction>();
    impl->source = r1.impl_->source;
    impl->target = r2.impl_->target;
    impl->first = r1.impl_;
    impl->second = r2.impl_;
    impl->embedding.reserve(r2.embedding().size());
    for (CellIndex a : r2.embedding()) impl->embedding.push_back(r1.embedding()[a]);
    return Reduction(std::move(impl));
}

/// d = d gamma d on every source basis cell.
inline bool is_perfect(const Reduction& r) {
    const auto& X = r.source();
    for (CellIndex c = 0; c < X.size(); ++c) {
        Chain d = boundary_of_cell(c, X);
        Chain dgd = boundary(r.gamma(d), X);
        if (d != dgd) return false;
    }
    return true;
}

}  // namespace conley
