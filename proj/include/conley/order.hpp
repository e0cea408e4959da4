// Finite posets, down-sets, convex sets and the down-set lattice O(P).
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "conley/field.hpp"

namespace conley {

using ElementSet = boost::dynamic_bitset<std::uint64_t>;

/// Finite poset on labelled elements with the transitive closure
/// precomputed as bitset rows: down(q) = {p : p <= q}.
class Poset {
public:
    Poset() = default;

    /// relations are (lower, upper) pairs; any generating set works.
    Poset(std::vector<std::string> labels, const std::vector<std::pair<std::size_t, std::size_t>>& relations)
        : labels_(std::move(labels)) {
        const std::size_t n = labels_.size();
        for (std::size_t i = 0; i < n; ++i) {
            auto [it, inserted] = index_.emplace(labels_[i], i);
            if (!inserted) throw Error("duplicate poset element '" + labels_[i] + "'");
        }
        std::vector<std::vector<std::size_t>> lower(n);
        std::vector<std::size_t> indeg(n, 0);
        std::vector<std::vector<std::size_t>> upper(n);
        for (auto [lo, hi] : relations) {
            if (lo >= n || hi >= n) throw Error("poset relation references a missing element");
            if (lo == hi) continue;
            lower[hi].push_back(lo);
            upper[lo].push_back(hi);
            ++indeg[hi];
        }
        // Kahn from minimal elements; a leftover element sits on a cycle.
        std::vector<std::size_t> order, stack;
        for (std::size_t i = n; i-- > 0;)
            if (indeg[i] == 0) stack.push_back(i);
        while (!stack.empty()) {
            std::size_t x = stack.back();
            stack.pop_back();
            order.push_back(x);
            for (std::size_t y : upper[x])
                if (--indeg[y] == 0) stack.push_back(y);
        }
        if (order.size() != n) throw Error("poset relations contain a cycle");
        down_.assign(n, ElementSet(n));
        for (std::size_t x : order) {
            down_[x].set(x);
            for (std::size_t lo : lower[x]) down_[x] |= down_[lo];
        }
        up_.assign(n, ElementSet(n));
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = down_[x].find_first(); y != ElementSet::npos; y = down_[x].find_next(y)) up_[y].set(x);
        topo_ = std::move(order);
    }

    Poset(std::vector<std::string> labels, const std::vector<std::pair<std::string, std::string>>& relations)
        : Poset(labels, resolve(labels, relations)) {}

    static Poset single(std::string label = "0") { return Poset({std::move(label)}, std::vector<std::pair<std::size_t, std::size_t>>{}); }
    static Poset chain(std::vector<std::string> labels) {
        std::vector<std::pair<std::size_t, std::size_t>> rel;
        for (std::size_t i = 1; i < labels.size(); ++i) rel.push_back({i - 1, i});
        return Poset(std::move(labels), rel);
    }
    static Poset antichain(std::vector<std::string> labels) {
        return Poset(std::move(labels), std::vector<std::pair<std::size_t, std::size_t>>{});
    }

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<std::size_t> find(std::string_view label) const {
        auto it = index_.find(std::string(label));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    std::size_t index_of(std::string_view label) const {
        if (auto i = find(label)) return *i;
        throw Error("unknown poset element '" + std::string(label) + "'");
    }

    bool leq(std::size_t x, std::size_t y) const {
        check(x);
        check(y);
        return down_[y].test(x);
    }
    bool less(std::size_t x, std::size_t y) const { return x != y && leq(x, y); }

    const ElementSet& down(std::size_t q) const { return down_[q]; }
    const ElementSet& up(std::size_t q) const { return up_[q]; }

    /// Elements in some fixed linear extension (lower elements first).
    const std::vector<std::size_t>& topological_order() const { return topo_; }

    /// Hasse diagram: (lower, upper) pairs with nothing strictly between.
    std::vector<std::pair<std::size_t, std::size_t>> covers() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        const std::size_t n = size();
        for (std::size_t y = 0; y < n; ++y) {
            ElementSet strict = down_[y];
            strict.reset(y);
            for (std::size_t x = strict.find_first(); x != ElementSet::npos; x = strict.find_next(x)) {
                ElementSet above = up_[x];
                above.reset(x);
                if (!(above & strict).any()) out.push_back({x, y});
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    ElementSet empty_set() const { return ElementSet(size()); }
    ElementSet full_set() const {
        ElementSet s(size());
        s.set();
        return s;
    }

private:
    static std::vector<std::pair<std::size_t, std::size_t>> resolve(
        const std::vector<std::string>& labels, const std::vector<std::pair<std::string, std::string>>& rel) {
        std::unordered_map<std::string, std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) idx.emplace(labels[i], i);
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (auto& [lo, hi] : rel) {
            auto a = idx.find(lo), b = idx.find(hi);
            if (a == idx.end() || b == idx.end())
                throw Error("poset relation references unknown element '" + (a == idx.end() ? lo : hi) + "'");
            out.push_back({a->second, b->second});
        }
        return out;
    }
    void check(std::size_t x) const {
        if (x >= size()) throw Error("unknown poset element index " + std::to_string(x));
    }

    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<ElementSet> down_, up_;
    std::vector<std::size_t> topo_;
};

inline ElementSet principal_down_set(const Poset& P, std::size_t q) {
    if (q >= P.size()) throw Error("unknown poset element index " + std::to_string(q));
    return P.down(q);
}

/// Down-set generated by the given elements.
inline ElementSet down_closure(const Poset& P, const ElementSet& s) {
    ElementSet out = P.empty_set();
    for (std::size_t x = s.find_first(); x != ElementSet::npos; x = s.find_next(x)) out |= P.down(x);
    return out;
}

inline ElementSet up_closure(const Poset& P, const ElementSet& s) {
    ElementSet out = P.empty_set();
    for (std::size_t x = s.find_first(); x != ElementSet::npos; x = s.find_next(x)) out |= P.up(x);
    return out;
}

inline bool is_down_set(const Poset& P, const ElementSet& s) {
    return s.size() == P.size() && down_closure(P, s) == s;
}

/// For all p, q in S the interval [p, q] lies in S.
inline bool is_convex(const Poset& P, const ElementSet& s) {
    if (s.size() != P.size()) throw Error("element set has the wrong universe size");
    return (down_closure(P, s) & up_closure(P, s)) == s;
}

inline ElementSet make_set(const Poset& P, const std::vector<std::string>& labels) {
    ElementSet s = P.empty_set();
    for (const auto& l : labels) s.set(P.index_of(l));
    return s;
}

/// "{p, r}" using poset labels in element order.
inline std::string format_set(const Poset& P, const ElementSet& s, std::string_view sep = ", ",
                              bool braces = true) {
    std::string out = braces ? "{" : "";
    bool first = true;
    for (std::size_t x = s.find_first(); x != ElementSet::npos; x = s.find_next(x)) {
        if (!first) out += sep;
        out += P.label(x);
        first = false;
    }
    if (braces) out += "}";
    return out;
}

inline constexpr std::size_t default_lattice_cap = 20;

/// All down-sets of P, ordered by cardinality (an inclusion-compatible
/// linear order) and then lexicographically.
inline std::vector<ElementSet> down_set_lattice(const Poset& P, std::size_t cap = default_lattice_cap) {
    if (P.size() > cap)
        throw Error("down-set lattice enumeration capped at " + std::to_string(cap) + " elements (poset has " +
                    std::to_string(P.size()) + ")");
    const auto& order = P.topological_order();
    std::vector<ElementSet> out;
    ElementSet current = P.empty_set();
    // Depth-first over elements in linear-extension order; an element may be
    // added only when everything strictly below it is already present.
    auto recurse = [&](auto&& self, std::size_t k) -> void {
        if (k == order.size()) {
            out.push_back(current);
            return;
        }
        std::size_t x = order[k];
        self(self, k + 1);
        ElementSet below = P.down(x);
        below.reset(x);
        if (below.is_subset_of(current)) {
            current.set(x);
            self(self, k + 1);
            current.reset(x);
        }
    };
    recurse(recurse, 0);
    std::sort(out.begin(), out.end(), [](const ElementSet& a, const ElementSet& b) {
        auto ca = a.count(), cb = b.count();
        return ca != cb ? ca < cb : a < b;
    });
    return out;
}

struct JoinIrreducible {
    ElementSet element;
    ElementSet predecessor;
};

/// Join-irreducibles of a finite distributive lattice of sets, computed at
/// the lattice level: a != {} whose strict lower part has a single maximum.
inline std::vector<JoinIrreducible> join_irreducibles(const std::vector<ElementSet>& lattice) {
    std::vector<JoinIrreducible> out;
    for (const auto& a : lattice) {
        if (a.none()) continue;
        ElementSet join(a.size());
        for (const auto& b : lattice)
            if (b != a && b.is_subset_of(a)) join |= b;
        if (join != a) out.push_back({a, join});
    }
    return out;
}

/// True iff x <= y implies map[x] <= map[y]. map must be total.
inline bool order_preserving(const Poset& src, const Poset& dst, const std::vector<std::size_t>& map) {
    if (map.size() != src.size()) throw Error("order map is not total on the source poset");
    for (std::size_t v : map)
        if (v >= dst.size()) throw Error("order map leaves the target poset");
    for (auto [lo, hi] : src.covers())
        if (!dst.leq(map[lo], map[hi])) return false;
    return true;
}

/// order lists every element once, and x < y implies x comes first.
inline bool is_linear_extension(const Poset& P, const std::vector<std::size_t>& order) {
    if (order.size() != P.size()) return false;
    std::vector<std::size_t> pos(P.size(), P.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] >= P.size() || pos[order[i]] != P.size()) return false;
        pos[order[i]] = i;
    }
    for (auto [lo, hi] : P.covers())
        if (pos[lo] > pos[hi]) return false;
    return true;
}

}  // namespace conley
