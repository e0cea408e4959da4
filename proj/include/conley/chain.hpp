// Sparse chains over GF(p) and integer polynomials (f- and Poincare polynomials).
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conley/field.hpp"

namespace conley {

using CellIndex = std::uint32_t;

struct Term {
    CellIndex cell;
    Coefficient coef;
    friend bool operator==(const Term&, const Term&) = default;
};

/// A finite linear combination of basis cells, kept sorted by cell index
/// with no explicit zeros. Indices refer to one particular complex.
class Chain {
public:
    Chain() = default;
    explicit Chain(std::vector<Term> terms) : terms_(std::move(terms)) { normalize_unsorted(); }
    static Chain basis(CellIndex cell) { return Chain(std::vector<Term>{{cell, 1}}, sorted_tag{}); }

    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    std::span<const Term> terms() const { return terms_; }
    auto begin() const { return terms_.begin(); }
    auto end() const { return terms_.end(); }

    Coefficient coefficient(CellIndex cell) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), cell,
                                   [](const Term& t, CellIndex c) { return t.cell < c; });
        return (it != terms_.end() && it->cell == cell) ? it->coef : 0;
    }

    /// this += scale * other
    void add_scaled(const Chain& other, Coefficient scale, const PrimeField& f) {
        if (scale == 0 || other.empty()) return;
        std::vector<Term> out;
        out.reserve(terms_.size() + other.terms_.size());
        auto a = terms_.begin(), ae = terms_.end();
        auto b = other.terms_.begin(), be = other.terms_.end();
        while (a != ae || b != be) {
            if (b == be || (a != ae && a->cell < b->cell)) {
                out.push_back(*a++);
            } else if (a == ae || b->cell < a->cell) {
                out.push_back({b->cell, f.mul(b->coef, scale)});
                ++b;
            } else {
                Coefficient c = f.add(a->coef, f.mul(b->coef, scale));
                if (c != 0) out.push_back({a->cell, c});
                ++a;
                ++b;
            }
        }
        terms_ = std::move(out);
    }

    Chain scaled(Coefficient scale, const PrimeField& f) const {
        if (scale == 0) return {};
        std::vector<Term> out(terms_);
        for (auto& t : out) t.coef = f.mul(t.coef, scale);
        return Chain(std::move(out), sorted_tag{});
    }

    friend bool operator==(const Chain&, const Chain&) = default;

private:
    struct sorted_tag {};
    Chain(std::vector<Term> terms, sorted_tag) : terms_(std::move(terms)) {}

    void normalize_unsorted() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& x, const Term& y) { return x.cell < y.cell; });
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_) {
            if (!out.empty() && out.back().cell == t.cell)
                throw Error("chain terms must not repeat a cell");
            if (t.coef != 0) out.push_back(t);
        }
        terms_ = std::move(out);
    }

    std::vector<Term> terms_;
};

/// Dense scratch buffer for accumulating many sparse updates into one chain.
/// Reset cost is proportional to the number of touched cells.
class ChainAccumulator {
public:
    explicit ChainAccumulator(std::size_t n_cells = 0) : values_(n_cells, 0), touched_flag_(n_cells, 0) {}

    void resize(std::size_t n_cells) {
        values_.assign(n_cells, 0);
        touched_flag_.assign(n_cells, 0);
        touched_.clear();
    }

    Coefficient get(CellIndex c) const { return values_[c]; }

    /// Returns the new coefficient.
    Coefficient add(CellIndex c, Coefficient v, const PrimeField& f) {
        if (!touched_flag_[c]) {
            touched_flag_[c] = 1;
            touched_.push_back(c);
        }
        values_[c] = f.add(values_[c], v);
        return values_[c];
    }

    std::span<const CellIndex> touched() const { return touched_; }

    Chain take() {
        std::vector<Term> terms;
        terms.reserve(touched_.size());
        for (CellIndex c : touched_) {
            if (values_[c] != 0) terms.push_back({c, values_[c]});
            values_[c] = 0;
            touched_flag_[c] = 0;
        }
        touched_.clear();
        return Chain(std::move(terms));
    }

    void clear() {
        for (CellIndex c : touched_) {
            values_[c] = 0;
            touched_flag_[c] = 0;
        }
        touched_.clear();
    }

private:
    std::vector<Coefficient> values_;
    std::vector<std::uint8_t> touched_flag_;
    std::vector<CellIndex> touched_;
};

/// Polynomial with nonnegative integer coefficients; coeffs[i] multiplies t^i.
class IntPolynomial {
public:
    IntPolynomial() = default;
    explicit IntPolynomial(std::vector<std::int64_t> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    std::int64_t operator[](std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0; }
    std::size_t degree_bound() const { return coeffs_.size(); }
    const std::vector<std::int64_t>& coefficients() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    void add_term(std::size_t power, std::int64_t amount) {
        if (coeffs_.size() <= power) coeffs_.resize(power + 1, 0);
        coeffs_[power] += amount;
        trim();
    }

    std::int64_t evaluate(std::int64_t t) const {
        std::int64_t acc = 0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    IntPolynomial& operator+=(const IntPolynomial& o) {
        if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0);
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        trim();
        return *this;
    }

    /// "1 + t^1", "9 + 14t^1 + 4t^2", "t^2", "0".
    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeffs_[i] == 0) continue;
            if (!out.empty()) out += " + ";
            if (i == 0) {
                out += std::to_string(coeffs_[i]);
            } else {
                if (coeffs_[i] != 1) out += std::to_string(coeffs_[i]);
                out += "t^" + std::to_string(i);
            }
        }
        return out.empty() ? "0" : out;
    }

    friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }
    std::vector<std::int64_t> coeffs_;
};

}  // namespace conley
