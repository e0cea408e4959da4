// Dense brute-force reference computations over GF(p). Slow by design and
// independent of the sparse code paths; used to check them.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "conley/complex.hpp"
#include "conley/graded.hpp"
#include "conley/morse.hpp"

namespace conley::oracle {

inline constexpr std::size_t homology_cap = 2000;
inline constexpr std::size_t assemble_cap = 1000;

class DenseMatrix {
public:
    DenseMatrix(std::size_t rows, std::size_t cols, PrimeField f)
        : rows_(rows), cols_(cols), f_(f), data_(rows * cols, 0) {}

    static DenseMatrix identity(std::size_t n, PrimeField f) {
        DenseMatrix m(n, n, f);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const PrimeField& field() const { return f_; }
    Coefficient& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    Coefficient at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    bool is_zero() const {
        for (auto v : data_)
            if (v) return false;
        return true;
    }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw Error("dense product shape mismatch");
        DenseMatrix out(a.rows_, b.cols_, a.f_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                Coefficient x = a.at(i, k);
                if (!x) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    Coefficient y = b.at(k, j);
                    if (y) out.at(i, j) = a.f_.add(out.at(i, j), a.f_.mul(x, y));
                }
            }
        return out;
    }
    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("dense sum shape mismatch");
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] = a.f_.add(a.data_[i], b.data_[i]);
        return a;
    }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("dense difference shape mismatch");
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] = a.f_.sub(a.data_[i], b.data_[i]);
        return a;
    }
    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_, cols_;
    PrimeField f_;
    std::vector<Coefficient> data_;
};

/// Row echelon form by Gaussian elimination. With `reverse_pivots` columns
/// are scanned right to left, giving an independent pivot order for rank
/// self-checks. Returns the pivot columns.
inline std::vector<std::size_t> row_reduce(DenseMatrix& m, bool reverse_pivots = false) {
    const auto& f = m.field();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t step = 0; step < m.cols() && r < m.rows(); ++step) {
        std::size_t c = reverse_pivots ? m.cols() - 1 - step : step;
        std::size_t found = m.rows();
        for (std::size_t i = r; i < m.rows(); ++i)
            if (m.at(i, c)) {
                found = i;
                break;
            }
        if (found == m.rows()) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(r, j), m.at(found, j));
        Coefficient inv = f.inv(m.at(r, c));
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(r, j) = f.mul(m.at(r, j), inv);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || !m.at(i, c)) continue;
            Coefficient factor = m.at(i, c);
            for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = f.sub(m.at(i, j), f.mul(factor, m.at(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t dense_rank(DenseMatrix m, bool reverse_pivots = false) { return row_reduce(m, reverse_pivots).size(); }

/// Nullspace basis vectors (as columns of length m.cols()).
inline std::vector<std::vector<Coefficient>> nullspace(DenseMatrix m) {
    const auto& f = m.field();
    auto pivots = row_reduce(m);
    std::vector<std::uint8_t> is_pivot(m.cols(), 0);
    for (auto c : pivots) is_pivot[c] = 1;
    std::vector<std::vector<Coefficient>> out;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        std::vector<Coefficient> v(m.cols(), 0);
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = f.neg(m.at(r, free));
        out.push_back(std::move(v));
    }
    return out;
}

/// Matrix of d restricted to cells in `cols_cells` (columns) and `row_cells` (rows).
inline DenseMatrix boundary_matrix(const CellComplex& X, const std::vector<CellIndex>& row_cells,
                                   const std::vector<CellIndex>& col_cells) {
    DenseMatrix m(row_cells.size(), col_cells.size(), X.field());
    for (std::size_t j = 0; j < col_cells.size(); ++j)
        for (std::size_t i = 0; i < row_cells.size(); ++i) m.at(i, j) = X.kappa(col_cells[j], row_cells[i]);
    return m;
}

/// Betti numbers beta_0..beta_maxdim.
inline std::vector<std::size_t> dense_homology(const CellComplex& X) {
    if (X.size() > homology_cap) throw Error("dense homology is capped at 2000 cells");
    const int top = X.max_dim();
    std::vector<std::vector<CellIndex>> by_dim(static_cast<std::size_t>(top + 2));
    for (CellIndex c = 0; c < X.size(); ++c) by_dim[static_cast<std::size_t>(X.dim(c))].push_back(c);
    std::vector<std::size_t> ranks(by_dim.size() + 1, 0);  // ranks[n] = rank d_n
    for (std::size_t n = 1; n < by_dim.size(); ++n)
        ranks[n] = dense_rank(boundary_matrix(X, by_dim[n - 1], by_dim[n]));
    std::vector<std::size_t> betti;
    for (int n = 0; n <= top; ++n)
        betti.push_back(by_dim[n].size() - ranks[n] - ranks[n + 1]);
    return betti;
}

inline IntPolynomial dense_poincare(const CellComplex& X) {
    auto b = dense_homology(X);
    return IntPolynomial(std::vector<std::int64_t>(b.begin(), b.end()));
}

/// beta_j^{a,b} via explicit dense cycle and boundary bases.
inline std::size_t dense_persistent_betti(const GradedComplex& g, const ElementSet& a, const ElementSet& b, int j) {
    const auto& X = g.complex();
    if (X.size() > homology_cap) throw Error("dense persistence is capped at 2000 cells");
    if (!a.is_subset_of(b)) throw Error("persistence pair needs a to be contained in b");
    std::vector<CellIndex> chains_j, a_j, faces, b_up;
    for (CellIndex c = 0; c < X.size(); ++c) {
        if (X.dim(c) == j) {
            chains_j.push_back(c);
            if (a.test(g.grade(c))) a_j.push_back(c);
        }
        if (X.dim(c) == j - 1) faces.push_back(c);
        if (X.dim(c) == j + 1 && b.test(g.grade(c))) b_up.push_back(c);
    }
    // Cycles of a, written in the ambient degree-j basis.
    auto cycles = nullspace(boundary_matrix(X, faces, a_j));
    // Columns: boundaries of b, then the cycles of a.
    DenseMatrix both(chains_j.size(), b_up.size() + cycles.size(), X.field());
    DenseMatrix bd = boundary_matrix(X, chains_j, b_up);
    for (std::size_t i = 0; i < chains_j.size(); ++i)
        for (std::size_t k = 0; k < b_up.size(); ++k) both.at(i, k) = bd.at(i, k);
    for (std::size_t k = 0; k < cycles.size(); ++k)
        for (std::size_t t = 0; t < a_j.size(); ++t) {
            auto row = std::lower_bound(chains_j.begin(), chains_j.end(), a_j[t]) - chains_j.begin();
            both.at(static_cast<std::size_t>(row), b_up.size() + k) = cycles[k][t];
        }
    return dense_rank(both) - dense_rank(bd);
}

using Evaluator = std::function<Chain(CellIndex)>;

/// Matrix of a sparse evaluator: column k is the image of source_basis[k],
/// rows follow target_basis.
inline DenseMatrix assemble(const Evaluator& map, const std::vector<CellIndex>& source_basis,
                            const std::vector<CellIndex>& target_basis, PrimeField f) {
    if (source_basis.size() > assemble_cap || target_basis.size() > assemble_cap)
        throw Error("dense assembly is capped at 1000 basis cells");
    std::vector<std::size_t> row_of;
    CellIndex max_cell = 0;
    for (auto c : target_basis) max_cell = std::max(max_cell, c);
    row_of.assign(std::size_t(max_cell) + 1, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < target_basis.size(); ++i) row_of[target_basis[i]] = i;
    DenseMatrix m(target_basis.size(), source_basis.size(), f);
    for (std::size_t k = 0; k < source_basis.size(); ++k)
        for (const Term& t : map(source_basis[k])) {
            if (t.cell >= row_of.size() || row_of[t.cell] == static_cast<std::size_t>(-1))
                throw Error("evaluator leaves the target basis");
            m.at(row_of[t.cell], k) = t.coef;
        }
    return m;
}

inline std::vector<CellIndex> all_cells(const CellComplex& X) {
    std::vector<CellIndex> out(X.size());
    for (CellIndex c = 0; c < X.size(); ++c) out[c] = c;
    return out;
}

/// Full boundary matrix of X over all cells.
inline DenseMatrix boundary_matrix(const CellComplex& X) {
    auto cells = all_cells(X);
    return assemble([&](CellIndex c) { return boundary_of_cell(c, X); }, cells, cells, X.field());
}

/// Checks psi phi = id, phi psi = id - (gamma d + d gamma), gamma^2 = gamma phi
/// = psi gamma = 0, that psi and phi are chain maps, and d^2 = 0 on the
/// target, by dense assembly. Returns the failed identities.
inline std::vector<std::string> check_reduction(const Reduction& r) {
    const auto& C = r.source();
    const auto& M = r.target();
    const auto& f = C.field();
    auto cs = all_cells(C), ms = all_cells(M);
    DenseMatrix dC = boundary_matrix(C), dM = boundary_matrix(M);
    DenseMatrix psi = assemble([&](CellIndex c) { return r.psi(c); }, cs, ms, f);
    DenseMatrix phi = assemble([&](CellIndex c) { return r.phi(c); }, ms, cs, f);
    DenseMatrix gam = assemble([&](CellIndex c) { return r.gamma(c); }, cs, cs, f);
    std::vector<std::string> failed;
    if (!(psi * phi == DenseMatrix::identity(M.size(), f))) failed.push_back("psi phi = id");
    if (!(phi * psi == DenseMatrix::identity(C.size(), f) - (gam * dC + dC * gam)))
        failed.push_back("phi psi = id - (gamma d + d gamma)");
    if (!(gam * gam).is_zero()) failed.push_back("gamma gamma = 0");
    if (!(gam * phi).is_zero()) failed.push_back("gamma phi = 0");
    if (!(psi * gam).is_zero()) failed.push_back("psi gamma = 0");
    if (!(psi * dC == dM * psi)) failed.push_back("psi is a chain map");
    if (!(dC * phi == phi * dM)) failed.push_back("phi is a chain map");
    if (!(dM * dM).is_zero()) failed.push_back("target d d = 0");
    return failed;
}

}  // namespace conley::oracle
