// Sparse column reduction over GF(p): ranks, kernels and persistence pairings.
#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "conley/chain.hpp"

namespace conley {

struct ReducedColumns {
    std::vector<Chain> columns;
    /// Column j of `columns` equals sum_k transforms[j][k] * original column k.
    std::vector<Chain> transforms;
    /// Original column index owning each row pivot ("low").
    std::unordered_map<CellIndex, std::size_t> pivot_owner;

    std::size_t rank() const { return pivot_owner.size(); }
};

/// Left-to-right column reduction: every nonzero column ends with a pivot
/// (largest row index) that no earlier column shares.
inline ReducedColumns reduce_columns(std::vector<Chain> columns, const PrimeField& f, bool track = false) {
    ReducedColumns out;
    out.columns = std::move(columns);
    if (track) {
        out.transforms.reserve(out.columns.size());
        for (std::size_t j = 0; j < out.columns.size(); ++j)
            out.transforms.push_back(Chain::basis(static_cast<CellIndex>(j)));
    }
    for (std::size_t j = 0; j < out.columns.size(); ++j) {
        Chain& col = out.columns[j];
        while (!col.empty()) {
            const Term low = col.terms().back();
            auto it = out.pivot_owner.find(low.cell);
            if (it == out.pivot_owner.end()) {
                out.pivot_owner.emplace(low.cell, j);
                break;
            }
            const Chain& other = out.columns[it->second];
            Coefficient factor = f.neg(f.div(low.coef, other.terms().back().coef));
            col.add_scaled(other, factor, f);
            if (track) out.transforms[j].add_scaled(out.transforms[it->second], factor, f);
        }
    }
    return out;
}

inline std::size_t rank(std::vector<Chain> columns, const PrimeField& f) {
    return reduce_columns(std::move(columns), f).rank();
}

/// Basis of the kernel of the linear map whose columns are given, expressed
/// as combinations of the column indices.
inline std::vector<Chain> kernel_basis(std::vector<Chain> columns, const PrimeField& f) {
    auto red = reduce_columns(std::move(columns), f, true);
    std::vector<Chain> out;
    for (std::size_t j = 0; j < red.columns.size(); ++j)
        if (red.columns[j].empty()) out.push_back(std::move(red.transforms[j]));
    return out;
}

}  // namespace conley
