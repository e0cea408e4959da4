#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace conley;
using oracle::DenseMatrix;

namespace {

DenseMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows, std::uint32_t p) {
    PrimeField f(p);
    DenseMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size(), f);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = f.reduce(rows[i][j]);
    return m;
}

DenseMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, std::uint32_t p) {
    DenseMatrix m(r, c, PrimeField(p));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rng() % 3 ? 0 : static_cast<Coefficient>(rng() % p);
    return m;
}

}  // namespace

TEST(Oracle, RankDependsOnCharacteristic) {
    EXPECT_EQ(oracle::dense_rank(from_rows({{1, 1}, {1, -1}}, 2)), 1u);
    EXPECT_EQ(oracle::dense_rank(from_rows({{1, 1}, {1, -1}}, 3)), 2u);
    EXPECT_EQ(oracle::dense_rank(from_rows({{3, 0}, {0, 3}}, 3)), 0u);
    EXPECT_EQ(oracle::dense_rank(from_rows({{1, 2, 3}, {2, 4, 6}}, 7)), 1u);
}

TEST(Oracle, ArithmeticAndIdentity) {
    auto a = from_rows({{1, 2}, {3, 4}}, 5);
    auto id = DenseMatrix::identity(2, PrimeField(5));
    EXPECT_EQ(a * id, a);
    EXPECT_EQ(id * a, a);
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_EQ(a + a, from_rows({{2, 4}, {1, 3}}, 5));
    EXPECT_EQ(a * a, from_rows({{7, 10}, {15, 22}}, 5));
    EXPECT_THROW(a * DenseMatrix(3, 1, PrimeField(5)), Error);
}

TEST(Oracle, RankAndNullspaceSelfConsistent) {
    std::mt19937 rng(15);
    for (int trial = 0; trial < 100; ++trial) {
        std::uint32_t p = std::vector<std::uint32_t>{2, 3, 5, 7}[trial % 4];
        auto m = random_matrix(rng, 1 + rng() % 9, 1 + rng() % 9, p);
        auto r = oracle::dense_rank(m);
        EXPECT_EQ(r, oracle::dense_rank(m, true));
        auto ns = oracle::nullspace(m);
        EXPECT_EQ(ns.size(), m.cols() - r);
        for (const auto& v : ns) {
            DenseMatrix col(m.cols(), 1, m.field());
            for (std::size_t i = 0; i < v.size(); ++i) col.at(i, 0) = v[i];
            EXPECT_TRUE((m * col).is_zero());
        }
        // Sparse elimination agrees.
        std::vector<Chain> cols;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::vector<Term> t;
            for (std::size_t i = 0; i < m.rows(); ++i)
                if (m.at(i, j)) t.push_back({static_cast<CellIndex>(i), m.at(i, j)});
            cols.emplace_back(std::move(t));
        }
        EXPECT_EQ(rank(cols, m.field()), r);
    }
}

TEST(Oracle, KnownHomology) {
    // Boundary of the tetrahedron is a 2-sphere.
    CellComplex::Builder b(3);
    const std::vector<std::string> v{"0", "1", "2", "3"};
    for (const auto& x : v) b.add_cell(x, 0);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            auto e = v[i] + v[j];
            b.add_cell(e, 1);
            b.add_boundary(e, v[j], 1);
            b.add_boundary(e, v[i], -1);
        }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) {
                auto t = v[i] + v[j] + v[k];
                b.add_cell(t, 2);
                b.add_boundary(t, v[j] + v[k], 1);
                b.add_boundary(t, v[i] + v[k], -1);
                b.add_boundary(t, v[i] + v[j], 1);
            }
    auto S = b.build();
    EXPECT_TRUE(validate(S).ok());
    EXPECT_EQ(oracle::dense_homology(S), (std::vector<std::size_t>{1, 0, 1}));
}

TEST(Oracle, PersistentBettiOnThreeSteps) {
    auto g = fixtures::example_persistence();
    const Poset& P = g.poset();
    auto s0 = make_set(P, {"0"}), s01 = make_set(P, {"0", "1"}), all = P.full_set();
    EXPECT_EQ(oracle::dense_persistent_betti(g, s0, s0, 0), 1u);
    EXPECT_EQ(oracle::dense_persistent_betti(g, s01, s01, 0), 2u);
    EXPECT_EQ(oracle::dense_persistent_betti(g, s01, all, 0), 1u);
    EXPECT_EQ(oracle::dense_persistent_betti(g, all, all, 1), 0u);
}

TEST(Oracle, IdentityReductionPasses) {
    auto X = fixtures::example_cubical(false, 3).complex_ptr();
    EXPECT_TRUE(oracle::check_reduction(Reduction::identity(X)).empty());
}

TEST(Oracle, CapsAreEnforced) {
    auto X = interval_cells(1200);
    EXPECT_THROW(oracle::dense_homology(*X), Error);
    EXPECT_THROW(oracle::boundary_matrix(*X), Error);
}
