#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace conley;

namespace {

std::set<std::string> labels_of(const Poset& P, const ElementSet& s) {
    std::set<std::string> out;
    for (auto i = s.find_first(); i != ElementSet::npos; i = s.find_next(i)) out.insert(P.label(i));
    return out;
}

/// Convexity by enumerating every interval [x, y] with x, y in S.
bool convex_brute(const Poset& P, const ElementSet& s) {
    for (std::size_t x = 0; x < P.size(); ++x)
        for (std::size_t y = 0; y < P.size(); ++y)
            for (std::size_t z = 0; z < P.size(); ++z)
                if (s.test(x) && s.test(y) && P.leq(x, z) && P.leq(z, y) && !s.test(z)) return false;
    return true;
}

/// Number of antichains, counted over all subsets.
std::size_t antichain_count(const Poset& P) {
    std::size_t n = 0;
    for (std::uint32_t mask = 0; mask < (1u << P.size()); ++mask) {
        bool ok = true;
        for (std::size_t i = 0; i < P.size() && ok; ++i)
            for (std::size_t j = 0; j < P.size() && ok; ++j)
                if (i != j && (mask >> i & 1) && (mask >> j & 1) && P.leq(i, j)) ok = false;
        n += ok;
    }
    return n;
}

}  // namespace

TEST(Order, PrincipalDownSets) {
    auto P = fixtures::vee_poset();
    EXPECT_EQ(labels_of(*P, principal_down_set(*P, P->index_of("q"))), (std::set<std::string>{"p", "q", "r"}));
    EXPECT_EQ(labels_of(*P, principal_down_set(*P, P->index_of("p"))), (std::set<std::string>{"p"}));
    EXPECT_TRUE(P->leq(P->index_of("p"), P->index_of("q")));
    EXPECT_FALSE(P->leq(P->index_of("p"), P->index_of("r")));
    EXPECT_THROW(P->index_of("z"), Error);
    EXPECT_THROW(principal_down_set(*P, 7), Error);
}

TEST(Order, Convexity) {
    auto P = fixtures::vee_poset();
    auto pr = make_set(*P, {"p", "r"});
    EXPECT_TRUE(convex_brute(*P, pr));
    EXPECT_TRUE(is_convex(*P, pr));
    auto chain = Poset::chain({"0", "1", "2"});
    auto gap = make_set(chain, {"0", "2"});
    EXPECT_FALSE(convex_brute(chain, gap));
    EXPECT_FALSE(is_convex(chain, gap));

    std::mt19937 rng(5);
    for (int i = 0; i < 30; ++i) {
        auto Q = fixtures::random_poset(rng, 6);
        for (std::uint32_t mask = 0; mask < 64; ++mask) {
            ElementSet s(6, mask);
            EXPECT_EQ(is_convex(*Q, s), convex_brute(*Q, s));
        }
    }
}

TEST(Order, DownSetLattice) {
    auto P = fixtures::vee_poset();
    auto L = down_set_lattice(*P);
    ASSERT_EQ(L.size(), 5u);
    std::set<std::set<std::string>> got;
    for (auto& a : L) got.insert(labels_of(*P, a));
    EXPECT_EQ(got, (std::set<std::set<std::string>>{{}, {"p"}, {"r"}, {"p", "r"}, {"p", "q", "r"}}));
    EXPECT_EQ(down_set_lattice(Poset::antichain({"a", "b", "c"})).size(), 8u);
    EXPECT_EQ(down_set_lattice(Poset::chain({"0", "1", "2"})).size(), 4u);

    std::vector<std::string> many(21, "");
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = "x" + std::to_string(i);
    EXPECT_THROW(down_set_lattice(Poset::antichain(many)), Error);
}

TEST(Order, LatticeClosedAndCounted) {
    std::mt19937 rng(9);
    for (int i = 0; i < 30; ++i) {
        auto P = fixtures::random_poset(rng, 1 + i % 8);
        auto L = down_set_lattice(*P);
        EXPECT_EQ(L.size(), antichain_count(*P));
        std::set<ElementSet> all(L.begin(), L.end());
        for (auto& a : L) {
            EXPECT_TRUE(is_down_set(*P, a));
            for (auto& b : L) {
                EXPECT_TRUE(all.count(a | b));
                EXPECT_TRUE(all.count(a & b));
            }
        }
        // Inclusion-compatible order.
        for (std::size_t x = 0; x < L.size(); ++x)
            for (std::size_t y = 0; y < x; ++y) EXPECT_FALSE(L[x].is_proper_subset_of(L[y]));
    }
}

TEST(Order, JoinIrreducibles) {
    auto P = fixtures::vee_poset();
    auto J = join_irreducibles(down_set_lattice(*P));
    std::set<std::pair<std::set<std::string>, std::set<std::string>>> got;
    for (auto& j : J) got.insert({labels_of(*P, j.element), labels_of(*P, j.predecessor)});
    EXPECT_EQ(got, (std::set<std::pair<std::set<std::string>, std::set<std::string>>>{
                       {{"p"}, {}}, {{"r"}, {}}, {{"p", "q", "r"}, {"p", "r"}}}));

    auto chain = Poset::chain({"0", "1", "2"});
    EXPECT_EQ(join_irreducibles(down_set_lattice(chain)).size(), 3u);

    // Boolean lattice on two atoms: an element is join-irreducible iff it is
    // not the union of the elements strictly below it (brute force).
    auto B = Poset::antichain({"a", "b"});
    auto LB = down_set_lattice(B);
    std::set<std::set<std::string>> brute;
    for (auto& x : LB) {
        if (x.none()) continue;
        ElementSet below(2);
        for (auto& y : LB)
            if (y.is_proper_subset_of(x)) below |= y;
        if (below != x) brute.insert(labels_of(B, x));
    }
    std::set<std::set<std::string>> got_b;
    for (auto& j : join_irreducibles(LB)) got_b.insert(labels_of(B, j.element));
    EXPECT_EQ(got_b, brute);
    EXPECT_EQ(got_b, (std::set<std::set<std::string>>{{"a"}, {"b"}}));
}

TEST(Order, JoinIrreduciblesArePrincipal) {
    std::mt19937 rng(13);
    for (int i = 0; i < 30; ++i) {
        auto P = fixtures::random_poset(rng, 1 + i % 7);
        auto L = down_set_lattice(*P);
        auto J = join_irreducibles(L);
        EXPECT_EQ(J.size(), P->size());
        std::set<ElementSet> principal;
        for (std::size_t q = 0; q < P->size(); ++q) principal.insert(P->down(q));
        for (auto& j : J) {
            EXPECT_TRUE(principal.count(j.element));
            ElementSet strict = j.element;
            std::size_t top = 0;
            for (std::size_t q = 0; q < P->size(); ++q)
                if (P->down(q) == j.element) top = q;
            strict.reset(top);
            EXPECT_EQ(j.predecessor, down_closure(*P, strict));
        }
        // Unions of join-irreducibles regenerate the lattice.
        std::set<ElementSet> unions{P->empty_set()};
        for (auto& j : J) {
            auto snapshot = unions;
            for (auto& u : snapshot) unions.insert(u | j.element);
        }
        EXPECT_EQ(unions, std::set<ElementSet>(L.begin(), L.end()));
    }
}

TEST(Order, OrderPreserving) {
    // Face poset of the interval complex mapped by its grading.
    auto g = fixtures::example_interval();
    const auto& X = g.complex();
    std::vector<std::string> ids;
    std::vector<std::pair<std::size_t, std::size_t>> rel;
    for (CellIndex c = 0; c < X.size(); ++c) {
        ids.push_back(X.id(c));
        for (const Term& t : X.boundary(c)) rel.push_back({t.cell, c});
    }
    Poset faces(ids, rel);
    std::vector<std::size_t> nu(g.grades().begin(), g.grades().end());
    EXPECT_TRUE(order_preserving(faces, g.poset(), nu));
    EXPECT_TRUE(order_preserving(faces, g.poset(), std::vector<std::size_t>(X.size(), 1)));

    auto two = Poset::chain({"lo", "hi"});
    EXPECT_FALSE(order_preserving(two, two, {1, 0}));
    EXPECT_THROW(order_preserving(two, two, {0}), Error);
}

TEST(Order, CycleRejected) {
    EXPECT_THROW(Poset({"a", "b"}, std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "a"}}), Error);
    EXPECT_THROW(Poset({"a", "a"}, std::vector<std::pair<std::size_t, std::size_t>>{}), Error);
}

TEST(Order, LinearExtensions) {
    auto P = fixtures::vee_poset();
    EXPECT_TRUE(is_linear_extension(*P, {0, 2, 1}));
    EXPECT_FALSE(is_linear_extension(*P, {1, 0, 2}));
    EXPECT_TRUE(is_linear_extension(*P, P->topological_order()));
}
