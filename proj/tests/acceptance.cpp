// Acceptance runner: one PASS/FAIL line per criterion with its measured time
// against the pinned limit. Exit status is nonzero when any criterion fails.
#include <sys/resource.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#include "support.hpp"

using namespace conley;
using fixtures::ids_of;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::string detail;
    std::string note;  // what was covered, shown on the result line
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

struct Timer {
    Clock::time_point start = Clock::now();
    double ms() const { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); }
};

int failures = 0;

// `body` fills the outcome and returns the time it attributes to the
// criterion, in milliseconds.
void criterion(int number, const std::string& name, double limit_ms, const std::function<double(Outcome&)>& body) {
    Outcome out;
    double ms = 0;
    try {
        ms = body(out);
    } catch (const std::exception& e) {
        out.ok = false;
        out.detail = std::string("exception: ") + e.what();
    }
    bool pass = out.ok && ms < limit_ms;
    if (out.ok && !pass) out.detail = "over time limit";
    if (!pass) ++failures;
    char timing[96];
    std::snprintf(timing, sizeof timing, "%.3f ms, limit %.0f ms", ms, limit_ms);
    std::cout << (pass ? "PASS" : "FAIL") << "  " << number << ". " << name << " (" << timing << ")";
    if (!out.note.empty()) std::cout << " [" << out.note << "]";
    if (!pass) std::cout << ": " << out.detail;
    std::cout << std::endl;
}

IntPolynomial poly(std::initializer_list<std::int64_t> c) { return IntPolynomial(std::vector<std::int64_t>(c)); }

const std::vector<std::uint32_t> moduli{2, 3, 5};

// Every reduction-identity and filtration check for one graded run.
void check_run(Outcome& out, const GradedComplex& g, const ConleyResult& res, const std::string& label) {
    std::vector<const Reduction*> all{&res.composed};
    for (const auto& step : res.tower) all.push_back(&step.reduction);
    for (const Reduction* r : all) {
        if (r->source().size() > 500) continue;
        auto failed = oracle::check_reduction(*r);
        out.require(failed.empty(), label + ": " + (failed.empty() ? "" : failed.front()));
    }
    const Reduction& r = res.composed;
    const GradedComplex& M = res.result;
    out.require(is_p_filtered(g, M, [&](CellIndex c) { return r.psi(c); }), label + ": psi not filtered");
    out.require(is_p_filtered(M, g, [&](CellIndex c) { return r.phi(c); }), label + ": phi not filtered");
    out.require(is_p_filtered(g, g, [&](CellIndex c) { return r.gamma(c); }), label + ": gamma not filtered");
    out.require(is_strict(M), label + ": result not strict");
}


}  // namespace

int main() {
    criterion(1, "interval connection matrix", 1, [](Outcome& out) {
        auto g = fixtures::example_interval();
        Timer t;
        auto res = connection_matrix(g);
        auto fg = fiber_graph(res.result);
        auto blocks = nonzero_blocks(res.result);
        double ms = t.ms();
        const Poset& P = res.result.poset();
        out.require(is_strict(res.result), "result not strict");
        out.require(fg.at("p") == poly({1}) && fg.at("r") == poly({1}) && fg.at("q") == poly({0, 1}),
                    "fiber polynomials differ");
        out.require(blocks.size() == 2, "expected two nonzero blocks");
        for (const auto& b : blocks)
            out.require(P.label(b.from) == "q" && b.rank == 1 && b.rows == 1 && b.cols == 1, "block shape");
        return ms;
    });

    criterion(2, "cubical homology and coordinate tower", 1, [](Outcome& out) {
        auto g = fixtures::example_cubical(false);
        ConleyOptions opt;
        opt.strategy = Strategy::coordinate;
        Timer t;
        auto res = homology(g.complex_ptr(), opt, g.cube());
        double ms = t.ms();
        out.require(f_polynomial(res.result.complex()) == poly({0, 1}), "Poincare polynomial is not t^1");
        out.require(res.tower.size() == 2, "expected a two-step tower");
        if (res.tower.size() == 2) {
            out.require(ids_of(res.tower[0].reduction.target()) ==
                            std::set<std::string>{"[1]x[0,1]", "[1]x[1,2]", "[1]x[1]"},
                        "first critical set");
            out.require(ids_of(res.tower[1].reduction.target()) == std::set<std::string>{"[1]x[0,1]"},
                        "second critical set");
        }
        return ms;
    });

    criterion(3, "graded cubical connection matrix", 1, [](Outcome& out) {
        auto g = fixtures::example_cubical(true);
        Timer t;
        auto input = fiber_graph(g);
        auto res = connection_matrix(g);
        auto fg = fiber_graph(res.result);
        const Poset& P = g.poset();
        auto block = connecting_block(res, make_set(P, {"0"}), make_set(P, {"1"}));
        auto r = block.rank(g.complex().field());
        double ms = t.ms();
        out.require(res.result.size() == 2, "result does not have two cells");
        out.require(fg.at("0") == poly({0, 1}) && fg.at("1") == poly({0, 0, 1}), "output fiber graph");
        out.require(input.at("0") == poly({9, 14, 4}) && input.at("1") == poly({0, 1, 2}), "input fiber graph");
        out.require(r == 1, "block rank is not 1");
        for (CellIndex c : block.cols) out.require(res.result.complex().dim(c) == 2, "block column not in degree 2");
        return ms;
    });

    criterion(4, "thirds compression at N = 9e3 and 9e5", 1000, [](Outcome& out) {
        double slowest = 0;
        for (std::size_t n : {9000u, 900000u}) {
            auto g = fixtures::example_thirds(n);
            const std::int64_t M = static_cast<std::int64_t>(n / 3);
            Timer t;
            auto in = fiber_graph(g);
            ConleyOptions opt;
            opt.keep_tower = false;
            auto res = connection_matrix(g, opt);
            auto fg = fiber_graph(res.result);
            slowest = std::max(slowest, t.ms());
            out.require(in.at("p") == poly({M + 1, M}) && in.at("q") == poly({M - 1, M}) &&
                            in.at("r") == poly({M + 1, M}),
                        "input fiber graph at N=" + std::to_string(n));
            out.require(fg.at("q") == poly({0, 1}) && fg.at("p") == poly({1}) && fg.at("r") == poly({1}),
                        "Conley-Morse graph at N=" + std::to_string(n));
        }
        return slowest;
    });

    criterion(5, "persistence preserved by the Conley complex", 30000, [](Outcome& out) {
        Timer t;
        std::mt19937 rng(2024);
        std::vector<GradedComplex> corpus{fixtures::example_persistence()};
        for (int i = 0; i < 100; ++i) corpus.push_back(fixtures::random_graded_complex(rng, moduli[i % 3], 60, 5));
        std::size_t checked = 0;
        for (std::size_t k = 0; k < corpus.size(); ++k) {
            const auto& g = corpus[k];
            auto res = connection_matrix(g);
            for (const auto& [a, b] : all_down_set_pairs(g.poset()))
                for (int j = 0; j <= std::max(g.complex().max_dim(), 0); ++j) {
                    ++checked;
                    auto direct = persistent_betti(g, a, b, j);
                    auto via = persistent_betti(res.result, a, b, j);
                    auto dense = oracle::dense_persistent_betti(g, a, b, j);
                    out.require(direct == via && direct == dense,
                                "complex " + std::to_string(k) + " degree " + std::to_string(j) + ": direct " +
                                    std::to_string(direct) + ", conley " + std::to_string(via) + ", dense " +
                                    std::to_string(dense));
                }
        }
        out.require(checked > 0, "nothing checked");
        out.note = std::to_string(corpus.size()) + " complexes, " + std::to_string(checked) + " Betti numbers";
        return t.ms();
    });

    criterion(6, "reduction identities and filtration", 60000, [](Outcome& out) {
        Timer t;
        std::vector<std::pair<std::string, GradedComplex>> corpus{
            {"interval", fixtures::example_interval()},
            {"filtration", fixtures::example_persistence()},
            {"reduced block", fixtures::example_cubical(false)},
            {"graded block", fixtures::example_cubical(true)},
            {"thirds 90", fixtures::example_thirds(90)},
            {"thirds 90 GF(5)", fixtures::example_thirds(90, 5)},
        };
        std::mt19937 rng(77);
        for (int i = 0; i < 60; ++i)
            corpus.push_back({"random " + std::to_string(i), fixtures::random_graded_complex(rng, moduli[i % 3], 60, 5)});
        for (int i = 0; i < 6; ++i)
            corpus.push_back({"lattice grid " + std::to_string(i),
                              fixtures::random_lattice_grid(rng, {5, 4}, 2, 3, moduli[i % 3])});
        std::size_t runs = 0;
        for (const auto& [label, g] : corpus) {
            if (g.size() > 500) continue;
            ++runs;
            check_run(out, g, connection_matrix(g), label);
            if (g.cube()) {
                ConleyOptions opt;
                opt.strategy = Strategy::coordinate;
                check_run(out, g, connection_matrix(g, opt), label + " (coordinate)");
            }
            auto h = homology(g.complex_ptr(), {}, g.cube());
            auto failed = oracle::check_reduction(h.composed);
            out.require(failed.empty(), label + " homology: " + (failed.empty() ? "" : failed.front()));
        }
        out.note = std::to_string(runs) + " complexes";
        return t.ms();
    });

    criterion(7, "strategy invariance on random cubical grids", 60000, [](Outcome& out) {
        Timer t;
        std::mt19937 rng(31337);
        std::size_t blocks = 0;
        for (int i = 0; i < 20; ++i) {
            auto g = fixtures::random_lattice_grid(rng, {6, 5}, 3, 2, moduli[i % 3]);
            ConleyOptions a, b;
            b.strategy = Strategy::coordinate;
            auto ra = connection_matrix(g, a), rb = connection_matrix(g, b);
            const std::string tag = "grid " + std::to_string(i);
            out.require(fiber_graph(ra.result).polynomials == fiber_graph(rb.result).polynomials, tag + ": fibers");
            auto inv = block_rank_invariants(ra.result);
            for (const auto& x : inv) blocks += x.rank > 0;
            out.require(inv == block_rank_invariants(rb.result), tag + ": block ranks");
            for (int e = 0; e < 3; ++e) {
                auto ext = fixtures::random_extension(rng, g.poset());
                out.require(diagram_csv(diagram_total_order(ra.result, ext)) ==
                                diagram_csv(diagram_total_order(rb.result, ext)),
                            tag + ": persistence CSV");
            }
        }
        out.note = "20 grids, " + std::to_string(blocks) + " nonzero block ranks";
        return t.ms();
    });

    criterion(8, "regraded interval long exact sequence", 1, [](Outcome& out) {
        auto g = fixtures::example_interval();
        auto Q = std::make_shared<const Poset>(Poset::chain({"0", "1"}));
        const Poset& P = g.poset();
        std::vector<std::size_t> rho(P.size());
        rho[P.index_of("p")] = 0;
        rho[P.index_of("r")] = 0;
        rho[P.index_of("q")] = 1;
        Timer t;
        auto h = regrade(g, Q, rho);
        auto res = connection_matrix(h);
        auto blocks = nonzero_blocks(res.result);
        double ms = t.ms();
        out.require(blocks.size() == 1, "expected one nonzero block");
        if (blocks.size() == 1) {
            const auto& b = blocks[0];
            out.require(Q->label(b.from) == "1" && Q->label(b.to) == "0", "block direction");
            out.require(b.rank == 1 && b.cols == 1 && b.rows == 2, "block shape or rank");
        }
        return ms;
    });

    criterion(9, "512x512 two-level grid connect", 30000, [](Outcome& out) {
        std::mt19937 rng(512);
        auto grid = fixtures::random_two_level_grid(rng, 512, 512);
        Timer t;
        auto g = build_complex(grid, 2);
        ConleyOptions opt;
        opt.keep_tower = false;
        auto res = connection_matrix(g, opt);
        double ms = t.ms();
        out.require(is_strict(res.result), "result not strict");
        rusage usage{};
        getrusage(RUSAGE_SELF, &usage);
        double peak_mb = static_cast<double>(usage.ru_maxrss) / 1024.0;
        out.require(peak_mb < 2048, "peak memory " + std::to_string(peak_mb) + " MB");
        out.note = std::to_string(g.size()) + " -> " + std::to_string(res.result.size()) + " cells, peak RSS " +
                   std::to_string(static_cast<long>(peak_mb)) + " MB";
        return ms;
    });

    std::cout << (failures ? "FAILED: " + std::to_string(failures) + " criteria" : std::string("all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
