// Command implementations behind the `conley` executable. Each command
// writes to the given streams and returns the process exit code:
// 0 ok, 1 semantic failure, 2 parse or usage error.
#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conley/conley.hpp"
#include "conley/cubical.hpp"
#include "conley/document.hpp"
#include "conley/persistence.hpp"

namespace conley::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

struct CommonOptions {
    std::optional<std::uint32_t> field;
    unsigned threads = 1;
};

struct LoadedDocument {
    GradedComplex graded;
    bool has_poset = false;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Parses and fully validates a document. Throws ParseError for malformed
/// input and Error (with the violation report) for invalid complexes.
inline LoadedDocument load_document(const std::string& path, const CommonOptions& opt) {
    ComplexDocument doc = parse_document(read_file(path));
    auto X = document_complex(doc, opt.field);
    ValidationReport report = validate(*X);
    if (!report.ok()) throw Error("invalid cell complex\n" + report.to_string());
    return {document_graded(doc, opt.field), doc.has_poset};
}

/// Runs `body`, mapping exceptions to exit codes and messages on `err`.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

/// Writes `text` to `out_path` when given, else to `out`.
inline void deliver(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw Error("cannot write '" + out_path + "'");
    file << text;
}

inline int cmd_validate(const std::string& path, const CommonOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        ComplexDocument doc = parse_document(read_file(path));
        auto X = document_complex(doc, opt.field);
        ValidationReport report = validate(*X);
        if (!report.ok()) {
            err << report.to_string();
            return exit_failure;
        }
        auto g = document_graded(doc, opt.field);
        out << "valid: " << g.size() << " cells, field " << X->modulus() << ", " << g.poset().size()
            << " grades\n";
        return exit_ok;
    });
}

struct ConnectOptions {
    Strategy strategy = Strategy::coreduction;
    bool blocks = false;
    bool emit_tower = false;
    std::string out_path;
};

inline nlohmann::ordered_json tower_json(const ConleyResult& r) {
    nlohmann::ordered_json tower = nlohmann::ordered_json::array();
    for (const auto& step : r.tower) {
        const auto& M = step.reduction.target();
        std::vector<std::string> ids;
        for (CellIndex c = 0; c < M.size(); ++c) ids.push_back(M.id(c));
        std::sort(ids.begin(), ids.end());
        tower.push_back({{"matcher", step.matcher}, {"cells", step.reduction.source().size()}, {"critical", ids}});
    }
    return tower;
}

inline nlohmann::ordered_json blocks_json(const GradedComplex& g) {
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto& b : nonzero_blocks(g))
        blocks.push_back({{"to", g.poset().label(b.to)},
                          {"from", g.poset().label(b.from)},
                          {"rows", b.rows},
                          {"cols", b.cols},
                          {"rank", b.rank}});
    return blocks;
}

inline int cmd_homology(const std::string& path, const CommonOptions& opt, const ConnectOptions& copt,
                        std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto doc = load_document(path, opt);
        ConleyOptions o{copt.strategy, opt.threads, copt.emit_tower};
        auto r = homology(doc.graded.complex_ptr(), o, doc.graded.cube());
        nlohmann::ordered_json extra = nlohmann::ordered_json::object();
        if (copt.emit_tower) extra["tower"] = tower_json(r);
        std::string text = emit_document(r.result, false, extra);
        std::string poly = "poincare: " + f_polynomial(r.result.complex()).to_string() + "\n";
        if (copt.out_path.empty()) {
            out << text << poly;
        } else {
            deliver(text, copt.out_path, out);
            out << poly;
        }
        return exit_ok;
    });
}

inline int cmd_connect(const std::string& path, const CommonOptions& opt, const ConnectOptions& copt,
                       std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto doc = load_document(path, opt);
        ConleyOptions o{copt.strategy, opt.threads, copt.emit_tower};
        auto r = connection_matrix(doc.graded, o);
        nlohmann::ordered_json extra = nlohmann::ordered_json::object();
        if (copt.blocks) extra["blocks"] = blocks_json(r.result);
        if (copt.emit_tower) extra["tower"] = tower_json(r);
        deliver(emit_document(r.result, doc.has_poset, extra), copt.out_path, out);
        return exit_ok;
    });
}

/// DOT digraph: one node per poset element labelled with its fiber
/// polynomial, and an edge q -> p for each cover p < q.
inline std::string fiber_graph_dot(const FiberGraph& fg) {
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out + "\"";
    };
    std::ostringstream os;
    os << "digraph fibers {\n";
    for (std::size_t i = 0; i < fg.labels.size(); ++i)
        os << "  " << quote(fg.labels[i]) << " [label=" << quote(fg.labels[i] + ": " + fg.polynomials[i].to_string())
           << "];\n";
    for (auto [lo, hi] : fg.covers) os << "  " << quote(fg.labels[hi]) << " -> " << quote(fg.labels[lo]) << ";\n";
    os << "}\n";
    return os.str();
}

inline int cmd_graph(const std::string& path, const std::string& stage, const CommonOptions& opt,
                     const ConnectOptions& copt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        if (stage != "input" && stage != "output") throw ParseError("--stage must be input or output");
        auto doc = load_document(path, opt);
        if (stage == "input") {
            deliver(fiber_graph_dot(fiber_graph(doc.graded)), copt.out_path, out);
        } else {
            ConleyOptions o{copt.strategy, opt.threads, false};
            deliver(fiber_graph_dot(conley_morse_graph(connection_matrix(doc.graded, o))), copt.out_path, out);
        }
        return exit_ok;
    });
}

/// "{p;r}" with labels in poset order.
inline std::string format_csv_set(const Poset& P, const ElementSet& s) { return format_set(P, s, ";"); }

/// Parses "{p,r}" or "{p;r}" ("{}" is empty) into an element set.
inline ElementSet parse_set(const Poset& P, const std::string& text) {
    if (text.size() < 2 || text.front() != '{' || text.back() != '}')
        throw ParseError("element set '" + text + "' must be written in braces");
    ElementSet s = P.empty_set();
    std::string inner = text.substr(1, text.size() - 2), label;
    std::istringstream is(inner);
    while (std::getline(is, label, inner.find(';') != std::string::npos ? ';' : ',')) {
        auto b = label.find_first_not_of(' '), e = label.find_last_not_of(' ');
        if (b == std::string::npos) continue;
        auto i = P.find(label.substr(b, e - b + 1));
        if (!i) throw ParseError("unknown poset element '" + label + "'");
        s.set(*i);
    }
    return s;
}

/// One pair per line: two braced sets separated by whitespace.
inline std::vector<DownSetPair> parse_pairs(const Poset& P, const std::string& text) {
    std::vector<DownSetPair> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a >> b) || (ls >> extra)) throw ParseError("pair line '" + line + "' needs two sets");
        out.push_back({parse_set(P, a), parse_set(P, b)});
    }
    return out;
}

struct PersistOptions {
    std::string extension;   // comma-separated labels
    std::string pairs_path;
    std::string via = "direct";
    Strategy strategy = Strategy::coreduction;
    std::string out_path;
};

inline std::string pairs_csv(const GradedComplex& g, const std::vector<DownSetPair>& pairs) {
    const Poset& P = g.poset();
    for (const auto& [a, b] : pairs)
        if (!is_down_set(P, a) || !is_down_set(P, b) || !a.is_subset_of(b))
            throw Error("pair " + format_set(P, a) + " " + format_set(P, b) + " is not a nested down-set pair");
    std::ostringstream os;
    os << "dim,a,b,betti\n";
    const int top = g.complex().max_dim();
    for (int j = 0; j <= top; ++j)
        for (const auto& [a, b] : pairs)
            os << j << ',' << format_csv_set(P, a) << ',' << format_csv_set(P, b) << ','
               << persistent_betti(g, a, b, j) << '\n';
    return os.str();
}

inline int cmd_persist(const std::string& path, const CommonOptions& opt, const PersistOptions& popt,
                       std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (popt.via != "direct" && popt.via != "conley") throw ParseError("--via must be direct or conley");
        if (!popt.extension.empty() && !popt.pairs_path.empty())
            throw ParseError("--extension and --pairs are exclusive");
        auto doc = load_document(path, opt);
        const Poset& P = doc.graded.poset();
        std::vector<DownSetPair> pairs;
        if (!popt.pairs_path.empty()) pairs = parse_pairs(P, read_file(popt.pairs_path));

        GradedComplex target = doc.graded;
        if (popt.via == "conley") {
            ConleyOptions o{popt.strategy, opt.threads, false};
            target = connection_matrix(doc.graded, o).result;
        }

        std::string csv;
        if (!popt.extension.empty()) {
            std::vector<std::size_t> ext;
            std::istringstream is(popt.extension);
            std::string label;
            while (std::getline(is, label, ',')) {
                auto i = P.find(label);
                if (!i) throw Error("unknown poset element '" + label + "' in extension");
                ext.push_back(*i);
            }
            csv = diagram_csv(diagram_total_order(target, ext));
        } else {
            if (popt.pairs_path.empty()) pairs = all_down_set_pairs(P);
            csv = pairs_csv(target, pairs);
        }
        deliver(csv, popt.out_path, out);
        return exit_ok;
    });
}

inline int cmd_cubical(const std::string& path, const CommonOptions& opt, const std::string& out_path,
                       std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::istringstream in(read_file(path));
        CubicalGrid grid;
        try {
            grid = parse_grid(in);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what());
        }
        auto g = build_complex(grid, opt.field.value_or(2));
        deliver(emit_document(g, true), out_path, out);
        return exit_ok;
    });
}

}  // namespace conley::cli
