// JSON complex documents: parsing, canonical emission, and conversion to
// graded complexes.
#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conley/graded.hpp"

namespace conley {

/// Malformed input, as opposed to well-formed input that fails validation.
struct ParseError : Error {
    using Error::Error;
};

struct DocumentCell {
    std::string id;
    int dim = 0;
    std::optional<std::string> grade;
    std::vector<std::pair<std::string, std::int64_t>> boundary;
    std::vector<std::string> faces;
    std::vector<std::uint32_t> cube;
};

struct ComplexDocument {
    std::uint32_t field = 2;
    bool has_poset = false;
    std::vector<std::string> elements;
    std::vector<std::pair<std::string, std::string>> covers;
    std::vector<std::uint32_t> cube_extent;  // empty when not cubical
    std::vector<DocumentCell> cells;
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

template <class T>
T get_as(const nlohmann::json& j, const char* what) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(std::string("field '") + what + "' has the wrong type");
    }
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'");
    return *it;
}

}  // namespace detail

inline ComplexDocument parse_document(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("document must be a JSON object");
    ComplexDocument doc;
    if (auto it = j.find("field"); it != j.end()) doc.field = detail::get_as<std::uint32_t>(*it, "field");
    if (auto it = j.find("poset"); it != j.end()) {
        if (!it->is_object()) throw ParseError("field 'poset' must be an object");
        doc.has_poset = true;
        doc.elements = detail::get_as<std::vector<std::string>>(detail::require(*it, "elements"), "elements");
        if (auto c = it->find("covers"); c != it->end())
            for (const auto& pair : *c) {
                auto v = detail::get_as<std::vector<std::string>>(pair, "covers");
                if (v.size() != 2) throw ParseError("each cover must be a [lower, upper] pair");
                doc.covers.push_back({v[0], v[1]});
            }
    }
    if (auto it = j.find("cubical"); it != j.end())
        doc.cube_extent = detail::get_as<std::vector<std::uint32_t>>(detail::require(*it, "extent"), "extent");
    const auto& cells = detail::require(j, "cells");
    if (!cells.is_array()) throw ParseError("field 'cells' must be an array");
    for (const auto& c : cells) {
        if (!c.is_object()) throw ParseError("each cell must be an object");
        DocumentCell cell;
        cell.id = detail::get_as<std::string>(detail::require(c, "id"), "id");
        cell.dim = detail::get_as<int>(detail::require(c, "dim"), "dim");
        if (auto g = c.find("grade"); g != c.end()) {
            if (g->is_string())
                cell.grade = g->get<std::string>();
            else if (g->is_number_integer())
                cell.grade = std::to_string(g->get<std::int64_t>());
            else
                throw ParseError("field 'grade' must be a string or integer");
        }
        if (auto b = c.find("boundary"); b != c.end()) {
            if (!b->is_array()) throw ParseError("field 'boundary' must be an array");
            for (const auto& e : *b) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number_integer())
                    throw ParseError("boundary entries must be [face id, integer coefficient]");
                cell.boundary.push_back({e[0].get<std::string>(), e[1].get<std::int64_t>()});
            }
        }
        if (auto f = c.find("faces"); f != c.end()) cell.faces = detail::get_as<std::vector<std::string>>(*f, "faces");
        if (auto q = c.find("cube"); q != c.end()) cell.cube = detail::get_as<std::vector<std::uint32_t>>(*q, "cube");
        doc.cells.push_back(std::move(cell));
    }
    return doc;
}

inline ComplexDocument parse_document(const std::string& text) {
    std::istringstream in(text);
    return parse_document(in);
}

/// The complex half of a document, cells in canonical (dim, id) order.
/// Structural problems (unknown ids, duplicates, bad modulus) throw
/// ParseError; nothing here checks the cell-complex conditions.
inline std::shared_ptr<const CellComplex> document_complex(const ComplexDocument& doc,
                                                           std::optional<std::uint32_t> modulus = {}) {
    std::uint32_t p = modulus.value_or(doc.field);
    std::vector<std::size_t> order(doc.cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto &x = doc.cells[a], &y = doc.cells[b];
        return x.dim != y.dim ? x.dim < y.dim : x.id < y.id;
    });
    try {
        CellComplex::Builder builder(p);
        for (auto i : order) builder.add_cell(doc.cells[i].id, doc.cells[i].dim);
        for (auto i : order) {
            for (const auto& [face, coef] : doc.cells[i].boundary) builder.add_boundary(doc.cells[i].id, face, coef);
            for (const auto& face : doc.cells[i].faces) builder.add_face(doc.cells[i].id, face);
        }
        return std::make_shared<const CellComplex>(builder.build());
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

/// Full graded complex. Grading that is not order-preserving throws Error
/// (a validation failure), everything structural throws ParseError.
inline GradedComplex document_graded(const ComplexDocument& doc, std::optional<std::uint32_t> modulus = {}) {
    auto X = document_complex(doc, modulus);
    std::shared_ptr<const Poset> P;
    try {
        P = doc.has_poset ? std::make_shared<const Poset>(doc.elements, doc.covers)
                          : std::make_shared<const Poset>(Poset::single("0"));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    std::vector<std::uint32_t> grades(X->size(), 0);
    std::shared_ptr<CubicalEmbedding> cube;
    if (!doc.cube_extent.empty()) {
        cube = std::make_shared<CubicalEmbedding>();
        cube->extent = doc.cube_extent;
        cube->coords.assign(X->size() * doc.cube_extent.size(), 0);
    }
    for (const auto& cell : doc.cells) {
        CellIndex c = X->index_of(cell.id);
        if (doc.has_poset) {
            if (!cell.grade) throw ParseError("cell '" + cell.id + "' has no grade");
            auto g = P->find(*cell.grade);
            if (!g) throw ParseError("cell '" + cell.id + "' has unknown grade '" + *cell.grade + "'");
            grades[c] = static_cast<std::uint32_t>(*g);
        }
        if (cube) {
            if (cell.cube.size() != cube->axes()) throw ParseError("cell '" + cell.id + "' has bad cube coordinates");
            for (std::size_t i = 0; i < cube->axes(); ++i) {
                if (cell.cube[i] >= cube->extent[i]) throw ParseError("cell '" + cell.id + "' lies outside the frame");
                cube->coords[c * cube->axes() + i] = cell.cube[i];
            }
        }
    }
    return GradedComplex(std::move(X), std::move(P), std::move(grades), std::move(cube));
}

/// Canonical JSON text: cells in index order (which is (dim, id) for
/// complexes read from documents), boundaries sorted by face index, one cell
/// per line. Grades and the poset are written when `with_poset`.
inline std::string emit_document(const GradedComplex& g, bool with_poset,
                                 const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) {
    using detail::ordered_json;
    const auto& X = g.complex();
    std::vector<CellIndex> order(X.size());
    for (CellIndex c = 0; c < X.size(); ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](CellIndex a, CellIndex b) {
        return X.dim(a) != X.dim(b) ? X.dim(a) < X.dim(b) : X.id(a) < X.id(b);
    });

    std::ostringstream os;
    os << "{\n  \"field\": " << X.modulus();
    if (with_poset) {
        ordered_json poset;
        poset["elements"] = g.poset().labels();
        ordered_json covers = ordered_json::array();
        for (auto [lo, hi] : g.poset().covers()) covers.push_back({g.poset().label(lo), g.poset().label(hi)});
        poset["covers"] = covers;
        os << ",\n  \"poset\": " << poset.dump();
    }
    if (auto cube = g.cube()) os << ",\n  \"cubical\": " << ordered_json{{"extent", cube->extent}}.dump();
    os << ",\n  \"cells\": [";
    for (std::size_t k = 0; k < order.size(); ++k) {
        CellIndex c = order[k];
        ordered_json cell;
        cell["id"] = X.id(c);
        cell["dim"] = X.dim(c);
        if (with_poset) cell["grade"] = g.poset().label(g.grade(c));
        std::vector<Term> terms(X.boundary(c).begin(), X.boundary(c).end());
        std::sort(terms.begin(), terms.end(), [&](const Term& a, const Term& b) {
            return X.dim(a.cell) != X.dim(b.cell) ? X.dim(a.cell) < X.dim(b.cell) : X.id(a.cell) < X.id(b.cell);
        });
        ordered_json bd = ordered_json::array();
        for (const Term& t : terms) bd.push_back({X.id(t.cell), t.coef});
        cell["boundary"] = bd;
        if (!X.explicit_faces(c).empty()) {
            std::vector<std::string> faces;
            for (CellIndex f : X.explicit_faces(c)) faces.push_back(X.id(f));
            std::sort(faces.begin(), faces.end());
            cell["faces"] = faces;
        }
        if (auto cube = g.cube()) {
            auto x = cube->of(c);
            cell["cube"] = std::vector<std::uint32_t>(x.begin(), x.end());
        }
        os << (k ? ",\n    " : "\n    ") << cell.dump();
    }
    os << (order.empty() ? "]" : "\n  ]");
    for (auto it = extra.begin(); it != extra.end(); ++it) os << ",\n  \"" << it.key() << "\": " << it.value().dump();
    os << "\n}\n";
    return os.str();
}

}  // namespace conley
