// SPDX-License-Identifier: MIT
#ifndef LATCOH_GRAPH_HPP
#define LATCOH_GRAPH_HPP

/**
 * @file graph.hpp
 * @brief Plumbing graphs: weighted graphs encoding 4-manifold plumbings.
 *
 * A plumbing graph is a finite graph with an integer decoration (Euler
 * number) at each vertex.  Cycles and parallel edges are allowed; loops
 * (edges from a vertex to itself) are not.  The associated intersection
 * form M has M[j][j] equal to the decoration of vertex j and M[i][j]
 * equal to the number of edges between i and j.
 *
 * Vertex order is significant: it fixes the basis E_j of the lattice and
 * therefore every coordinate in the rest of the library.  Parsing
 * preserves file order; serialization is canonical (edges sorted), so
 * identical graphs always serialize to identical bytes.
 *
 * Two interchange formats are supported:
 *
 *  - text:      one "id: decoration" line per vertex, then a line
 *               "edges:", then one "idA idB" line per edge;
 *  - JSON:      {"vertices":[{"id":...,"e":...},...], "edges":[[a,b],...]}.
 *
 * In both formats ids are arbitrary tokens; JSON ids may also be numbers.
 */

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "latcoh/matrix.hpp"

namespace latcoh {

/** @brief Error raised for malformed graph files or invalid graph edits. */
class graph_error : public std::runtime_error {
public:
    explicit graph_error(const std::string& what) : std::runtime_error(what) {}
};

/** @brief A vertex-decorated multigraph (no loops). */
class PlumbingGraph {
public:
    PlumbingGraph() = default;

    /**
     * @brief Build a graph from decorations and index edges.
     * @param decorations one integer per vertex (vertex j = position j)
     * @param edges       pairs of distinct vertex indices; repeats allowed
     * @param ids         optional vertex names (defaults to "0","1",...)
     */
    PlumbingGraph(std::vector<Int> decorations,
                  std::vector<std::pair<int, int>> edges,
                  std::vector<std::string> ids = {})
        : e_(std::move(decorations)), ids_(std::move(ids)) {
        if (ids_.empty()) {
            for (std::size_t i = 0; i < e_.size(); ++i) ids_.push_back(std::to_string(i));
        }
        if (ids_.size() != e_.size())
            throw graph_error("vertex id list and decoration list differ in length");
        check_unique_ids();
        for (auto [a, b] : edges) add_edge(a, b);
    }

    std::size_t size() const { return e_.size(); }

    const Int& decoration(std::size_t j) const { return e_.at(j); }
    const std::string& id(std::size_t j) const { return ids_.at(j); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    /** @brief Vertex index for an id token. @throws graph_error if unknown. */
    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < ids_.size(); ++i)
            if (ids_[i] == id) return i;
        throw graph_error("unknown vertex id: " + id);
    }

    /** @brief Number of incident edge-ends at vertex j (parallel edges count). */
    std::size_t degree(std::size_t j) const {
        std::size_t d = 0;
        for (auto [a, b] : edges_)
            if (a == (int)j || b == (int)j) ++d;
        return d;
    }

    /** @brief The symmetric intersection form M (decorations on the diagonal). */
    IntMat intersection_form() const {
        IntMat m(size(), size());
        for (std::size_t j = 0; j < size(); ++j) m(j, j) = e_[j];
        for (auto [a, b] : edges_) {
            m(a, b) += 1;
            m(b, a) += 1;
        }
        return m;
    }

    /** @brief det(-M), the standard graph determinant. */
    Int determinant() const { return det_bareiss(-intersection_form()); }

    bool negative_definite() const { return is_negative_definite(intersection_form()); }
    bool degenerate() const { return det_bareiss(intersection_form()) == 0; }

    bool connected() const {
        if (size() == 0) return true;
        std::vector<char> seen(size(), 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (auto [a, b] : edges_) {
                std::size_t w = size();
                if (a == (int)v) w = b;
                else if (b == (int)v) w = a;
                if (w < size() && !seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == size();
    }

    /** @brief Remove vertex j0 together with all incident edges. */
    PlumbingGraph delete_vertex(std::size_t j0) const {
        if (j0 >= size()) throw graph_error("delete_vertex: index out of range");
        std::vector<Int> e2;
        std::vector<std::string> ids2;
        for (std::size_t j = 0; j < size(); ++j) {
            if (j == j0) continue;
            e2.push_back(e_[j]);
            ids2.push_back(ids_[j]);
        }
        std::vector<std::pair<int, int>> edges2;
        for (auto [a, b] : edges_) {
            if (a == (int)j0 || b == (int)j0) continue;
            auto shift = [&](int v) { return v > (int)j0 ? v - 1 : v; };
            edges2.emplace_back(shift(a), shift(b));
        }
        return PlumbingGraph(std::move(e2), std::move(edges2), std::move(ids2));
    }

    /** @brief Copy with the decoration of vertex j changed by delta. */
    PlumbingGraph bump_decoration(std::size_t j, const Int& delta) const {
        PlumbingGraph g = *this;
        g.e_.at(j) += delta;
        return g;
    }

    /**
     * @brief Blow up at vertex j0.
     *
     * Appends a new (-1)-decorated vertex (index size()) joined to j0 by a
     * single edge, and decreases the decoration of j0 by one.  The new
     * vertex id is "b0", "b1", ... (first unused).
     */
    PlumbingGraph blow_up(std::size_t j0) const {
        if (j0 >= size()) throw graph_error("blow_up: index out of range");
        PlumbingGraph g = *this;
        g.e_[j0] -= 1;
        g.e_.push_back(Int(-1));
        g.ids_.push_back(fresh_id());
        g.edges_.emplace_back((int)j0, (int)(g.size() - 1));
        std::sort(g.edges_.begin(), g.edges_.end());
        return g;
    }

    /**
     * @brief Append a new (-1)-vertex at j0 without touching decorations.
     *
     * This is the auxiliary graph used by vertex-splitting constructions:
     * the result equals blow_up applied to the graph whose decoration at
     * j0 is one higher.
     */
    PlumbingGraph attach_minus_one(std::size_t j0) const {
        if (j0 >= size()) throw graph_error("attach_minus_one: index out of range");
        PlumbingGraph g = *this;
        g.e_.push_back(Int(-1));
        g.ids_.push_back(fresh_id());
        g.edges_.emplace_back((int)j0, (int)(g.size() - 1));
        std::sort(g.edges_.begin(), g.edges_.end());
        return g;
    }

    /** @brief Canonical text serialization (stable bytes for equal graphs). */
    std::string serialize_text() const {
        std::ostringstream out;
        for (std::size_t j = 0; j < size(); ++j)
            out << ids_[j] << ": " << e_[j].get_str() << "\n";
        out << "edges:\n";
        auto sorted = edges_;
        std::sort(sorted.begin(), sorted.end());
        for (auto [a, b] : sorted) out << ids_[a] << " " << ids_[b] << "\n";
        return out.str();
    }

    /** @brief Canonical JSON serialization. */
    std::string serialize_json() const {
        nlohmann::ordered_json doc;
        doc["vertices"] = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < size(); ++j) {
            nlohmann::ordered_json v;
            v["id"] = ids_[j];
            if (e_[j].fits_slong_p())
                v["e"] = e_[j].get_si();
            else
                v["e"] = e_[j].get_str();
            doc["vertices"].push_back(v);
        }
        doc["edges"] = nlohmann::ordered_json::array();
        auto sorted = edges_;
        std::sort(sorted.begin(), sorted.end());
        for (auto [a, b] : sorted) doc["edges"].push_back({ids_[a], ids_[b]});
        return doc.dump(2) + "\n";
    }

    bool operator==(const PlumbingGraph& o) const {
        if (e_ != o.e_ || ids_ != o.ids_) return false;
        auto a = edges_, b = o.edges_;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    }

private:
    void add_edge(int a, int b) {
        if (a < 0 || b < 0 || a >= (int)size() || b >= (int)size())
            throw graph_error("edge endpoint out of range");
        if (a == b) throw graph_error("loop edges are not allowed (vertex " + ids_[a] + ")");
        edges_.emplace_back(std::min(a, b), std::max(a, b));
        std::sort(edges_.begin(), edges_.end());
    }

    void check_unique_ids() const {
        auto sorted = ids_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw graph_error("duplicate vertex id");
    }

    std::string fresh_id() const {
        for (int n = 0;; ++n) {
            std::string cand = "b" + std::to_string(n);
            if (std::find(ids_.begin(), ids_.end(), cand) == ids_.end()) return cand;
        }
    }

    std::vector<Int> e_;
    std::vector<std::string> ids_;
    std::vector<std::pair<int, int>> edges_;
};

/** @brief Parse the line-oriented text format. Lines starting with '#' are comments. */
inline PlumbingGraph parse_graph_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<Int> decorations;
    std::vector<std::string> ids;
    std::vector<std::pair<std::string, std::string>> raw_edges;
    bool in_edges = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        auto hash = trimmed.find('#');
        if (hash != std::string::npos) trimmed.erase(hash);
        // strip whitespace
        auto first = trimmed.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = trimmed.find_last_not_of(" \t\r");
        trimmed = trimmed.substr(first, last - first + 1);
        if (trimmed == "edges:") {
            if (in_edges) throw graph_error("line " + std::to_string(lineno) + ": duplicate 'edges:'");
            in_edges = true;
            continue;
        }
        if (!in_edges) {
            auto colon = trimmed.find(':');
            if (colon == std::string::npos)
                throw graph_error("line " + std::to_string(lineno) + ": expected 'id: decoration'");
            std::string id = trimmed.substr(0, colon);
            std::string dec = trimmed.substr(colon + 1);
            auto strip = [](std::string s) {
                auto f = s.find_first_not_of(" \t");
                auto l = s.find_last_not_of(" \t");
                if (f == std::string::npos) return std::string();
                return s.substr(f, l - f + 1);
            };
            id = strip(id);
            dec = strip(dec);
            if (id.empty() || dec.empty())
                throw graph_error("line " + std::to_string(lineno) + ": expected 'id: decoration'");
            try {
                decorations.emplace_back(dec);
            } catch (const std::invalid_argument&) {
                throw graph_error("line " + std::to_string(lineno) + ": bad decoration '" + dec + "'");
            }
            ids.push_back(id);
        } else {
            std::istringstream es(trimmed);
            std::string a, b, extra;
            if (!(es >> a >> b) || (es >> extra))
                throw graph_error("line " + std::to_string(lineno) + ": expected 'idA idB'");
            raw_edges.emplace_back(a, b);
        }
    }
    if (decorations.empty()) throw graph_error("graph file has no vertices");
    if (!in_edges) throw graph_error("graph file is missing the 'edges:' section");
    PlumbingGraph g(decorations, {}, ids);
    std::vector<std::pair<int, int>> edges;
    for (auto& [a, b] : raw_edges)
        edges.emplace_back((int)g.index_of(a), (int)g.index_of(b));
    return PlumbingGraph(std::move(decorations), std::move(edges), std::move(ids));
}

/** @brief Parse the JSON format. */
inline PlumbingGraph parse_graph_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw graph_error(std::string("invalid JSON: ") + ex.what());
    }
    if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array())
        throw graph_error("JSON graph must contain a 'vertices' array");
    std::vector<Int> decorations;
    std::vector<std::string> ids;
    auto id_string = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        throw graph_error("vertex id must be a string or integer");
    };
    for (const auto& v : doc["vertices"]) {
        if (!v.is_object() || !v.contains("id") || !v.contains("e"))
            throw graph_error("each vertex needs 'id' and 'e'");
        ids.push_back(id_string(v["id"]));
        const auto& e = v["e"];
        if (e.is_number_integer())
            decorations.emplace_back((long)e.get<long long>());
        else if (e.is_string())
            decorations.emplace_back(e.get<std::string>());
        else
            throw graph_error("decoration 'e' must be an integer");
    }
    if (ids.empty()) throw graph_error("graph file has no vertices");
    PlumbingGraph lookup(decorations, {}, ids);
    std::vector<std::pair<int, int>> edges;
    if (doc.contains("edges")) {
        if (!doc["edges"].is_array()) throw graph_error("'edges' must be an array");
        for (const auto& e : doc["edges"]) {
            if (!e.is_array() || e.size() != 2) throw graph_error("each edge must be a pair");
            edges.emplace_back((int)lookup.index_of(id_string(e[0])),
                               (int)lookup.index_of(id_string(e[1])));
        }
    }
    return PlumbingGraph(std::move(decorations), std::move(edges), std::move(ids));
}

/** @brief Load a graph from disk; .json files use the JSON format. */
inline PlumbingGraph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw graph_error("cannot open graph file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
        return parse_graph_json(buf.str());
    return parse_graph_text(buf.str());
}

/**
 * @brief Dual basis vectors E*_j of a non-degenerate intersection form.
 *
 * Column j of the result holds the coordinates of E*_j in the E-basis:
 * E*_j = -(j-th column of M^{-1}), which satisfies (E*_j, E_i) = -delta_ij.
 * The pairing (E*_i, E*_j) equals (M^{-1})_{ij}.
 *
 * @throws std::domain_error if the form is degenerate.
 */
inline MatQ dual_basis(const IntMat& m) {
    MatQ minv = inverse_q(m);
    const std::size_t n = m.rows();
    MatQ cols(n, std::vector<Rat>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) cols[i][j] = -minv[i][j];
    return cols;
}

/** @brief 64-bit FNV-1a hash of the canonical serialization, as hex. */
inline std::string graph_hash(const PlumbingGraph& g) {
    const std::string bytes = g.serialize_text();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return std::string(buf);
}

}  // namespace latcoh

#endif  // LATCOH_GRAPH_HPP
