#ifndef GBS_JSON_IO_HPP
#define GBS_JSON_IO_HPP

#include "gbs/errors.hpp"
#include "gbs/gog.hpp"
#include "gbs/hgraph.hpp"
#include "gbs/lattice.hpp"
#include "gbs/matrix.hpp"
#include "gbs/phenotype.hpp"
#include "gbs/semidirect.hpp"

#include <json.hpp>

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace gbs {

using Json = nlohmann::json;

// Input problem (malformed JSON, missing field, bad entry); exit code 65.
struct ParseError : Error {
    using Error::Error;
};

inline Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // report 1-based line/column from the byte offset
        std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < off && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(origin + ": malformed JSON at line " + std::to_string(line) +
                         ", column " + std::to_string(col));
    }
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path);
}

namespace io_detail {
inline Int entry_to_int(const Json& j, const std::string& where) {
    try {
        if (j.is_string()) return parse_int(j.get<std::string>());
        if (j.is_number_integer()) return Int(j.get<long long>());
    } catch (const std::exception&) {
    }
    throw ParseError(where + ": expected an integer (number or decimal string)");
}

inline Rat entry_to_rat(const Json& j, const std::string& where) {
    try {
        if (j.is_string()) return parse_rat(j.get<std::string>());
        if (j.is_number_integer()) return Rat(Int(j.get<long long>()));
    } catch (const std::exception&) {
    }
    throw ParseError(where + ": expected a rational (\"p/q\" or integer)");
}
} // namespace io_detail

// Matrices travel as arrays of row arrays of decimal strings.
inline Json to_json(const IntMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json to_json(const RatMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(rat_to_string(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline IntMatrix int_matrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of rows");
    std::size_t rows = j.size();
    std::size_t cols = rows == 0 ? 0 : 0;
    if (rows > 0) {
        if (!j[0].is_array()) throw ParseError(where + ": expected rows to be arrays");
        cols = j[0].size();
    }
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ParseError(where + ": ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(i, c) = io_detail::entry_to_int(j[i][c], where);
    }
    return m;
}

// Lattices travel as {"dim": d, "basis": [column, ...]}; canonicalized on load.
inline Json to_json(const Lattice& l) {
    Json cols = Json::array();
    for (std::size_t j = 0; j < l.rank(); ++j) {
        Json col = Json::array();
        for (std::size_t i = 0; i < l.dim(); ++i) col.push_back(l.basis()(i, j).str());
        cols.push_back(std::move(col));
    }
    return Json{{"dim", l.dim()}, {"basis", std::move(cols)}};
}

inline Lattice lattice_from_json(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("basis"))
        throw ParseError(where + ": expected {\"dim\", \"basis\"}");
    if (!j["dim"].is_number_unsigned() || !j["basis"].is_array())
        throw ParseError(where + ": bad lattice fields");
    std::size_t d = j["dim"].get<std::size_t>();
    std::vector<std::vector<Int>> cols;
    for (const Json& cj : j["basis"]) {
        if (!cj.is_array() || cj.size() != d)
            throw ParseError(where + ": basis column of wrong length");
        std::vector<Int> col;
        for (const Json& e : cj) col.push_back(io_detail::entry_to_int(e, where));
        cols.push_back(std::move(col));
    }
    return Lattice::from_generators(d, cols);
}

// A basis matrix (rows form, as on the CLI) read as a lattice of dimension d.
inline Lattice lattice_from_basis_json(const Json& j, std::size_t d, const std::string& where) {
    IntMatrix m = int_matrix_from_json(j, where);
    if (m.rows() == 0 && m.cols() == 0) return Lattice::zero(d);
    if (m.rows() != d) throw ParseError(where + ": basis matrix must have d rows");
    return Lattice::from_generators(d, m);
}

inline Json to_json(const GbsGraph& g) {
    Json verts = Json::array();
    for (const std::string& v : g.vertices()) verts.push_back(v);
    Json edges = Json::array();
    for (const GogEdge& e : g.edges())
        edges.push_back(Json{{"id", e.id},
                             {"src", e.src},
                             {"trg", e.trg},
                             {"m_src", to_json(e.m_src)},
                             {"m_trg", to_json(e.m_trg)}});
    return Json{{"d", g.d()}, {"vertices", std::move(verts)}, {"edges", std::move(edges)}};
}

inline std::shared_ptr<const GbsGraph> gog_from_json(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("d") || !j.contains("vertices") || !j.contains("edges"))
        throw ParseError(where + ": expected {\"d\", \"vertices\", \"edges\"}");
    if (!j["d"].is_number_unsigned()) throw ParseError(where + ": d must be a count");
    std::size_t d = j["d"].get<std::size_t>();
    std::vector<std::string> verts;
    for (const Json& v : j["vertices"]) {
        if (!v.is_string()) throw ParseError(where + ": vertex ids must be strings");
        verts.push_back(v.get<std::string>());
    }
    std::vector<GogEdge> edges;
    for (const Json& e : j["edges"]) {
        for (const char* k : {"id", "src", "trg", "m_src", "m_trg"})
            if (!e.contains(k)) throw ParseError(where + ": edge missing field '" + k + "'");
        edges.push_back({e["id"].get<std::string>(), e["src"].get<std::string>(),
                         e["trg"].get<std::string>(),
                         int_matrix_from_json(e["m_src"], where + ": m_src"),
                         int_matrix_from_json(e["m_trg"], where + ": m_trg")});
    }
    return std::make_shared<GbsGraph>(d, std::move(verts), std::move(edges));
}

inline Json to_json(const HGraph& hg, const std::string& base = "") {
    Json verts = Json::array();
    for (const HVertex& v : hg.vertices())
        verts.push_back(Json{{"id", v.id}, {"site", v.site}, {"label", to_json(v.label)}});
    Json edges = Json::array();
    for (const HEdge& e : hg.edges())
        edges.push_back(Json{{"id", e.id}, {"type", e.type}, {"src", e.src}, {"trg", e.trg}});
    Json out{{"gog", to_json(hg.gog())},
             {"vertices", std::move(verts)},
             {"edges", std::move(edges)}};
    if (!base.empty()) out["base"] = base;
    return out;
}

// "gog" may be inline or a file path string; relative paths resolve against
// base_dir (the directory of the referencing file).
inline HGraph hgraph_from_json(const Json& j, const std::string& where,
                               const std::string& base_dir = "") {
    if (!j.is_object() || !j.contains("gog") || !j.contains("vertices") || !j.contains("edges"))
        throw ParseError(where + ": expected {\"gog\", \"vertices\", \"edges\"}");
    std::shared_ptr<const GbsGraph> gog;
    if (j["gog"].is_string()) {
        std::string path = j["gog"].get<std::string>();
        if (!base_dir.empty() && !path.empty() && path.front() != '/')
            path = base_dir + "/" + path;
        gog = gog_from_json(load_json_file(path), path);
    } else {
        gog = gog_from_json(j["gog"], where + ": gog");
    }
    std::vector<HVertex> vs;
    for (const Json& v : j["vertices"]) {
        for (const char* k : {"id", "site", "label"})
            if (!v.contains(k)) throw ParseError(where + ": vertex missing field '" + k + "'");
        vs.push_back({v["id"].get<std::string>(), v["site"].get<std::string>(),
                      lattice_from_json(v["label"], where + ": label")});
    }
    std::vector<HEdge> es;
    for (const Json& e : j["edges"]) {
        for (const char* k : {"id", "type", "src", "trg"})
            if (!e.contains(k)) throw ParseError(where + ": edge missing field '" + k + "'");
        es.push_back({e["id"].get<std::string>(), e["type"].get<std::string>(),
                      e["src"].get<std::string>(), e["trg"].get<std::string>()});
    }
    return HGraph(std::move(gog), std::move(vs), std::move(es));
}

inline std::string hgraph_base_from_json(const Json& j) {
    return j.is_object() && j.contains("base") ? j["base"].get<std::string>() : std::string{};
}

inline Json to_json(const RoseRep& rose) {
    Json mats = Json::array();
    for (const IntMatrix& m : rose.mats) mats.push_back(to_json(m));
    return Json{{"d", rose.d}, {"mats", std::move(mats)}};
}

inline RoseRep rose_from_json(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("d") || !j.contains("mats"))
        throw ParseError(where + ": expected {\"d\", \"mats\"}");
    if (!j["d"].is_number_unsigned()) throw ParseError(where + ": d must be a count");
    RoseRep rose;
    rose.d = j["d"].get<std::size_t>();
    for (const Json& m : j["mats"])
        rose.mats.push_back(int_matrix_from_json(m, where + ": mats"));
    validate_rose(rose);
    return rose;
}

inline Json to_json(const StallingsGraph& g) {
    Json edges = Json::array();
    for (std::size_t i = 0; i < g.r; ++i)
        for (std::size_t v = 0; v < g.size(); ++v)
            if (g.out[i][v] != StallingsGraph::npos)
                edges.push_back(
                    Json{{"src", v}, {"gen", i + 1}, {"trg", g.out[i][v]}});
    return Json{{"r", g.r}, {"base", g.base}, {"num_vertices", g.size()}, {"edges", edges}};
}

inline Json to_json(const SubgroupRep& rep) {
    Json words = Json::array();
    for (const FreeWord& w : rep.core_words) words.push_back(w.str());
    Json lifts = Json::array();
    for (const auto& u : rep.lifts) {
        Json v = Json::array();
        for (const Int& x : u) v.push_back(x.str());
        lifts.push_back(std::move(v));
    }
    return Json{{"lattice", to_json(rep.lattice)},
                {"core_words", std::move(words)},
                {"lifts", std::move(lifts)},
                {"core", to_json(rep.core)}};
}

inline SubgroupRep rep_from_json(const Json& j, std::size_t r, const std::string& where) {
    if (!j.is_object() || !j.contains("lattice") || !j.contains("core_words"))
        throw ParseError(where + ": expected {\"lattice\", \"core_words\", [\"lifts\"]}");
    Lattice l = lattice_from_json(j["lattice"], where + ": lattice");
    std::vector<FreeWord> words;
    for (const Json& w : j["core_words"]) {
        if (!w.is_string()) throw ParseError(where + ": core words must be strings");
        try {
            words.push_back(FreeWord::parse(w.get<std::string>()));
        } catch (const Error& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    std::vector<std::vector<Int>> lifts;
    if (j.contains("lifts")) {
        for (const Json& u : j["lifts"]) {
            if (!u.is_array()) throw ParseError(where + ": lifts must be arrays");
            std::vector<Int> v;
            for (const Json& x : u) v.push_back(io_detail::entry_to_int(x, where + ": lifts"));
            lifts.push_back(std::move(v));
        }
    }
    return SubgroupRep(std::move(l), std::move(words), std::move(lifts), r);
}

inline Json to_json(const PhenotypeReport& r) {
    Json orbit = Json::array();
    for (const Lattice& l : r.span_orbit.classes) orbit.push_back(to_json(l));
    return Json{{"site", r.site},
                {"rank", r.rank},
                {"delta", r.delta ? Json(r.delta->str()) : Json("undefined")},
                {"span_orbit_sample", std::move(orbit)},
                {"span_orbit_closed", r.span_orbit.closed}};
}

// Stable, reproducible rendering (nlohmann::json keeps keys sorted).
inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

} // namespace gbs

#endif // GBS_JSON_IO_HPP
