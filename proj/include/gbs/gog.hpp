#ifndef GBS_GOG_HPP
#define GBS_GOG_HPP

#include "gbs/errors.hpp"
#include "gbs/lattice.hpp"
#include "gbs/matrix.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace gbs {

// One stored orientation of an edge pair {e, ebar}; the reverse orientation
// swaps m_src/m_trg and the endpoints.
struct GogEdge {
    std::string id;
    std::string src;
    std::string trg;
    IntMatrix m_src;
    IntMatrix m_trg;
};

// An oriented edge of the graph of groups: a stored edge, possibly reversed.
struct OrientedEdge {
    std::string edge_id;
    bool reversed = false;

    bool operator==(const OrientedEdge& o) const {
        return edge_id == o.edge_id && reversed == o.reversed;
    }
    bool operator<(const OrientedEdge& o) const {
        if (edge_id != o.edge_id) return edge_id < o.edge_id;
        return reversed < o.reversed;
    }
    OrientedEdge reverse() const { return OrientedEdge{edge_id, !reversed}; }
    std::string str() const { return reversed ? "~" + edge_id : edge_id; }
};

// Graph of groups of a rank-d GBS group: finite connected oriented graph with
// a d x d integer matrix of nonzero determinant on each half-edge.
class GbsGraph {
  public:
    GbsGraph(std::size_t d, std::vector<std::string> vertices, std::vector<GogEdge> edges)
        : d_(d), vertices_(std::move(vertices)), edges_(std::move(edges)) {
        std::sort(vertices_.begin(), vertices_.end());
        std::sort(edges_.begin(), edges_.end(),
                  [](const GogEdge& a, const GogEdge& b) { return a.id < b.id; });
        for (std::size_t i = 0; i < edges_.size(); ++i) edge_index_[edges_[i].id] = i;
    }

    std::size_t d() const { return d_; }
    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<GogEdge>& edges() const { return edges_; }

    bool has_vertex(const std::string& v) const {
        return std::binary_search(vertices_.begin(), vertices_.end(), v);
    }
    const GogEdge& edge(const std::string& id) const {
        auto it = edge_index_.find(id);
        if (it == edge_index_.end()) throw Error("unknown edge id '" + id + "'");
        return edges_[it->second];
    }

    const std::string& src(const OrientedEdge& e) const {
        const GogEdge& ed = edge(e.edge_id);
        return e.reversed ? ed.trg : ed.src;
    }
    const std::string& trg(const OrientedEdge& e) const {
        const GogEdge& ed = edge(e.edge_id);
        return e.reversed ? ed.src : ed.trg;
    }
    const IntMatrix& m_src(const OrientedEdge& e) const {
        const GogEdge& ed = edge(e.edge_id);
        return e.reversed ? ed.m_trg : ed.m_src;
    }
    const IntMatrix& m_trg(const OrientedEdge& e) const {
        const GogEdge& ed = edge(e.edge_id);
        return e.reversed ? ed.m_src : ed.m_trg;
    }

    // All oriented edges, both orientations, sorted (id, forward-first).
    std::vector<OrientedEdge> oriented_edges() const {
        std::vector<OrientedEdge> out;
        out.reserve(2 * edges_.size());
        for (const GogEdge& e : edges_) {
            out.push_back({e.id, false});
            out.push_back({e.id, true});
        }
        return out;
    }

    // Oriented edges whose source is v, sorted.
    std::vector<OrientedEdge> oriented_out(const std::string& v) const {
        std::vector<OrientedEdge> out;
        for (const GogEdge& e : edges_) {
            if (e.src == v) out.push_back({e.id, false});
            if (e.trg == v) out.push_back({e.id, true});
        }
        return out;
    }

  private:
    std::size_t d_;
    std::vector<std::string> vertices_;
    std::vector<GogEdge> edges_;
    std::map<std::string, std::size_t> edge_index_;
};

inline bool gog_connected(const GbsGraph& g) {
    if (g.vertices().empty()) return false;
    std::set<std::string> seen{g.vertices().front()};
    std::vector<std::string> queue{g.vertices().front()};
    while (!queue.empty()) {
        std::string v = queue.back();
        queue.pop_back();
        for (const GogEdge& e : g.edges()) {
            if (e.src == v && !seen.count(e.trg)) {
                seen.insert(e.trg);
                queue.push_back(e.trg);
            }
            if (e.trg == v && !seen.count(e.src)) {
                seen.insert(e.src);
                queue.push_back(e.src);
            }
        }
    }
    return seen.size() == g.vertices().size();
}

// Structural validation; problems come back as values, not exceptions.
inline std::vector<std::string> validate_gog(const GbsGraph& g) {
    std::vector<std::string> violations;
    if (g.vertices().empty()) violations.push_back("graph has no vertices");
    if (g.d() == 0) violations.push_back("rank d must be positive");
    for (const GogEdge& e : g.edges()) {
        if (!g.has_vertex(e.src))
            violations.push_back("edge '" + e.id + "': unknown src vertex '" + e.src + "'");
        if (!g.has_vertex(e.trg))
            violations.push_back("edge '" + e.id + "': unknown trg vertex '" + e.trg + "'");
        for (const auto& [name, m] : {std::pair{"m_src", &e.m_src}, {"m_trg", &e.m_trg}}) {
            if (m->rows() != g.d() || m->cols() != g.d()) {
                violations.push_back("edge '" + e.id + "': " + name + " is not " +
                                     std::to_string(g.d()) + "x" + std::to_string(g.d()));
            } else if (det(*m) == 0) {
                violations.push_back("edge '" + e.id + "': " + name + " has determinant 0");
            }
        }
    }
    if (!g.vertices().empty() && !gog_connected(g)) violations.push_back("graph is not connected");
    return violations;
}

inline void require_valid(const GbsGraph& g) {
    auto v = validate_gog(g);
    if (!v.empty()) throw Error("invalid graph of groups: " + v.front());
}

// Reduced: the only edges carrying a unimodular label are loops.
inline bool is_reduced(const GbsGraph& g) {
    for (const GogEdge& e : g.edges()) {
        if (e.src == e.trg) continue;
        if (is_unimodular_matrix(e.m_src) || is_unimodular_matrix(e.m_trg)) return false;
    }
    return true;
}

// Iteratively contract non-loop edges with a unimodular label. When edge e
// with m_trg in GL_d(Z) is contracted, trg(e) merges into src(e) and every
// half-edge previously at trg(e) with matrix N is relabeled
// m_src(e) * m_trg(e)^{-1} * N (integral by unimodularity).
inline GbsGraph reduce(const GbsGraph& g) {
    require_valid(g);
    std::vector<std::string> verts = g.vertices();
    std::vector<GogEdge> edges = g.edges();
    while (true) {
        std::size_t pick = edges.size();
        bool flip = false; // true: m_src is the unimodular side, merge src into trg
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (edges[i].src == edges[i].trg) continue;
            if (is_unimodular_matrix(edges[i].m_trg)) {
                pick = i;
                flip = false;
                break;
            }
            if (is_unimodular_matrix(edges[i].m_src)) {
                pick = i;
                flip = true;
                break;
            }
        }
        if (pick == edges.size()) break;
        GogEdge e = edges[pick];
        const std::string keep = flip ? e.trg : e.src;
        const std::string gone = flip ? e.src : e.trg;
        const IntMatrix relabel = flip ? e.m_trg * unimodular_inverse(e.m_src)
                                       : e.m_src * unimodular_inverse(e.m_trg);
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(pick));
        for (GogEdge& f : edges) {
            if (f.src == gone) {
                f.src = keep;
                f.m_src = relabel * f.m_src;
            }
            if (f.trg == gone) {
                f.trg = keep;
                f.m_trg = relabel * f.m_trg;
            }
        }
        verts.erase(std::remove(verts.begin(), verts.end(), gone), verts.end());
    }
    return GbsGraph(g.d(), std::move(verts), std::move(edges));
}

struct AmenableVerdict {
    bool amenable = false;
    std::string reason;
};

// Shape test on a reduced graph: amenable iff a single loop with a unimodular
// label, or a single non-loop edge with both determinants of absolute value 2.
inline AmenableVerdict is_amenable(const GbsGraph& g) {
    require_valid(g);
    if (!is_reduced(g)) throw NotReduced("is_amenable requires a reduced graph");
    if (g.edges().empty())
        return {true, "amenable: no edges, the group is Z^d"};
    if (g.edges().size() == 1) {
        const GogEdge& e = g.edges().front();
        if (e.src == e.trg) {
            if (is_unimodular_matrix(e.m_src) || is_unimodular_matrix(e.m_trg))
                return {true, "amenable: single loop with unimodular label"};
            return {false, "non-amenable: single loop, no unimodular label"};
        }
        if (abs_int(det(e.m_src)) == 2 && abs_int(det(e.m_trg)) == 2)
            return {true, "amenable: single edge with determinant +-2 labels"};
        return {false, "non-amenable: single edge, labels not both of determinant +-2"};
    }
    return {false, "non-amenable: more than one edge pair"};
}

// Single vertex, loops only, all labels unimodular: G = Z^d x| F_r.
inline bool is_semidirect(const GbsGraph& g) {
    if (g.vertices().size() != 1) return false;
    for (const GogEdge& e : g.edges()) {
        if (e.src != e.trg) return false;
        if (!is_unimodular_matrix(e.m_src) || !is_unimodular_matrix(e.m_trg)) return false;
    }
    return true;
}

struct SpanningTree {
    std::vector<std::string> edge_ids; // sorted
    bool contains(const std::string& id) const {
        return std::binary_search(edge_ids.begin(), edge_ids.end(), id);
    }
};

// BFS tree from the lexicographically smallest vertex; ties between edges are
// broken by edge id, so the result is deterministic.
inline SpanningTree spanning_tree(const GbsGraph& g) {
    if (g.vertices().empty()) throw Disconnected("empty graph");
    if (!gog_connected(g)) throw Disconnected("graph is not connected");
    std::set<std::string> seen{g.vertices().front()};
    std::vector<std::string> queue{g.vertices().front()};
    std::vector<std::string> tree;
    std::size_t head = 0;
    while (head < queue.size()) {
        std::string v = queue[head++];
        for (const GogEdge& e : g.edges()) { // edges are sorted by id
            std::string other;
            if (e.src == v)
                other = e.trg;
            else if (e.trg == v)
                other = e.src;
            else
                continue;
            if (seen.count(other)) continue;
            seen.insert(other);
            queue.push_back(other);
            tree.push_back(e.id);
        }
    }
    std::sort(tree.begin(), tree.end());
    return SpanningTree{std::move(tree)};
}

// Unique reduced path in the tree from u to v, as oriented edges.
inline std::vector<OrientedEdge> tree_path(const GbsGraph& g, const SpanningTree& t,
                                           const std::string& u, const std::string& v) {
    if (u == v) return {};
    // BFS inside the tree from u
    std::map<std::string, std::pair<std::string, OrientedEdge>> parent;
    std::vector<std::string> queue{u};
    std::size_t head = 0;
    while (head < queue.size()) {
        std::string x = queue[head++];
        if (x == v) break;
        for (const GogEdge& e : g.edges()) {
            if (!t.contains(e.id)) continue;
            std::string other;
            bool rev;
            if (e.src == x) {
                other = e.trg;
                rev = false;
            } else if (e.trg == x) {
                other = e.src;
                rev = true;
            } else {
                continue;
            }
            if (other == u || parent.count(other)) continue;
            parent[other] = {x, OrientedEdge{e.id, rev}};
            queue.push_back(other);
        }
    }
    if (!parent.count(v)) throw Disconnected("no tree path between vertices");
    std::vector<OrientedEdge> path;
    std::string cur = v;
    while (cur != u) {
        auto& [prev, oe] = parent.at(cur);
        path.push_back(oe);
        cur = prev;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// Exact rational product M_{e_n,trg} M_{e_n,src}^{-1} ... M_{e_1,trg} M_{e_1,src}^{-1}
// along a closed cycle of oriented edges.
inline RatMatrix cycle_modular(const GbsGraph& g, const std::vector<OrientedEdge>& cycle) {
    RatMatrix acc = RatMatrix::identity(g.d());
    if (cycle.empty()) return acc;
    for (std::size_t i = 0; i + 1 < cycle.size(); ++i)
        if (g.trg(cycle[i]) != g.src(cycle[i + 1]))
            throw NotACycle("consecutive edges do not chain");
    if (g.trg(cycle.back()) != g.src(cycle.front()))
        throw NotACycle("edge path is not closed");
    for (const OrientedEdge& e : cycle)
        acc = to_rational(g.m_trg(e)) * rat_inverse(g.m_src(e)) * acc;
    return acc;
}

// Generators of the image of the modular homomorphism based at v: one per
// non-tree edge e, from the cycle [tree path v->src(e)] + e + [tree path
// trg(e)->v]. Each generator is normalized to |det| >= 1 (a generating set is
// only defined up to inversion, and this choice is tree-independent).
inline std::vector<RatMatrix> modular_generators(const GbsGraph& g, const std::string& v) {
    require_valid(g);
    if (!g.has_vertex(v)) throw Error("unknown base vertex '" + v + "'");
    SpanningTree t = spanning_tree(g);
    std::vector<RatMatrix> gens;
    for (const GogEdge& e : g.edges()) {
        if (t.contains(e.id)) continue;
        std::vector<OrientedEdge> cycle = tree_path(g, t, v, e.src);
        cycle.push_back(OrientedEdge{e.id, false});
        auto back = tree_path(g, t, e.trg, v);
        cycle.insert(cycle.end(), back.begin(), back.end());
        RatMatrix m = cycle_modular(g, cycle);
        Rat dm = det(m);
        if (abs_int(rat_num(dm)) < abs_int(rat_den(dm))) m = rat_inverse(m);
        gens.push_back(std::move(m));
    }
    return gens;
}

// Unimodular iff |det| = 1 for every modular generator.
inline bool is_unimodular(const GbsGraph& g) {
    require_valid(g);
    for (const RatMatrix& m : modular_generators(g, g.vertices().front())) {
        Rat d = det(m);
        if (!(d == 1 || d == -1)) return false;
    }
    return true;
}

} // namespace gbs

#endif // GBS_GOG_HPP
