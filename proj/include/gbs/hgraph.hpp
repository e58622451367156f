#ifndef GBS_HGRAPH_HPP
#define GBS_HGRAPH_HPP

#include "gbs/errors.hpp"
#include "gbs/gog.hpp"
#include "gbs/lattice.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gbs {

// Transfer Equation across an oriented edge:
//   m_src(e)^{-1} L0 cap Z^d  =  m_trg(e)^{-1} L1 cap Z^d.
inline bool check_transfer(const GbsGraph& g, const OrientedEdge& e, const Lattice& l0,
                           const Lattice& l1) {
    if (l0.dim() != g.d() || l1.dim() != g.d())
        throw DimensionMismatch("transfer labels must live in Z^d");
    return preimage(g.m_src(e), l0) == preimage(g.m_trg(e), l1);
}

// Minimal label L1 with check_transfer(e, L0, L1): m_trg(e) * (m_src(e)^{-1} L0 cap Z^d).
inline Lattice propagate_label(const GbsGraph& g, const OrientedEdge& e, const Lattice& l0) {
    return image(g.m_trg(e), preimage(g.m_src(e), l0));
}

struct HVertex {
    std::string id;
    std::string site;
    Lattice label;
};

// Stored in the forward orientation of its type; the same edge read backwards
// has type ~e.
struct HEdge {
    std::string id;
    std::string type; // gog edge id
    std::string src;
    std::string trg;
};

class HGraph {
  public:
    HGraph(std::shared_ptr<const GbsGraph> gog, std::vector<HVertex> vertices,
           std::vector<HEdge> edges)
        : gog_(std::move(gog)), vertices_(std::move(vertices)), edges_(std::move(edges)) {
        sort_members();
    }

    const GbsGraph& gog() const { return *gog_; }
    std::shared_ptr<const GbsGraph> gog_ptr() const { return gog_; }
    const std::vector<HVertex>& vertices() const { return vertices_; }
    const std::vector<HEdge>& edges() const { return edges_; }

    bool has_vertex(const std::string& id) const { return index_.count(id) != 0; }
    const HVertex& vertex(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw Error("unknown H-graph vertex '" + id + "'");
        return vertices_[it->second];
    }

    // Degree of vertex v in the out (resp. in) direction of stored type t.
    std::size_t degree(const std::string& v, const std::string& type, bool incoming) const {
        std::size_t n = 0;
        for (const HEdge& e : edges_)
            if (e.type == type && (incoming ? e.trg : e.src) == v) ++n;
        return n;
    }

    // Degree in the slot of an oriented edge t out of site(v): forward types
    // count outgoing stored edges, reversed types count incoming ones.
    std::size_t slot_degree(const std::string& v, const OrientedEdge& t) const {
        return degree(v, t.edge_id, t.reversed);
    }

    // Slot usage map of one vertex: oriented type -> count.
    std::map<OrientedEdge, std::size_t> used_slots(const std::string& v) const {
        std::map<OrientedEdge, std::size_t> used;
        for (const HEdge& e : edges_) {
            if (e.src == v) ++used[OrientedEdge{e.type, false}];
            if (e.trg == v) ++used[OrientedEdge{e.type, true}];
        }
        return used;
    }

    bool connected() const {
        if (vertices_.empty()) return true;
        std::set<std::string> seen{vertices_.front().id};
        std::vector<std::string> queue{vertices_.front().id};
        std::size_t head = 0;
        while (head < queue.size()) {
            std::string x = queue[head++];
            for (const HEdge& e : edges_) {
                std::string other;
                if (e.src == x)
                    other = e.trg;
                else if (e.trg == x)
                    other = e.src;
                else
                    continue;
                if (seen.insert(other).second) queue.push_back(other);
            }
        }
        return seen.size() == vertices_.size();
    }

    // First Betti number |E| - |V| + #components.
    std::size_t betti() const {
        std::map<std::string, std::string> root;
        for (const HVertex& v : vertices_) root[v.id] = v.id;
        auto find = [&](std::string x) {
            while (root[x] != x) x = root[x];
            return x;
        };
        std::size_t comps = vertices_.size();
        for (const HEdge& e : edges_) {
            std::string a = find(e.src), b = find(e.trg);
            if (a != b) {
                root[a] = b;
                --comps;
            }
        }
        return edges_.size() + comps - vertices_.size();
    }

  private:
    void sort_members() {
        std::sort(vertices_.begin(), vertices_.end(),
                  [](const HVertex& a, const HVertex& b) { return a.id < b.id; });
        std::sort(edges_.begin(), edges_.end(),
                  [](const HEdge& a, const HEdge& b) { return a.id < b.id; });
        index_.clear();
        for (std::size_t i = 0; i < vertices_.size(); ++i) index_[vertices_[i].id] = i;
    }

    std::shared_ptr<const GbsGraph> gog_;
    std::vector<HVertex> vertices_;
    std::vector<HEdge> edges_;
    std::map<std::string, std::size_t> index_;
};

struct PointedHGraph {
    HGraph graph;
    std::string base;
};

// The saturated H-graph of the whole group: one vertex per site labeled Z^d,
// one edge per edge of the graph of groups.
inline HGraph whole_group_hgraph(std::shared_ptr<const GbsGraph> gog) {
    std::vector<HVertex> vs;
    for (const std::string& v : gog->vertices())
        vs.push_back({v, v, Lattice::full(gog->d())});
    std::vector<HEdge> es;
    for (const GogEdge& e : gog->edges()) es.push_back({e.id, e.id, e.src, e.trg});
    return HGraph(std::move(gog), std::move(vs), std::move(es));
}

// Multiplicity bound of the slot of an oriented edge t at a vertex labeled
// `label`: |Z^d / <label, m_src(t) Z^d>|.
inline Int slot_bound(const GbsGraph& g, const Lattice& label, const OrientedEdge& t) {
    return join_index(label, g.m_src(t)).value();
}

inline std::vector<std::string> validate_hgraph(const HGraph& hg) {
    std::vector<std::string> violations;
    const GbsGraph& g = hg.gog();
    std::set<std::string> vertex_ids, edge_ids;
    for (const HVertex& v : hg.vertices()) {
        if (!vertex_ids.insert(v.id).second)
            violations.push_back("duplicate vertex id '" + v.id + "'");
        if (!g.has_vertex(v.site))
            violations.push_back("vertex '" + v.id + "': unknown site '" + v.site + "'");
        if (v.label.dim() != g.d())
            violations.push_back("vertex '" + v.id + "': label dimension != d");
    }
    for (const HEdge& e : hg.edges()) {
        if (!edge_ids.insert(e.id).second)
            violations.push_back("duplicate edge id '" + e.id + "'");
        bool known_type = true;
        try {
            g.edge(e.type);
        } catch (const Error&) {
            known_type = false;
            violations.push_back("edge '" + e.id + "': unknown type '" + e.type + "'");
        }
        if (!hg.has_vertex(e.src) || !hg.has_vertex(e.trg)) {
            violations.push_back("edge '" + e.id + "': dangling endpoint");
            continue;
        }
        if (!known_type) continue;
        const GogEdge& t = g.edge(e.type);
        const HVertex& s = hg.vertex(e.src);
        const HVertex& r = hg.vertex(e.trg);
        if (s.site != t.src || r.site != t.trg) {
            violations.push_back("edge '" + e.id + "': sites do not match type '" + e.type + "'");
            continue;
        }
        if (s.label.dim() != g.d() || r.label.dim() != g.d()) continue;
        if (!check_transfer(g, {e.type, false}, s.label, r.label))
            violations.push_back("edge '" + e.id + "': transfer equation fails");
    }
    if (violations.empty()) {
        for (const HVertex& v : hg.vertices()) {
            for (const OrientedEdge& t : g.oriented_out(v.site)) {
                Int bound = slot_bound(g, v.label, t);
                std::size_t used = hg.slot_degree(v.id, t);
                if (Int(used) > bound)
                    violations.push_back("vertex '" + v.id +
                                         "': multiplicity bound exceeded for '" + t.str() + "' (" +
                                         std::to_string(used) + " > " + bound.str() + ")");
            }
        }
    }
    return violations;
}

inline void require_valid(const HGraph& hg) {
    auto v = validate_hgraph(hg);
    if (!v.empty()) throw InvalidHGraph("invalid H-graph: " + v.front());
}

struct Deficiency {
    std::string vertex;
    OrientedEdge type;
    Int residual;
};

namespace detail {
inline std::vector<Deficiency> deficiencies_unchecked(const HGraph& hg) {
    std::vector<Deficiency> out;
    const GbsGraph& g = hg.gog();
    for (const HVertex& v : hg.vertices()) {
        for (const OrientedEdge& t : g.oriented_out(v.site)) {
            Int residual = slot_bound(g, v.label, t) - Int(hg.slot_degree(v.id, t));
            if (residual > 0) out.push_back({v.id, t, residual});
        }
    }
    return out;
}
} // namespace detail

inline std::vector<Deficiency> deficiencies(const HGraph& hg) {
    require_valid(hg);
    return detail::deficiencies_unchecked(hg);
}

inline bool is_saturated(const HGraph& hg) {
    require_valid(hg);
    return detail::deficiencies_unchecked(hg).empty();
}

struct NewVertexTag {};

// Add one type-e edge from V to W (or to a fresh vertex labeled by canonical
// propagation). V must have spare multiplicity for e; a given W must have
// spare multiplicity for ~e and satisfy the Transfer Equation.
inline HGraph attach_edge(const HGraph& hg, const std::string& v, const OrientedEdge& e,
                          const std::variant<std::string, NewVertexTag>& target) {
    require_valid(hg);
    const GbsGraph& g = hg.gog();
    const HVertex& vv = hg.vertex(v);
    if (g.src(e) != vv.site) throw Error("oriented edge does not start at the vertex's site");
    if (Int(hg.slot_degree(v, e)) >= slot_bound(g, vv.label, e))
        throw SaturationBound("vertex '" + v + "' is saturated for '" + e.str() + "'");

    std::vector<HVertex> vs = hg.vertices();
    std::vector<HEdge> es = hg.edges();
    std::set<std::string> vertex_ids, edge_ids;
    for (const HVertex& x : vs) vertex_ids.insert(x.id);
    for (const HEdge& x : es) edge_ids.insert(x.id);
    auto fresh = [](std::set<std::string>& pool, const std::string& stem) {
        for (std::size_t i = 0;; ++i) {
            std::string c = stem + std::to_string(i);
            if (pool.insert(c).second) return c;
        }
    };

    std::string w;
    if (std::holds_alternative<std::string>(target)) {
        w = std::get<std::string>(target);
        const HVertex& wv = hg.vertex(w);
        if (g.trg(e) != wv.site) throw Error("target vertex is at the wrong site");
        if (Int(hg.slot_degree(w, e.reverse())) >= slot_bound(g, wv.label, e.reverse()))
            throw SaturationBound("vertex '" + w + "' is saturated for '" + e.reverse().str() +
                                  "'");
        if (!check_transfer(g, e, vv.label, wv.label))
            throw TransferViolation("labels of '" + v + "' and '" + w +
                                    "' violate the transfer equation across '" + e.str() + "'");
    } else {
        w = fresh(vertex_ids, "n");
        vs.push_back({w, g.trg(e), propagate_label(g, e, vv.label)});
    }
    std::string eid = fresh(edge_ids, "a");
    if (e.reversed)
        es.push_back({eid, e.edge_id, w, v});
    else
        es.push_back({eid, e.edge_id, v, w});
    return HGraph(hg.gog_ptr(), std::move(vs), std::move(es));
}

namespace detail {
struct GrowthStep {
    HGraph graph;
    std::vector<std::string> new_vertices;
};

// One breadth-first saturation level: fill every open slot of the listed
// vertices with fresh leaves labeled by canonical propagation.
inline GrowthStep saturate_level(const HGraph& hg, const std::vector<std::string>& frontier,
                                 std::size_t& vertex_counter, std::size_t& edge_counter) {
    const GbsGraph& g = hg.gog();
    std::vector<HVertex> vs = hg.vertices();
    std::vector<HEdge> es = hg.edges();
    std::vector<std::string> added;
    for (const std::string& vid : frontier) {
        const HVertex& v = hg.vertex(vid);
        for (const OrientedEdge& t : g.oriented_out(v.site)) {
            Int residual = slot_bound(g, v.label, t) - Int(hg.slot_degree(vid, t));
            for (Int k = 0; k < residual; ++k) {
                std::string w = "s" + std::to_string(vertex_counter++);
                vs.push_back({w, g.trg(t), propagate_label(g, t, v.label)});
                std::string eid = "se" + std::to_string(edge_counter++);
                if (t.reversed)
                    es.push_back({eid, t.edge_id, w, vid});
                else
                    es.push_back({eid, t.edge_id, vid, w});
                added.push_back(w);
            }
        }
    }
    return {HGraph(hg.gog_ptr(), std::move(vs), std::move(es)), std::move(added)};
}
} // namespace detail

// Breadth-first saturation to the given depth. Only fresh leaves are ever
// added, so the input stays an induced labeled subgraph and the quotient of
// the output by the input is a forest.
inline HGraph saturate(const HGraph& hg, std::size_t depth) {
    require_valid(hg);
    HGraph cur = hg;
    std::vector<std::string> frontier;
    for (const HVertex& v : hg.vertices()) frontier.push_back(v.id);
    std::size_t vc = 0, ec = 0;
    for (std::size_t level = 0; level < depth && !frontier.empty(); ++level) {
        detail::GrowthStep step = detail::saturate_level(cur, frontier, vc, ec);
        cur = std::move(step.graph);
        frontier = std::move(step.new_vertices);
    }
    return cur;
}

struct CloseResult {
    // Finite: saturation closed with no deficiencies; the represented
    // subgroup has a finite Bass-Serre quotient, hence is NOT in the perfect
    // kernel. NotClosed: budget exhausted, a semi-decision only.
    enum class Status { Finite, NotClosed } status;
    HGraph graph;
    std::vector<std::size_t> frontier_sizes; // new vertices per completed depth
};

inline CloseResult close_or_grow(const HGraph& hg, std::size_t depth_budget,
                                 std::size_t max_vertices = 0) {
    require_valid(hg);
    HGraph cur = hg;
    std::vector<std::string> frontier;
    for (const HVertex& v : hg.vertices()) frontier.push_back(v.id);
    std::size_t vc = 0, ec = 0;
    std::vector<std::size_t> sizes;
    for (std::size_t level = 0; level < depth_budget; ++level) {
        if (detail::deficiencies_unchecked(cur).empty())
            return {CloseResult::Status::Finite, cur, sizes};
        detail::GrowthStep step = detail::saturate_level(cur, frontier, vc, ec);
        cur = std::move(step.graph);
        frontier = std::move(step.new_vertices);
        sizes.push_back(frontier.size());
        if (max_vertices != 0 && cur.vertices().size() > max_vertices) break;
    }
    if (detail::deficiencies_unchecked(cur).empty())
        return {CloseResult::Status::Finite, cur, sizes};
    return {CloseResult::Status::NotClosed, cur, sizes};
}

// ---------------------------------------------------------------------------
// Bounded path search over (site, label) states.
//
// Moves are the canonical propagation along every oriented edge type, plus
// transitions to explicitly supplied candidate labels filtered by the
// Transfer Equation. A path of fresh vertices can only violate multiplicity
// bounds where two consecutive steps t, reverse(t) share one slot of the
// middle vertex, or at its two ends, so those checks ride along with the
// search and every returned path materializes into a valid H-graph.
// ---------------------------------------------------------------------------

struct PathQuery {
    std::string start_site;
    Lattice start_label = Lattice(0);
    std::string goal_site;
    Lattice goal_label = Lattice(0);
    std::size_t max_depth = 8;
    std::size_t max_states = 10000;
    // slots already used at the start / goal vertices by existing edges
    std::map<OrientedEdge, std::size_t> start_used;
    std::map<OrientedEdge, std::size_t> goal_used;
    std::optional<OrientedEdge> forced_first;
    std::optional<OrientedEdge> forced_last;
    bool allow_empty = true;
    std::vector<Lattice> candidates;
};

struct PathStep {
    OrientedEdge step;
    Lattice label; // label of the vertex the step lands on
};

namespace detail {

struct SearchState {
    std::string site;
    Lattice label;
    std::optional<OrientedEdge> last; // nullopt only for the start state
    bool operator<(const SearchState& o) const {
        if (site != o.site) return site < o.site;
        if (label != o.label) return label < o.label;
        return last < o.last;
    }
};

inline std::optional<std::vector<PathStep>> constrained_path_search(const GbsGraph& g,
                                                                    const PathQuery& q) {
    if (q.allow_empty && !q.forced_first && !q.forced_last && q.start_site == q.goal_site &&
        q.start_label == q.goal_label)
        return std::vector<PathStep>{};

    std::vector<Lattice> candidates = q.candidates;
    candidates.push_back(q.goal_label);

    auto used_in = [](const std::map<OrientedEdge, std::size_t>& m, const OrientedEdge& s) {
        auto it = m.find(s);
        return it == m.end() ? std::size_t(0) : it->second;
    };

    SearchState start{q.start_site, q.start_label, std::nullopt};
    std::map<SearchState, std::pair<SearchState, OrientedEdge>> parent;
    std::set<SearchState> seen{start};
    std::vector<SearchState> frontier{start};

    auto reconstruct = [&](SearchState s) {
        std::vector<PathStep> steps;
        for (auto it = parent.find(s); it != parent.end(); it = parent.find(s)) {
            steps.push_back({it->second.second, s.label});
            s = it->second.first;
        }
        std::reverse(steps.begin(), steps.end());
        return steps;
    };

    auto is_goal = [&](const SearchState& s, const OrientedEdge& arriving) {
        if (s.site != q.goal_site || s.label != q.goal_label) return false;
        if (q.forced_last && !(arriving == *q.forced_last)) return false;
        // arrival occupies slot reverse(arriving) at the goal vertex
        OrientedEdge slot = arriving.reverse();
        return Int(used_in(q.goal_used, slot) + 1) <= slot_bound(g, s.label, slot);
    };

    for (std::size_t depth = 0; depth < q.max_depth && !frontier.empty(); ++depth) {
        std::vector<SearchState> next;
        for (const SearchState& cur : frontier) {
            const bool at_start = !cur.last.has_value();
            for (const OrientedEdge& t : g.oriented_out(cur.site)) {
                if (at_start && q.forced_first && !(t == *q.forced_first)) continue;
                // multiplicity in slot t at the current vertex: existing edges
                // (start only), plus the incoming step if it shares the slot
                std::size_t needed = 1 + (at_start ? used_in(q.start_used, t) : 0);
                if (cur.last && t == cur.last->reverse()) ++needed;
                if (Int(needed) > slot_bound(g, cur.label, t)) continue;
                std::vector<Lattice> targets{propagate_label(g, t, cur.label)};
                for (const Lattice& c : candidates) {
                    if (c == targets.front() || c.dim() != g.d()) continue;
                    if (check_transfer(g, t, cur.label, c)) targets.push_back(c);
                }
                for (const Lattice& lab : targets) {
                    SearchState ns{g.trg(t), lab, t};
                    if (!seen.insert(ns).second) continue;
                    parent.emplace(ns, std::make_pair(cur, t));
                    if (is_goal(ns, t)) return reconstruct(ns);
                    next.push_back(ns);
                    if (seen.size() > q.max_states) return std::nullopt;
                }
            }
        }
        frontier = std::move(next);
    }
    return std::nullopt;
}

} // namespace detail

struct WitnessPath {
    HGraph graph;     // a path-shaped valid H-graph
    std::string from; // vertex labeled (L0, v)
    std::string to;   // vertex labeled (L1, v)
    std::vector<PathStep> steps;
};

// Materialize a step sequence from (site, L0) as a fresh path graph p000 - p001 - ...
inline WitnessPath materialize_path(std::shared_ptr<const GbsGraph> gog, const std::string& site,
                                    const Lattice& l0, const std::vector<PathStep>& steps) {
    const GbsGraph& g = *gog;
    auto pad = [](std::size_t i) {
        std::string s = std::to_string(i);
        return std::string(s.size() >= 3 ? 0 : 3 - s.size(), '0') + s;
    };
    std::vector<HVertex> vs{{"p" + pad(0), site, l0}};
    std::vector<HEdge> es;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const OrientedEdge& t = steps[i].step;
        std::string a = "p" + pad(i), b = "p" + pad(i + 1);
        vs.push_back({b, g.trg(t), steps[i].label});
        if (t.reversed)
            es.push_back({"q" + pad(i), t.edge_id, b, a});
        else
            es.push_back({"q" + pad(i), t.edge_id, a, b});
    }
    std::string last = "p" + pad(steps.size());
    return {HGraph(std::move(gog), std::move(vs), std::move(es)), "p" + pad(0), last, steps};
}

// Bounded search for an H-path whose endpoints are labeled (L0, v) and
// (L1, v). NotFound (nullopt) is never a proof of inequivalence.
inline std::optional<WitnessPath> find_equiv_path(std::shared_ptr<const GbsGraph> gog,
                                                  const std::string& v, const Lattice& l0,
                                                  const Lattice& l1, std::size_t depth,
                                                  std::vector<Lattice> candidates = {},
                                                  std::size_t max_states = 10000) {
    const GbsGraph& g = *gog;
    if (!g.has_vertex(v)) throw Error("unknown base vertex '" + v + "'");
    if (l0.dim() != g.d() || l1.dim() != g.d())
        throw DimensionMismatch("labels must live in Z^d");
    PathQuery q;
    q.start_site = v;
    q.start_label = l0;
    q.goal_site = v;
    q.goal_label = l1;
    q.max_depth = depth;
    q.max_states = max_states;
    q.candidates = std::move(candidates);
    auto steps = detail::constrained_path_search(g, q);
    if (!steps) return std::nullopt;
    WitnessPath w = materialize_path(gog, v, l0, *steps);
    require_valid(w.graph);
    return w;
}

// Finite non-simply-connected H-graph containing a vertex labeled (L0, v)
// and at least two vertices with spare multiplicity.
inline HGraph build_cycle_witness(std::shared_ptr<const GbsGraph> gog, const std::string& v,
                                  const Lattice& l0, std::size_t depth = 8) {
    const GbsGraph& g = *gog;
    require_valid(g);
    if (!g.has_vertex(v)) throw Error("unknown base vertex '" + v + "'");
    if (!is_reduced(g)) throw NotReduced("cycle witness requires a reduced graph");
    if (is_amenable(g).amenable)
        throw UnsupportedShape("cycle witness requires a non-amenable group");
    if (is_semidirect(g))
        throw UnsupportedShape("cycle witness requires a non-semidirect group");
    if (l0.dim() != g.d()) throw DimensionMismatch("label must live in Z^d");

    // prefer a loop based at v (Case 1); otherwise any edge out of v (Case 2)
    std::vector<OrientedEdge> outs = g.oriented_out(v);
    if (outs.empty()) throw InternalError("connected graph with an isolated vertex");
    OrientedEdge e0 = outs.front();
    for (const OrientedEdge& t : outs)
        if (g.trg(t) == v) {
            e0 = t;
            break;
        }
    const bool loop = g.trg(e0) == v;

    std::vector<HVertex> vs;
    std::vector<HEdge> es;
    std::string va, vc; // cycle gets closed from vc back onto va
    Lattice va_label(g.d()), vc_label(g.d());

    if (loop) {
        // spine: V_a(before) -e0-> V_b(l0) -e0-> V_c(after)
        Lattice before = propagate_label(g, e0.reverse(), l0);
        Lattice after = propagate_label(g, e0, l0);
        if (after == before) {
            // 2-cycle through (l0, v)
            std::vector<HVertex> vs2{{"c0", v, before}, {"c1", v, l0}};
            std::vector<HEdge> es2;
            if (e0.reversed) {
                es2.push_back({"ce0", e0.edge_id, "c1", "c0"});
                es2.push_back({"ce1", e0.edge_id, "c0", "c1"});
            } else {
                es2.push_back({"ce0", e0.edge_id, "c0", "c1"});
                es2.push_back({"ce1", e0.edge_id, "c1", "c0"});
            }
            HGraph cand(gog, std::move(vs2), std::move(es2));
            if (validate_hgraph(cand).empty() && detail::deficiencies_unchecked(cand).size() >= 2)
                return cand;
        }
        va = "c0";
        vc = "c2";
        va_label = before;
        vc_label = after;
        vs = {{"c0", v, before}, {"c1", v, l0}, {"c2", v, after}};
        if (e0.reversed) {
            es.push_back({"ce0", e0.edge_id, "c1", "c0"});
            es.push_back({"ce1", e0.edge_id, "c2", "c1"});
        } else {
            es.push_back({"ce0", e0.edge_id, "c0", "c1"});
            es.push_back({"ce1", e0.edge_id, "c1", "c2"});
        }
    } else {
        // eight-edge zigzag e0, ~e0, e0, ~e0, ... across the non-loop edge
        const std::string w = g.trg(e0);
        vs.push_back({"z0", v, l0});
        Lattice cur = l0;
        for (int i = 0; i < 8; ++i) {
            const OrientedEdge t = (i % 2 == 0) ? e0 : e0.reverse();
            cur = propagate_label(g, t, cur);
            vs.push_back({"z" + std::to_string(i + 1), (i % 2 == 0) ? w : v, cur});
            std::string a = "z" + std::to_string(i), b = "z" + std::to_string(i + 1);
            if (t.reversed)
                es.push_back({"ze" + std::to_string(i), t.edge_id, b, a});
            else
                es.push_back({"ze" + std::to_string(i), t.edge_id, a, b});
        }
        va = "z2";
        vc = "z4"; // equal-labeled zigzag vertices at site v
        for (const HVertex& x : vs) {
            if (x.id == va) va_label = x.label;
            if (x.id == vc) vc_label = x.label;
        }
    }

    HGraph spine(gog, std::move(vs), std::move(es));
    PathQuery q;
    q.start_site = spine.vertex(vc).site;
    q.start_label = vc_label;
    q.goal_site = spine.vertex(va).site;
    q.goal_label = va_label;
    q.max_depth = depth;
    q.allow_empty = false;
    q.start_used = spine.used_slots(vc);
    q.goal_used = spine.used_slots(va);
    auto steps = detail::constrained_path_search(g, q);
    if (!steps) throw SearchExhausted("no closing path found within the depth budget");

    std::vector<HVertex> all = spine.vertices();
    std::vector<HEdge> ees = spine.edges();
    std::string prev = vc;
    for (std::size_t i = 0; i < steps->size(); ++i) {
        const OrientedEdge& t = (*steps)[i].step;
        const bool last = (i + 1 == steps->size());
        std::string nid = last ? va : "x" + std::to_string(i);
        if (!last) all.push_back({nid, g.trg(t), (*steps)[i].label});
        if (t.reversed)
            ees.push_back({"xe" + std::to_string(i), t.edge_id, nid, prev});
        else
            ees.push_back({"xe" + std::to_string(i), t.edge_id, prev, nid});
        prev = nid;
    }
    HGraph out(gog, std::move(all), std::move(ees));
    require_valid(out);
    if (out.betti() < 1) throw InternalError("cycle witness is simply connected");
    if (detail::deficiencies_unchecked(out).size() < 2)
        throw Error("cycle witness has fewer than two non-saturated vertices");
    return out;
}

// Merge pointed H-graphs over one graph of groups, all based at site v:
// disjoint copies chained by witness paths through deficient vertices. The
// quotient by the union of the copies is a forest. Nullopt when some witness
// search fails within the depth budget.
inline std::optional<HGraph> merge_same_phenotype(const std::vector<PointedHGraph>& inputs,
                                                  std::size_t depth) {
    if (inputs.empty()) throw Error("merge of an empty list");
    const GbsGraph& g = inputs.front().graph.gog();
    std::shared_ptr<const GbsGraph> gog = inputs.front().graph.gog_ptr();
    const std::string base_site = inputs.front().graph.vertex(inputs.front().base).site;
    for (const PointedHGraph& p : inputs) {
        const GbsGraph& pg = p.graph.gog();
        if (&pg != &g) {
            bool same = pg.d() == g.d() && pg.vertices() == g.vertices() &&
                        pg.edges().size() == g.edges().size();
            for (std::size_t i = 0; same && i < g.edges().size(); ++i) {
                const GogEdge &a = g.edges()[i], &b = pg.edges()[i];
                same = a.id == b.id && a.src == b.src && a.trg == b.trg && a.m_src == b.m_src &&
                       a.m_trg == b.m_trg;
            }
            if (!same) throw MixedGog("inputs span different graphs of groups");
        }
        require_valid(p.graph);
        if (p.graph.vertex(p.base).site != base_site)
            throw MixedGog("inputs are based at different sites");
    }
    if (is_amenable(reduce(g)).amenable)
        throw UnsupportedShape("merge requires a non-amenable group");
    if (is_semidirect(g)) throw UnsupportedShape("merge requires a non-semidirect group");

    // disjoint union with per-copy id prefixes
    std::vector<HVertex> vs;
    std::vector<HEdge> es;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::string p = "g" + std::to_string(i) + ":";
        for (const HVertex& x : inputs[i].graph.vertices())
            vs.push_back({p + x.id, x.site, x.label});
        for (const HEdge& x : inputs[i].graph.edges())
            es.push_back({p + x.id, x.type, p + x.src, p + x.trg});
    }
    HGraph merged(gog, std::move(vs), std::move(es));
    if (inputs.size() == 1) return merged;

    auto copy_index = [](const std::string& id) -> std::size_t {
        return std::stoul(id.substr(1, id.find(':') - 1));
    };

    for (std::size_t i = 0; i + 1 < inputs.size(); ++i) {
        std::vector<Deficiency> defs = detail::deficiencies_unchecked(merged);
        auto pick = [&](std::size_t copy) -> std::optional<Deficiency> {
            for (const Deficiency& d : defs)
                if (copy_index(d.vertex) == copy) return d;
            return std::nullopt;
        };
        std::optional<Deficiency> d1 = pick(i), d2 = pick(i + 1);
        if (!d1 || !d2) return std::nullopt; // a saturated copy cannot be chained

        const HVertex& v1 = merged.vertex(d1->vertex);
        const HVertex& v2 = merged.vertex(d2->vertex);
        PathQuery q;
        q.start_site = v1.site;
        q.start_label = v1.label;
        q.goal_site = v2.site;
        q.goal_label = v2.label;
        q.max_depth = depth;
        q.allow_empty = false;
        q.forced_first = d1->type;
        q.forced_last = d2->type.reverse();
        q.start_used = merged.used_slots(v1.id);
        q.goal_used = merged.used_slots(v2.id);
        auto steps = detail::constrained_path_search(g, q);
        if (!steps) return std::nullopt;

        std::vector<HVertex> nvs = merged.vertices();
        std::vector<HEdge> nes = merged.edges();
        std::string prev = v1.id;
        for (std::size_t k = 0; k < steps->size(); ++k) {
            const OrientedEdge& t = (*steps)[k].step;
            const bool last = (k + 1 == steps->size());
            std::string nid = last ? v2.id : "m" + std::to_string(i) + "_" + std::to_string(k);
            if (!last) nvs.push_back({nid, g.trg(t), (*steps)[k].label});
            std::string eid = "me" + std::to_string(i) + "_" + std::to_string(k);
            if (t.reversed)
                nes.push_back({eid, t.edge_id, nid, prev});
            else
                nes.push_back({eid, t.edge_id, prev, nid});
            prev = nid;
        }
        merged = HGraph(gog, std::move(nvs), std::move(nes));
        if (!validate_hgraph(merged).empty())
            throw InternalError("merge produced an invalid H-graph");
    }
    if (!merged.connected()) throw InternalError("merge produced a disconnected H-graph");
    return merged;
}

// Deterministic DOT rendering; vertices are labeled "site:basis-columns".
inline std::string export_dot(const HGraph& hg) {
    std::ostringstream os;
    os << "digraph hgraph {\n";
    for (const HVertex& v : hg.vertices()) {
        os << "  \"" << v.id << "\" [label=\"" << v.site << ":[";
        for (std::size_t j = 0; j < v.label.rank(); ++j) {
            if (j) os << ",";
            os << "[";
            for (std::size_t i = 0; i < v.label.dim(); ++i) {
                if (i) os << ",";
                os << v.label.basis()(i, j).str();
            }
            os << "]";
        }
        os << "]\"];\n";
    }
    for (const HEdge& e : hg.edges())
        os << "  \"" << e.src << "\" -> \"" << e.trg << "\" [label=\"" << e.type << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace gbs

#endif // GBS_HGRAPH_HPP
