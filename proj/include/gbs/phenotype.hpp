#ifndef GBS_PHENOTYPE_HPP
#define GBS_PHENOTYPE_HPP

#include "gbs/errors.hpp"
#include "gbs/gog.hpp"
#include "gbs/hgraph.hpp"
#include "gbs/lattice.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gbs {

// Primes dividing det(m_trg(e)) over all oriented edges, i.e. over every
// half-edge matrix of the graph.
inline std::set<Int> prime_set(const GbsGraph& g) {
    require_valid(g);
    std::set<Int> primes;
    for (const OrientedEdge& t : g.oriented_edges())
        for (const Int& p : prime_factors(det(g.m_trg(t)))) primes.insert(p);
    return primes;
}

// delta(L) = prod_{p not in prime_set} p^{v_p(|Z^d/L|)}; defined only for
// full-rank lattices. Computed by stripping the prime-set part of the index,
// so no factorization of the cofactor is ever needed.
inline std::optional<Int> delta(const GbsGraph& g, const Lattice& l) {
    if (l.dim() != g.d()) throw DimensionMismatch("delta: label must live in Z^d");
    if (l.rank() < l.dim()) return std::nullopt;
    Int m = det_index(l).value();
    for (const Int& p : prime_set(g))
        while (m % p == 0) m /= p;
    return m;
}

struct SpanOrbit {
    std::vector<Lattice> classes; // primitive representatives, discovery order
    bool closed = false;
};

// Closure of the rational span of L under the modular generators and their
// inverses, up to commensurability, truncated at `budget` distinct classes.
inline SpanOrbit modular_span_orbit(const GbsGraph& g, const std::string& v, const Lattice& l,
                                    std::size_t budget) {
    if (l.dim() != g.d()) throw DimensionMismatch("span orbit: label must live in Z^d");
    std::vector<RatMatrix> gens = modular_generators(g, v);
    std::vector<RatMatrix> moves;
    for (const RatMatrix& m : gens) {
        moves.push_back(m);
        moves.push_back(rat_inverse(m));
    }
    SpanOrbit out;
    Lattice start = saturation(l);
    std::set<Lattice> seen{start};
    std::vector<Lattice> queue{start};
    out.classes.push_back(start);
    std::size_t head = 0;
    while (head < queue.size()) {
        Lattice cur = queue[head++];
        for (const RatMatrix& m : moves) {
            Lattice nxt = span_class(m, cur);
            if (seen.insert(nxt).second) {
                if (out.classes.size() >= budget) return out; // truncated, not closed
                out.classes.push_back(nxt);
                queue.push_back(nxt);
            }
        }
    }
    out.closed = true;
    return out;
}

// Certificate that every rational line of Q^2 has an infinite orbit under the
// cyclic group generated by m: real irrational spectrum with distinct moduli.
// Then every power of m has the same two irrational eigenlines, so no
// rational line is ever fixed.
inline bool line_orbit_infinite_certificate(const RatMatrix& m) {
    if (m.rows() != 2 || m.cols() != 2) return false;
    Rat tr = m(0, 0) + m(1, 1);
    Rat disc = tr * tr - Rat(4) * det(m);
    return tr != 0 && disc > 0 && !is_rational_square(disc);
}

enum class CorCriterion { Satisfied, Violated, Unknown };

// Bounded test of the commensurated-lattice condition for a strict-rank
// label: Violated when the span orbit closes (the stabilizer has finite
// index); Satisfied when a bounded product of modular generators provably
// moves every rational line forever (rank-1 spans in rank 2).
inline CorCriterion cor_criterion(const GbsGraph& g, const std::string& v, const Lattice& l,
                                  std::size_t budget, std::size_t word_len = 6) {
    if (l.rank() == 0 || l.rank() >= l.dim())
        throw BadRank("cor_criterion expects a nontrivial label of rank < d");
    if (budget == 0) return CorCriterion::Unknown;
    SpanOrbit orbit = modular_span_orbit(g, v, l, budget);
    if (orbit.closed) return CorCriterion::Violated;
    if (g.d() == 2 && l.rank() == 1) {
        std::vector<RatMatrix> gens = modular_generators(g, v);
        std::vector<RatMatrix> moves;
        for (const RatMatrix& m : gens) {
            moves.push_back(m);
            moves.push_back(rat_inverse(m));
        }
        std::vector<RatMatrix> words{RatMatrix::identity(2)};
        std::size_t head = 0, len = 0;
        while (len < word_len) {
            std::size_t end = words.size();
            for (; head < end; ++head)
                for (const RatMatrix& m : moves) {
                    RatMatrix w = m * words[head];
                    if (line_orbit_infinite_certificate(w)) return CorCriterion::Satisfied;
                    words.push_back(w);
                }
            ++len;
        }
    }
    return CorCriterion::Unknown;
}

struct PhenotypeReport {
    std::string site;
    std::size_t rank = 0;
    std::optional<Int> delta; // defined iff rank = d
    SpanOrbit span_orbit;
};

inline PhenotypeReport phenotype_report(const GbsGraph& g, const std::string& v, const Lattice& l,
                                        std::size_t budget) {
    require_valid(g);
    if (!g.has_vertex(v)) throw Error("unknown base vertex '" + v + "'");
    PhenotypeReport r;
    r.site = v;
    r.rank = l.rank();
    r.delta = delta(g, l);
    r.span_orbit = modular_span_orbit(g, v, l, budget);
    return r;
}

struct EquivDecision {
    enum class Verdict { Equivalent, Distinguished, Unknown } verdict;
    std::optional<WitnessPath> witness; // set on Equivalent
    std::string invariant;              // set on Distinguished
};

inline void require_generic_shape(const GbsGraph& g) {
    if (is_amenable(reduce(g)).amenable)
        throw UnsupportedShape("operation requires a non-amenable group");
    if (is_semidirect(g)) throw UnsupportedShape("operation requires a non-semidirect group");
}

// Three-valued comparison of two labels at a site: distinguished by rank,
// by delta, or by provably disjoint span orbits; equivalent with an explicit
// H-path witness; Unknown otherwise.
inline EquivDecision equiv_decide(std::shared_ptr<const GbsGraph> gog, const std::string& v,
                                  const Lattice& l0, const Lattice& l1, std::size_t depth,
                                  std::size_t budget = 10000) {
    const GbsGraph& g = *gog;
    require_valid(g);
    require_generic_shape(g);
    if (l0.dim() != g.d() || l1.dim() != g.d())
        throw DimensionMismatch("labels must live in Z^d");

    if (l0.rank() != l1.rank())
        return {EquivDecision::Verdict::Distinguished, std::nullopt,
                "rank: " + std::to_string(l0.rank()) + " vs " + std::to_string(l1.rank())};
    if (l0.rank() == g.d()) {
        Int d0 = *delta(g, l0), d1 = *delta(g, l1);
        if (d0 != d1)
            return {EquivDecision::Verdict::Distinguished, std::nullopt,
                    "delta: " + d0.str() + " vs " + d1.str()};
    }
    auto witness = find_equiv_path(gog, v, l0, l1, depth, {}, budget);
    if (witness) {
        // internal consistency: a witness must never coexist with a
        // distinguishing invariant
        if (l0.rank() != l1.rank() ||
            (l0.rank() == g.d() && *delta(g, l0) != *delta(g, l1)))
            throw InternalError("witness found for labels with distinct invariants");
        return {EquivDecision::Verdict::Equivalent, std::move(witness), ""};
    }
    std::size_t orbit_budget = std::min<std::size_t>(budget, 64);
    SpanOrbit o0 = modular_span_orbit(g, v, l0, orbit_budget);
    SpanOrbit o1 = modular_span_orbit(g, v, l1, orbit_budget);
    if (o0.closed && o1.closed) {
        bool disjoint = true;
        for (const Lattice& a : o0.classes)
            for (const Lattice& b : o1.classes)
                if (a == b) disjoint = false;
        if (disjoint)
            return {EquivDecision::Verdict::Distinguished, std::nullopt, "modular span orbit"};
    }
    return {EquivDecision::Verdict::Unknown, std::nullopt, ""};
}

struct FinitenessProbe {
    bool finite = false;        // closure of the move set reached
    std::size_t count = 0;      // distinct labels found at the base site
    std::size_t states = 0;     // total (site, label) states explored
};

// Enumerate labels reachable at site v by canonical propagation, stopping at
// `budget` states. Finite only when the closure is complete.
inline FinitenessProbe class_finiteness_probe(const GbsGraph& g, const std::string& v,
                                              const Lattice& l0, std::size_t budget) {
    require_valid(g);
    require_generic_shape(g);
    if (!g.has_vertex(v)) throw Error("unknown base vertex '" + v + "'");
    if (l0.dim() != g.d()) throw DimensionMismatch("label must live in Z^d");
    std::set<std::pair<std::string, Lattice>> seen{{v, l0}};
    std::vector<std::pair<std::string, Lattice>> queue{{v, l0}};
    std::size_t head = 0;
    while (head < queue.size()) {
        auto [site, lab] = queue[head++];
        for (const OrientedEdge& t : g.oriented_out(site)) {
            std::pair<std::string, Lattice> ns{g.trg(t), propagate_label(g, t, lab)};
            if (seen.count(ns)) continue;
            if (seen.size() >= budget) {
                FinitenessProbe p;
                p.finite = false;
                p.states = seen.size();
                for (const auto& [s, l] : seen)
                    if (s == v) ++p.count;
                return p;
            }
            seen.insert(ns);
            queue.push_back(ns);
        }
    }
    FinitenessProbe p;
    p.finite = true;
    p.states = seen.size();
    for (const auto& [s, l] : seen)
        if (s == v) ++p.count;
    return p;
}

} // namespace gbs

#endif // GBS_PHENOTYPE_HPP
