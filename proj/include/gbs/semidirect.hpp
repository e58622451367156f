#ifndef GBS_SEMIDIRECT_HPP
#define GBS_SEMIDIRECT_HPP

#include "gbs/errors.hpp"
#include "gbs/gog.hpp"
#include "gbs/hgraph.hpp"
#include "gbs/lattice.hpp"
#include "gbs/phenotype.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gbs {

// The semidirect case Z^d x| F_r: generator a_i acts on Z^d by the
// unimodular matrix mats[i].
struct RoseRep {
    std::size_t d = 0;
    std::vector<IntMatrix> mats;

    std::size_t r() const { return mats.size(); }
};

inline void validate_rose(const RoseRep& rose) {
    if (rose.d == 0) throw Error("rose rank d must be positive");
    for (std::size_t i = 0; i < rose.mats.size(); ++i) {
        const IntMatrix& p = rose.mats[i];
        if (p.rows() != rose.d || p.cols() != rose.d)
            throw DimensionMismatch("rose matrix " + std::to_string(i + 1) + " is not d x d");
        if (!is_unimodular_matrix(p))
            throw Error("rose matrix " + std::to_string(i + 1) + " is not unimodular");
    }
}

// Reduced word in F_r; letters are +-(i+1) for a_{i+1}^{+-1}.
class FreeWord {
  public:
    FreeWord() = default;
    explicit FreeWord(std::vector<int> letters) {
        for (int x : letters) push(x);
    }

    static FreeWord generator(std::size_t i, bool inverse = false) {
        FreeWord w;
        w.push(inverse ? -int(i + 1) : int(i + 1));
        return w;
    }

    const std::vector<int>& letters() const { return letters_; }
    bool empty() const { return letters_.empty(); }
    std::size_t length() const { return letters_.size(); }

    FreeWord operator*(const FreeWord& o) const {
        FreeWord w = *this;
        for (int x : o.letters_) w.push(x);
        return w;
    }

    FreeWord inverse() const {
        FreeWord w;
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.push(-*it);
        return w;
    }

    bool operator==(const FreeWord& o) const { return letters_ == o.letters_; }
    bool operator<(const FreeWord& o) const { return letters_ < o.letters_; }

    // "a1 a2 A1" with capitals marking inverses; empty word prints as "1".
    std::string str() const {
        if (letters_.empty()) return "1";
        std::string s;
        for (int x : letters_) {
            if (!s.empty()) s += ' ';
            s += (x > 0 ? "a" : "A") + std::to_string(x > 0 ? x : -x);
        }
        return s;
    }

    static FreeWord parse(const std::string& text) {
        FreeWord w;
        std::size_t i = 0;
        while (i < text.size()) {
            if (text[i] == ' ' || text[i] == '\t') {
                ++i;
                continue;
            }
            char c = text[i];
            if (c == '1') {
                ++i;
                continue;
            }
            bool inv = (c == 'A');
            if (c != 'a' && c != 'A') throw Error("bad free word '" + text + "'");
            ++i;
            std::size_t j = i;
            while (j < text.size() && isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j == i) throw Error("bad free word '" + text + "'");
            int idx = std::stoi(text.substr(i, j - i));
            if (idx <= 0) throw Error("bad generator index in '" + text + "'");
            w.push(inv ? -idx : idx);
            i = j;
        }
        return w;
    }

  private:
    void push(int x) {
        if (x == 0) throw Error("zero letter in free word");
        if (!letters_.empty() && letters_.back() == -x)
            letters_.pop_back();
        else
            letters_.push_back(x);
    }
    std::vector<int> letters_;
};

// rho(gamma): the product of the P_i^{+-1} along gamma.
inline IntMatrix rho(const RoseRep& rose, const FreeWord& w) {
    IntMatrix m = IntMatrix::identity(rose.d);
    for (int x : w.letters()) {
        std::size_t i = std::size_t(x > 0 ? x : -x) - 1;
        if (i >= rose.r()) throw Error("generator index out of range in word");
        m = m * (x > 0 ? rose.mats[i] : unimodular_inverse(rose.mats[i]));
    }
    return m;
}

struct SemidirectElement {
    std::vector<Int> u;
    FreeWord gamma;

    bool operator==(const SemidirectElement& o) const { return u == o.u && gamma == o.gamma; }
};

inline SemidirectElement multiply(const SemidirectElement& x, const SemidirectElement& y,
                                  const RoseRep& rose) {
    if (x.u.size() != rose.d || y.u.size() != rose.d)
        throw DimensionMismatch("element vectors must have length d");
    std::vector<Int> u = rho(rose, x.gamma).apply(y.u);
    for (std::size_t i = 0; i < rose.d; ++i) u[i] += x.u[i];
    return {std::move(u), x.gamma * y.gamma};
}

inline SemidirectElement invert(const SemidirectElement& x, const RoseRep& rose) {
    if (x.u.size() != rose.d) throw DimensionMismatch("element vector must have length d");
    FreeWord gi = x.gamma.inverse();
    std::vector<Int> u = rho(rose, gi).apply(x.u);
    for (Int& c : u) c = -c;
    return {std::move(u), std::move(gi)};
}

// Folded core graph of a finitely generated subgroup of F_r: at most one
// outgoing and one incoming a_i-arc per vertex, no non-base degree-1 vertex.
struct StallingsGraph {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t r = 0;
    std::size_t base = 0;
    std::vector<std::vector<std::size_t>> out; // out[i][v]: a_{i+1}-arc v -> out[i][v]
    std::vector<std::vector<std::size_t>> in;

    std::size_t size() const { return out.empty() ? 0 : out[0].size(); }

    bool operator==(const StallingsGraph& o) const {
        return r == o.r && base == o.base && out == o.out && in == o.in;
    }
};

namespace detail {

struct Arc {
    std::size_t src, gen, trg;
    bool operator<(const Arc& o) const {
        if (src != o.src) return src < o.src;
        if (gen != o.gen) return gen < o.gen;
        return trg < o.trg;
    }
    bool operator==(const Arc& o) const {
        return src == o.src && gen == o.gen && trg == o.trg;
    }
};

// BFS relabel from the base, scanning arcs in the fixed order
// a1-out, a1-in, a2-out, ...; makes folding input-order independent.
inline StallingsGraph canonicalize(std::size_t r, std::size_t base, std::set<Arc> arcs,
                                   std::size_t nverts) {
    std::vector<std::vector<std::size_t>> out(r, std::vector<std::size_t>(nverts,
                                                                          StallingsGraph::npos));
    std::vector<std::vector<std::size_t>> in(r, std::vector<std::size_t>(nverts,
                                                                         StallingsGraph::npos));
    for (const Arc& a : arcs) {
        out[a.gen][a.src] = a.trg;
        in[a.gen][a.trg] = a.src;
    }
    std::vector<std::size_t> order(nverts, StallingsGraph::npos);
    std::vector<std::size_t> queue{base};
    order[base] = 0;
    std::size_t next = 1, head = 0;
    while (head < queue.size()) {
        std::size_t v = queue[head++];
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t w : {out[i][v], in[i][v]}) {
                if (w == StallingsGraph::npos || order[w] != StallingsGraph::npos) continue;
                order[w] = next++;
                queue.push_back(w);
            }
        }
    }
    StallingsGraph g;
    g.r = r;
    g.base = 0;
    g.out.assign(r, std::vector<std::size_t>(next, StallingsGraph::npos));
    g.in.assign(r, std::vector<std::size_t>(next, StallingsGraph::npos));
    for (const Arc& a : arcs) {
        if (order[a.src] == StallingsGraph::npos) continue; // unreachable: impossible after trim
        g.out[a.gen][order[a.src]] = order[a.trg];
        g.in[a.gen][order[a.trg]] = order[a.src];
    }
    return g;
}

} // namespace detail

// Stallings folding: the canonical core of the subgroup generated by the
// given words.
inline StallingsGraph fold(std::size_t r, const std::vector<FreeWord>& words) {
    using detail::Arc;
    std::vector<Arc> arcs;
    std::size_t nverts = 1; // vertex 0 is the base
    for (const FreeWord& w : words) {
        std::size_t cur = 0;
        const auto& ls = w.letters();
        for (std::size_t k = 0; k < ls.size(); ++k) {
            int x = ls[k];
            std::size_t i = std::size_t(x > 0 ? x : -x) - 1;
            if (i >= r) throw Error("generator index out of range in word");
            std::size_t nxt = (k + 1 == ls.size()) ? 0 : nverts++;
            if (x > 0)
                arcs.push_back({cur, i, nxt});
            else
                arcs.push_back({nxt, i, cur});
            cur = nxt;
        }
    }

    // fold: merge endpoints of same-labeled arcs sharing a source or target
    std::vector<std::size_t> root(nverts);
    for (std::size_t i = 0; i < nverts; ++i) root[i] = i;
    auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    bool changed = true;
    std::set<Arc> arcset;
    while (changed) {
        changed = false;
        arcset.clear();
        for (const Arc& a : arcs) arcset.insert({find(a.src), a.gen, find(a.trg)});
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> out_seen, in_seen;
        for (const Arc& a : arcset) {
            auto [oit, onew] = out_seen.emplace(std::make_pair(a.src, a.gen), a.trg);
            if (!onew && find(oit->second) != find(a.trg)) {
                root[find(oit->second)] = find(a.trg);
                changed = true;
                break;
            }
            auto [iit, inew] = in_seen.emplace(std::make_pair(a.trg, a.gen), a.src);
            if (!inew && find(iit->second) != find(a.src)) {
                root[find(iit->second)] = find(a.src);
                changed = true;
                break;
            }
        }
    }

    // compact to root representatives
    std::map<std::size_t, std::size_t> compact;
    auto idx = [&](std::size_t v) { return compact.emplace(find(v), compact.size()).first->second; };
    std::size_t base = idx(find(0));
    std::set<Arc> folded;
    for (const Arc& a : arcs) folded.insert({idx(find(a.src)), a.gen, idx(find(a.trg))});
    std::size_t n = compact.size();

    // trim to the core: drop non-base vertices of degree <= 1
    while (true) {
        std::vector<std::size_t> deg(n, 0);
        for (const Arc& a : folded) {
            ++deg[a.src];
            ++deg[a.trg];
        }
        std::size_t victim = n;
        for (std::size_t v = 0; v < n; ++v)
            if (v != base && deg[v] <= 1) {
                victim = v;
                break;
            }
        if (victim == n) break;
        std::set<Arc> kept;
        for (const Arc& a : folded)
            if (a.src != victim && a.trg != victim) kept.insert(a);
        folded = std::move(kept);
        // note: vertex ids keep gaps here; canonicalize() renumbers
    }

    return detail::canonicalize(r, base, folded, n);
}

// Complete covering of the rose: every vertex carries every generator in
// both directions. Equivalent to the subgroup having finite index in F_r.
inline bool is_finite_index_free(const StallingsGraph& core) {
    for (std::size_t i = 0; i < core.r; ++i)
        for (std::size_t v = 0; v < core.size(); ++v)
            if (core.out[i][v] == StallingsGraph::npos || core.in[i][v] == StallingsGraph::npos)
                return false;
    return true;
}

// Trace a word through the folded graph from the base; membership in the
// subgroup is a full trace returning to the base.
inline bool core_accepts(const StallingsGraph& core, const FreeWord& w) {
    std::size_t cur = core.base;
    for (int x : w.letters()) {
        std::size_t i = std::size_t(x > 0 ? x : -x) - 1;
        if (i >= core.r) return false;
        cur = x > 0 ? core.out[i][cur] : core.in[i][cur];
        if (cur == StallingsGraph::npos) return false;
    }
    return cur == core.base;
}

// Free basis of the represented subgroup: one word per non-tree arc of a BFS
// tree, read through tree paths.
inline std::vector<FreeWord> core_basis(const StallingsGraph& core) {
    const std::size_t n = core.size();
    std::vector<FreeWord> to_base_inv(n); // word from base to each vertex
    std::vector<bool> visited(n, false);
    std::set<detail::Arc> tree;
    std::vector<std::size_t> queue{core.base};
    visited[core.base] = true;
    std::size_t head = 0;
    while (head < queue.size()) {
        std::size_t v = queue[head++];
        for (std::size_t i = 0; i < core.r; ++i) {
            if (core.out[i][v] != StallingsGraph::npos && !visited[core.out[i][v]]) {
                std::size_t w = core.out[i][v];
                visited[w] = true;
                to_base_inv[w] = to_base_inv[v] * FreeWord::generator(i);
                tree.insert({v, i, w});
                queue.push_back(w);
            }
            if (core.in[i][v] != StallingsGraph::npos && !visited[core.in[i][v]]) {
                std::size_t w = core.in[i][v];
                visited[w] = true;
                to_base_inv[w] = to_base_inv[v] * FreeWord::generator(i, true);
                tree.insert({w, i, v});
                queue.push_back(w);
            }
        }
    }
    std::vector<FreeWord> basis;
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < core.r; ++i) {
            std::size_t w = core.out[i][v];
            if (w == StallingsGraph::npos || tree.count({v, i, w})) continue;
            basis.push_back(to_base_inv[v] * FreeWord::generator(i) * to_base_inv[w].inverse());
        }
    return basis;
}

// H <= Z^d x| F_r, encoded by its intersection lattice, the folded core of
// pi(H), and one lift vector per input word.
struct SubgroupRep {
    Lattice lattice;                // H cap Z^d
    std::vector<FreeWord> core_words;
    std::vector<std::vector<Int>> lifts;
    StallingsGraph core;            // fold(core_words)

    SubgroupRep(Lattice l, std::vector<FreeWord> words, std::vector<std::vector<Int>> lift_vecs,
                std::size_t r)
        : lattice(std::move(l)), core_words(std::move(words)), lifts(std::move(lift_vecs)),
          core(fold(r, core_words)) {}
};

// The rep invariant: every basis word of pi(H) stabilizes the lattice.
inline void validate_rep(const SubgroupRep& rep, const RoseRep& rose) {
    validate_rose(rose);
    if (rep.lattice.dim() != rose.d) throw InvalidRep("rep lattice dimension != d");
    if (!rep.lifts.empty() && rep.lifts.size() != rep.core_words.size())
        throw InvalidRep("one lift vector per core word expected");
    for (const auto& u : rep.lifts)
        if (u.size() != rose.d) throw InvalidRep("lift vector length != d");
    for (const FreeWord& w : core_basis(rep.core))
        if (image(rho(rose, w), rep.lattice) != rep.lattice)
            throw InvalidRep("core word '" + w.str() + "' does not stabilize the lattice");
}

// Perfect-kernel membership in the semidirect case: H is in the kernel iff
// pi(H) has infinite index in F_r.
inline bool kernel_member(const SubgroupRep& rep, const RoseRep& rose) {
    validate_rep(rep, rose);
    return !is_finite_index_free(rep.core);
}

struct LatticeOrbit {
    std::vector<Lattice> lattices; // discovery order
    bool closed = false;
};

// BFS closure of {rho(gamma) L} under the generators and their inverses.
inline LatticeOrbit orbit_lattice(const RoseRep& rose, const Lattice& l, std::size_t budget) {
    validate_rose(rose);
    if (l.dim() != rose.d) throw DimensionMismatch("lattice dimension != d");
    std::vector<IntMatrix> moves;
    for (const IntMatrix& p : rose.mats) {
        moves.push_back(p);
        moves.push_back(unimodular_inverse(p));
    }
    LatticeOrbit out;
    std::set<Lattice> seen{l};
    std::vector<Lattice> queue{l};
    out.lattices.push_back(l);
    std::size_t head = 0;
    while (head < queue.size()) {
        Lattice cur = queue[head++];
        for (const IntMatrix& m : moves) {
            Lattice nxt = image(m, cur);
            if (seen.insert(nxt).second) {
                if (out.lattices.size() >= budget) return out; // truncated
                out.lattices.push_back(nxt);
                queue.push_back(nxt);
            }
        }
    }
    out.closed = true;
    return out;
}

// Reduced words of length <= max_len whose action fixes L.
inline std::vector<FreeWord> stabilizer_words(const RoseRep& rose, const Lattice& l,
                                              std::size_t max_len) {
    validate_rose(rose);
    std::vector<IntMatrix> inv;
    for (const IntMatrix& p : rose.mats) inv.push_back(unimodular_inverse(p));
    std::vector<FreeWord> found;
    std::vector<std::pair<FreeWord, IntMatrix>> frontier{
        {FreeWord{}, IntMatrix::identity(rose.d)}};
    for (std::size_t len = 0; len < max_len; ++len) {
        std::vector<std::pair<FreeWord, IntMatrix>> next;
        for (const auto& [w, m] : frontier) {
            for (std::size_t i = 0; i < rose.r(); ++i) {
                for (bool neg : {false, true}) {
                    int letter = neg ? -int(i + 1) : int(i + 1);
                    if (!w.letters().empty() && w.letters().back() == -letter) continue;
                    FreeWord nw = w * FreeWord::generator(i, neg);
                    IntMatrix nm = m * (neg ? inv[i] : rose.mats[i]); // rho(nw)
                    if (image(nm, l) == l) found.push_back(nw);
                    next.emplace_back(std::move(nw), std::move(nm));
                }
            }
        }
        frontier = std::move(next);
    }
    return found;
}

// Orbit coset graph of a full-rank lattice: the Stallings core of
// Stab_{F_r}(L), of finite index equal to the orbit size. Traversing the
// a_i-arc multiplies the label by P_i^{-1} (right cosets).
inline StallingsGraph stabilizer_core(const RoseRep& rose, const Lattice& l) {
    validate_rose(rose);
    if (l.dim() != rose.d) throw DimensionMismatch("lattice dimension != d");
    if (l.rank() != rose.d)
        throw BadRank("stabilizer_core is exact for full-rank lattices only");
    std::vector<IntMatrix> inv;
    for (const IntMatrix& p : rose.mats) inv.push_back(unimodular_inverse(p));
    std::map<Lattice, std::size_t> index{{l, 0}};
    std::vector<Lattice> verts{l};
    std::set<detail::Arc> arcs;
    std::size_t head = 0;
    while (head < verts.size()) {
        Lattice cur = verts[head];
        for (std::size_t i = 0; i < rose.r(); ++i) {
            Lattice nxt = image(inv[i], cur);
            auto [it, isnew] = index.emplace(nxt, verts.size());
            if (isnew) verts.push_back(nxt);
            arcs.insert({head, i, it->second});
        }
        ++head;
    }
    return detail::canonicalize(rose.r(), 0, arcs, verts.size());
}

enum class TriState { True, False, Unknown };

struct PieceClassification {
    TriState p_closed = TriState::Unknown; // is the piece P_C closed?
    TriState d_empty = TriState::Unknown;  // is D_C empty?
    std::string piece_case;
    bool orbit_closed = false;
    std::size_t orbit_size = 0;
    std::vector<FreeWord> stabilizer_sample; // words found by bounded search
};

// Classification data for the piece of the conjugacy class of L, following
// the finite-index / infinite-cyclic-stabilizer dichotomy. Bounded searches
// can leave fields Unknown.
inline PieceClassification classify_piece(const RoseRep& rose, const Lattice& l,
                                          std::size_t budget, std::size_t word_len = 6) {
    validate_rose(rose);
    PieceClassification out;
    LatticeOrbit orbit = orbit_lattice(rose, l, budget);
    out.orbit_closed = orbit.closed;
    out.orbit_size = orbit.lattices.size();
    out.stabilizer_sample = stabilizer_words(rose, l, word_len);

    if (orbit.closed) {
        // finite orbit <=> finite-index stabilizer: clopen piece, empty D_C
        out.p_closed = TriState::True;
        out.d_empty = TriState::True;
        out.piece_case = "P_C is clopen; stabilizer has finite index " +
                         std::to_string(orbit.lattices.size()) + "; D_C is empty";
        return out;
    }

    // try to certify the orbit infinite: a product with real irrational
    // spectrum of distinct moduli moves every rational line forever
    if (rose.d == 2 && l.rank() == 1) {
        std::vector<RatMatrix> moves;
        for (const IntMatrix& p : rose.mats) {
            moves.push_back(to_rational(p));
            moves.push_back(to_rational(unimodular_inverse(p)));
        }
        std::vector<RatMatrix> words{RatMatrix::identity(2)};
        std::size_t head = 0;
        for (std::size_t len = 0; len < word_len && out.p_closed == TriState::Unknown; ++len) {
            std::size_t end = words.size();
            for (; head < end; ++head)
                for (const RatMatrix& m : moves) {
                    RatMatrix w = m * words[head];
                    if (line_orbit_infinite_certificate(w)) {
                        out.p_closed = TriState::False;
                        break;
                    }
                    words.push_back(w);
                }
        }
    }

    // infinite-cyclic detection: every stabilizer word found is a power of
    // one primitive word
    if (!out.stabilizer_sample.empty()) {
        FreeWord w0 = out.stabilizer_sample.front();
        for (const FreeWord& w : out.stabilizer_sample)
            if (w.length() < w0.length()) w0 = w;
        bool cyclic = true;
        for (const FreeWord& w : out.stabilizer_sample) {
            FreeWord acc;
            bool is_power = false;
            for (std::size_t k = 0; k * w0.length() <= w.length() + w0.length(); ++k) {
                if (acc == w || acc.inverse() == w) {
                    is_power = true;
                    break;
                }
                acc = acc * w0;
            }
            if (!is_power) {
                cyclic = false;
                break;
            }
        }
        if (cyclic) {
            out.d_empty = TriState::False;
            out.piece_case = "D_C = P_C (stabilizer detected infinite cyclic by bounded word "
                             "search, generated by '" +
                             w0.str() + "')";
            return out;
        }
    }
    out.piece_case = "unknown: orbit did not close within budget and the stabilizer sample is "
                     "inconclusive";
    return out;
}

// Full-rank approximation of a rank-deficient lattice: from the Smith form
// L = P diag(d_1..d_s, 0..0) Z^d, the lattice P diag(d_1..d_s, M..M) Z^d with
// M = N prod(d_i). Contains L, is P-independent (it equals L + M Z^d), and is
// stabilized by every matrix stabilizing L.
inline Lattice lambda_n(const Lattice& l, const Int& n) {
    if (n < 1) throw Error("lambda_n requires N >= 1");
    const std::size_t d = l.dim(), s = l.rank();
    if (s >= d) throw BadRank("lambda_n expects a rank-deficient lattice");
    Int prod(1);
    IntMatrix p = IntMatrix::identity(d);
    std::vector<Int> diag;
    if (s > 0) {
        SnfResult sn = snf(l.basis());
        p = unimodular_inverse(sn.u);
        for (std::size_t i = 0; i < s; ++i) {
            diag.push_back(sn.s(i, i));
            prod *= sn.s(i, i);
        }
    }
    Int m = n * prod;
    IntMatrix gens(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        Int c = j < s ? diag[j] : m;
        for (std::size_t i = 0; i < d; ++i) gens(i, j) = c * p(i, j);
    }
    return Lattice::from_generators(d, gens);
}

// The semidirect-shape graph of groups matching a rose: one vertex, loops
// labeled (P_i, I).
inline std::shared_ptr<const GbsGraph> rose_gog(const RoseRep& rose,
                                                const std::string& site = "v") {
    validate_rose(rose);
    std::vector<GogEdge> edges;
    for (std::size_t i = 0; i < rose.r(); ++i) {
        std::string id = "e" + std::to_string(i + 1);
        edges.push_back({id, site, site, rose.mats[i], IntMatrix::identity(rose.d)});
    }
    return std::make_shared<GbsGraph>(rose.d, std::vector<std::string>{site}, std::move(edges));
}

// The H-graph of the subgroup: its core re-labeled with lattices, base vertex
// labeled rep.lattice and the a_i-arc stepping by P_i^{-1}.
inline PointedHGraph hgraph_of_subgroup(const SubgroupRep& rep, const RoseRep& rose,
                                        std::shared_ptr<const GbsGraph> gog) {
    validate_rep(rep, rose);
    const GbsGraph& g = *gog;
    if (!is_semidirect(g)) throw ShapeMismatch("graph of groups is not of semidirect shape");
    if (g.d() != rose.d || g.edges().size() != rose.r())
        throw ShapeMismatch("graph of groups does not match the rose");
    for (std::size_t i = 0; i < rose.r(); ++i) {
        const GogEdge& e = g.edges()[i];
        if (e.m_src * unimodular_inverse(e.m_trg) != rose.mats[i])
            throw ShapeMismatch("loop '" + e.id + "' does not act by P_" + std::to_string(i + 1));
    }
    const std::string site = g.vertices().front();

    const StallingsGraph& core = rep.core;
    std::vector<IntMatrix> inv;
    for (const IntMatrix& p : rose.mats) inv.push_back(unimodular_inverse(p));
    std::vector<std::optional<Lattice>> labels(core.size());
    labels[core.base] = rep.lattice;
    std::vector<std::size_t> queue{core.base};
    std::size_t head = 0;
    while (head < queue.size()) {
        std::size_t v = queue[head++];
        for (std::size_t i = 0; i < core.r; ++i) {
            std::size_t w = core.out[i][v];
            if (w != StallingsGraph::npos) {
                Lattice lab = image(inv[i], *labels[v]);
                if (!labels[w]) {
                    labels[w] = lab;
                    queue.push_back(w);
                } else if (*labels[w] != lab) {
                    throw InvariantViolation("a core loop moves the lattice");
                }
            }
            std::size_t u = core.in[i][v];
            if (u != StallingsGraph::npos) {
                Lattice lab = image(rose.mats[i], *labels[v]);
                if (!labels[u]) {
                    labels[u] = lab;
                    queue.push_back(u);
                } else if (*labels[u] != lab) {
                    throw InvariantViolation("a core loop moves the lattice");
                }
            }
        }
    }

    auto pad = [](std::size_t i) {
        std::string s = std::to_string(i);
        return std::string(s.size() >= 3 ? 0 : 3 - s.size(), '0') + s;
    };
    std::vector<HVertex> vs;
    for (std::size_t v = 0; v < core.size(); ++v) vs.push_back({"u" + pad(v), site, *labels[v]});
    std::vector<HEdge> es;
    std::size_t ec = 0;
    for (std::size_t i = 0; i < core.r; ++i)
        for (std::size_t v = 0; v < core.size(); ++v)
            if (core.out[i][v] != StallingsGraph::npos)
                es.push_back({"k" + pad(ec++), g.edges()[i].id, "u" + pad(v),
                              "u" + pad(core.out[i][v])});
    HGraph hg(std::move(gog), std::move(vs), std::move(es));
    require_valid(hg);
    return {std::move(hg), "u" + pad(core.base)};
}

} // namespace gbs

#endif // GBS_SEMIDIRECT_HPP
