#ifndef GBS_TESTS_GENERATORS_HPP
#define GBS_TESTS_GENERATORS_HPP

// Seeded random instances for property tests. Everything draws from an
// explicit engine so failures reproduce.

#include "gbs/gog.hpp"
#include "gbs/lattice.hpp"
#include "gbs/matrix.hpp"

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace gen {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline gbs::IntMatrix int_matrix(Rng& rng, std::size_t rows, std::size_t cols, int lo, int hi) {
    gbs::IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = gbs::Int(uniform(rng, lo, hi));
    return m;
}

inline gbs::IntMatrix nonsingular(Rng& rng, std::size_t d, int lo, int hi) {
    while (true) {
        gbs::IntMatrix m = int_matrix(rng, d, d, lo, hi);
        if (gbs::det(m) != 0) return m;
    }
}

inline gbs::RatMatrix rat_matrix(Rng& rng, std::size_t d, int lo, int hi) {
    gbs::RatMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            int num = uniform(rng, lo, hi);
            int den = uniform(rng, 1, 4);
            m(i, j) = gbs::Rat(gbs::Int(num), gbs::Int(den));
        }
    return m;
}

inline gbs::Lattice lattice(Rng& rng, std::size_t d, int lo, int hi, int max_gens = -1) {
    int m = max_gens < 0 ? uniform(rng, 0, int(d) + 1) : max_gens;
    return gbs::Lattice::from_generators(d, int_matrix(rng, d, std::size_t(m), lo, hi));
}

inline gbs::Lattice full_rank_lattice(Rng& rng, std::size_t d, int lo, int hi) {
    return gbs::Lattice::from_generators(d, nonsingular(rng, d, lo, hi));
}

// A unimodular matrix as a short product of elementary column operations.
inline gbs::IntMatrix unimodular(Rng& rng, std::size_t d, int ops = 4) {
    gbs::IntMatrix m = gbs::IntMatrix::identity(d);
    for (int k = 0; k < ops; ++k) {
        std::size_t a = std::size_t(uniform(rng, 0, int(d) - 1));
        std::size_t b = std::size_t(uniform(rng, 0, int(d) - 1));
        if (a == b) {
            if (uniform(rng, 0, 1)) m.negate_col(a);
            continue;
        }
        m.add_col(a, b, gbs::Int(uniform(rng, -2, 2)));
    }
    return m;
}

// Connected random graph of groups: a tree plus up to `extra` edges, all
// half-edge labels nonsingular with entries in [lo, hi].
inline std::shared_ptr<const gbs::GbsGraph> gog(Rng& rng, std::size_t d, std::size_t nverts,
                                                std::size_t extra, int lo, int hi) {
    std::vector<std::string> verts;
    for (std::size_t i = 0; i < nverts; ++i) verts.push_back("v" + std::to_string(i));
    std::vector<gbs::GogEdge> edges;
    std::size_t eid = 0;
    auto add_edge = [&](std::size_t a, std::size_t b) {
        edges.push_back({"e" + std::to_string(eid++), verts[a], verts[b],
                         nonsingular(rng, d, lo, hi), nonsingular(rng, d, lo, hi)});
    };
    for (std::size_t i = 1; i < nverts; ++i) add_edge(std::size_t(uniform(rng, 0, int(i) - 1)), i);
    for (std::size_t k = 0; k < extra; ++k)
        add_edge(std::size_t(uniform(rng, 0, int(nverts) - 1)),
                 std::size_t(uniform(rng, 0, int(nverts) - 1)));
    return std::make_shared<gbs::GbsGraph>(d, std::move(verts), std::move(edges));
}

} // namespace gen

#endif // GBS_TESTS_GENERATORS_HPP
