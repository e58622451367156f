#ifndef GBS_TESTS_FIXTURES_HPP
#define GBS_TESTS_FIXTURES_HPP

// The worked example graphs used across the suites.

#include "gbs/gog.hpp"
#include "gbs/lattice.hpp"
#include "gbs/semidirect.hpp"

#include <memory>
#include <vector>

namespace fix {

inline gbs::IntMatrix m2(int a, int b, int c, int d) {
    return gbs::IntMatrix{{gbs::Int(a), gbs::Int(b)}, {gbs::Int(c), gbs::Int(d)}};
}

inline gbs::Lattice lat2(std::vector<std::pair<int, int>> cols) {
    std::vector<std::vector<gbs::Int>> gens;
    for (auto [a, b] : cols) gens.push_back({gbs::Int(a), gbs::Int(b)});
    return gbs::Lattice::from_generators(2, gens);
}

// Two sites, a (2I, I) loop at "pink" and a (2I, [[1,1],[1,4]]) edge to "orange".
inline std::shared_ptr<const gbs::GbsGraph> loop_edge() {
    return std::make_shared<gbs::GbsGraph>(
        2, std::vector<std::string>{"orange", "pink"},
        std::vector<gbs::GogEdge>{{"e0", "pink", "pink", m2(2, 0, 0, 2), m2(1, 0, 0, 1)},
                                  {"e1", "pink", "orange", m2(2, 0, 0, 2), m2(1, 1, 1, 4)}});
}

// Two sites joined by two edges carrying the printed example labels.
inline std::shared_ptr<const gbs::GbsGraph> two_edges() {
    return std::make_shared<gbs::GbsGraph>(
        2, std::vector<std::string>{"v", "w"},
        std::vector<gbs::GogEdge>{{"e", "v", "w", m2(1, 5, -2, 0), m2(-1, 8, 4, 5)},
                                  {"f", "v", "w", m2(7, -1, -3, -3), m2(-4, 1, 3, 9)}});
}

// Single loop with labels of determinant 4 and 2; non-unimodular HNN example.
inline std::shared_ptr<const gbs::GbsGraph> hnn_loop() {
    return std::make_shared<gbs::GbsGraph>(
        2, std::vector<std::string>{"v"},
        std::vector<gbs::GogEdge>{{"e", "v", "v", m2(2, 2, 2, 4), m2(1, 0, 0, 2)}});
}

// Rank-2 rose on two free generators acting by elementary shears.
inline gbs::RoseRep shear_rose() {
    return gbs::RoseRep{2, {m2(1, 2, 0, 1), m2(1, 0, 2, 1)}};
}

} // namespace fix

#endif // GBS_TESTS_FIXTURES_HPP
