#include "gbs/phenotype.hpp"

#include "fixtures.hpp"
#include "generators.hpp"

#include <catch_amalgamated.hpp>

using namespace gbs;
using fix::lat2;

TEST_CASE("prime_set") {
    auto ps = prime_set(*fix::loop_edge()); // half-edge dets 4, 1, 4, 3
    CHECK(ps == std::set<Int>{Int(2), Int(3)});
    CHECK(prime_set(*fix::hnn_loop()) == std::set<Int>{Int(2)}); // dets 4, 2
    GbsGraph uni(2, {"v"},
                 {{"e", "v", "v", fix::m2(1, 2, 0, 1), IntMatrix::identity(2)}});
    CHECK(prime_set(uni).empty());
}

TEST_CASE("delta") {
    auto h = fix::loop_edge();
    auto c = fix::hnn_loop();
    CHECK(*delta(*h, Lattice::full(2)) == 1);
    CHECK(*delta(*c, lat2({{3, 0}, {0, 3}})) == 9); // det 9, prime 3 outside {2}
    CHECK(*delta(*h, lat2({{2, 0}, {0, 2}})) == 1); // det 4, 2 in the prime set
    CHECK(!delta(*h, lat2({{1, 0}})).has_value());  // undefined below full rank
    CHECK(*delta(*h, lat2({{5, 0}, {0, 5}})) == 25);
}

TEST_CASE("delta is invariant along valid H-edges") {
    gen::Rng rng(501);
    for (int it = 0; it < 200; ++it) {
        std::size_t d = std::size_t(gen::uniform(rng, 1, 3));
        auto g = gen::gog(rng, d, std::size_t(gen::uniform(rng, 1, 3)),
                          std::size_t(gen::uniform(rng, 0, 2)), -4, 4);
        const GogEdge& e = g->edges()[std::size_t(
            gen::uniform(rng, 0, int(g->edges().size()) - 1))];
        Lattice l0 = gen::full_rank_lattice(rng, d, -4, 4);
        Lattice l1 = propagate_label(*g, {e.id, false}, l0);
        REQUIRE(l1.rank() == d);
        CHECK(*delta(*g, l0) == *delta(*g, l1));
    }
}

TEST_CASE("delta is coprime to the prime set") {
    gen::Rng rng(502);
    for (int it = 0; it < 100; ++it) {
        std::size_t d = std::size_t(gen::uniform(rng, 1, 3));
        auto g = gen::gog(rng, d, 1, 1, -4, 4);
        Lattice l = gen::full_rank_lattice(rng, d, -5, 5);
        Int dv = *delta(*g, l);
        for (const Int& p : prime_set(*g)) CHECK(dv % p != 0);
    }
}

TEST_CASE("modular_span_orbit") {
    // trivial modular image: a single class
    GbsGraph tree(2, {"a", "b"},
                  {{"e", "a", "b", fix::m2(2, 2, 2, 4), fix::m2(3, 0, 1, 2)}});
    auto triv = modular_span_orbit(tree, "a", lat2({{1, 0}}), 10);
    CHECK(triv.closed);
    CHECK(triv.classes.size() == 1);

    // the non-unimodular loop pushes the line span forever
    auto orb = modular_span_orbit(*fix::hnn_loop(), "v", lat2({{1, 0}}), 10);
    CHECK(!orb.closed);
    CHECK(orb.classes.size() == 10);
    for (std::size_t i = 0; i < orb.classes.size(); ++i)
        for (std::size_t j = i + 1; j < orb.classes.size(); ++j)
            CHECK(!commensurable(orb.classes[i], orb.classes[j]));

    // full-rank spans are all commensurable: one class
    auto full = modular_span_orbit(*fix::hnn_loop(), "v", lat2({{2, 0}, {0, 2}}), 10);
    CHECK(full.closed);
    CHECK(full.classes.size() == 1);
    CHECK(full.classes.front() == Lattice::full(2));
}

TEST_CASE("span orbit members map onto each other under the generators") {
    auto g = fix::hnn_loop();
    auto orb = modular_span_orbit(*g, "v", lat2({{1, 0}}), 8);
    auto gens = modular_generators(*g, "v");
    std::vector<RatMatrix> moves;
    for (const RatMatrix& m : gens) {
        moves.push_back(m);
        moves.push_back(rat_inverse(m));
    }
    for (const Lattice& cls : orb.classes) {
        if (cls == orb.classes.front()) continue;
        bool hit = false;
        for (const Lattice& other : orb.classes)
            for (const RatMatrix& m : moves)
                if (span_class(m, other) == cls) hit = true;
        CHECK(hit);
    }
}

TEST_CASE("cor_criterion") {
    auto c = fix::hnn_loop();
    CHECK(cor_criterion(*c, "v", lat2({{1, 0}}), 10) == CorCriterion::Satisfied);

    GbsGraph tree(2, {"a", "b"},
                  {{"e", "a", "b", fix::m2(2, 2, 2, 4), fix::m2(3, 0, 1, 2)}});
    CHECK(cor_criterion(tree, "a", lat2({{1, 0}}), 10) == CorCriterion::Violated);

    CHECK(cor_criterion(*c, "v", lat2({{1, 0}}), 0) == CorCriterion::Unknown);
    CHECK_THROWS_AS(cor_criterion(*c, "v", Lattice::full(2), 10), BadRank);
    CHECK_THROWS_AS(cor_criterion(*c, "v", Lattice::zero(2), 10), BadRank);
}

TEST_CASE("equiv_decide") {
    auto h = fix::loop_edge();
    auto dec = equiv_decide(h, "pink", lat2({{1, 0}}), lat2({{2, 0}}), 4);
    REQUIRE(dec.verdict == EquivDecision::Verdict::Equivalent);
    REQUIRE(dec.witness.has_value());
    CHECK(validate_hgraph(dec.witness->graph).empty());

    auto same = equiv_decide(h, "pink", lat2({{1, 0}}), lat2({{1, 0}}), 4);
    CHECK(same.verdict == EquivDecision::Verdict::Equivalent);
    CHECK(same.witness->steps.empty());

    auto c = fix::hnn_loop();
    auto dist = equiv_decide(c, "v", Lattice::full(2), lat2({{3, 0}, {0, 3}}), 4);
    REQUIRE(dist.verdict == EquivDecision::Verdict::Distinguished);
    CHECK(dist.invariant == "delta: 1 vs 9");

    auto ranks = equiv_decide(h, "pink", Lattice::full(2), lat2({{1, 0}}), 4);
    REQUIRE(ranks.verdict == EquivDecision::Verdict::Distinguished);
    CHECK(ranks.invariant.find("rank") == 0);

    GbsGraph semis(2, {"v"},
                   {{"e1", "v", "v", fix::m2(1, 2, 0, 1), IntMatrix::identity(2)},
                    {"e2", "v", "v", fix::m2(1, 0, 2, 1), IntMatrix::identity(2)}});
    auto sp = std::make_shared<GbsGraph>(semis);
    CHECK_THROWS_AS(equiv_decide(sp, "v", Lattice::full(2), Lattice::full(2), 2),
                    UnsupportedShape);
}

TEST_CASE("class_finiteness_probe") {
    auto h = fix::loop_edge();
    auto zero = class_finiteness_probe(*h, "pink", Lattice::zero(2), 100);
    CHECK(zero.finite);
    CHECK(zero.count == 1);

    auto c = fix::hnn_loop();
    auto line = class_finiteness_probe(*c, "v", lat2({{1, 0}}), 60);
    CHECK(!line.finite);
}

TEST_CASE("phenotype_report") {
    auto c = fix::hnn_loop();
    PhenotypeReport r = phenotype_report(*c, "v", lat2({{3, 0}, {0, 3}}), 10);
    CHECK(r.site == "v");
    CHECK(r.rank == 2);
    CHECK(*r.delta == 9);
    CHECK(r.span_orbit.closed);

    PhenotypeReport s = phenotype_report(*c, "v", lat2({{1, 0}}), 5);
    CHECK(s.rank == 1);
    CHECK(!s.delta.has_value());
    CHECK(!s.span_orbit.closed);
    CHECK(s.span_orbit.classes.size() == 5);
}
