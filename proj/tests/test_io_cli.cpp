#include "gbs/json_io.hpp"

#include "fixtures.hpp"
#include "generators.hpp"

#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

using namespace gbs;

namespace {

struct RunResult {
    int code;
    std::string out;
};

// run the CLI (path from the GBS_CLI environment variable) and capture stdout
RunResult run_cli(const std::string& args) {
    const char* cli = std::getenv("GBS_CLI");
    REQUIRE(cli != nullptr);
    std::string cmd = std::string(cli) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& name) { return std::string(GBS_DATA_DIR) + "/" + name; }

} // namespace

TEST_CASE("matrix and lattice JSON") {
    IntMatrix m = fix::m2(1, -5, 0, 7);
    CHECK(int_matrix_from_json(to_json(m), "t") == m);
    // numeric entries are accepted on input
    CHECK(int_matrix_from_json(parse_json("[[1,-5],[0,7]]", "t"), "t") == m);

    Lattice l = fix::lat2({{2, 2}, {2, 4}});
    CHECK(lattice_from_json(to_json(l), "t") == l);
    // non-canonical bases canonicalize on load
    Json skew{{"dim", 2}, {"basis", Json::array({Json::array({"2", "2"}),
                                                 Json::array({"2", "4"})})}};
    CHECK(lattice_from_json(skew, "t") == l);
}

TEST_CASE("gog JSON round-trip") {
    auto g = fix::two_edges();
    auto back = gog_from_json(to_json(*g), "t");
    CHECK(to_json(*back) == to_json(*g));
    CHECK_THROWS_AS(gog_from_json(parse_json("{\"d\": 2}", "t"), "t"), ParseError);
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse_json("{\n  \"d\": oops\n}", "buffer");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
    }
}

TEST_CASE("rose and rep JSON") {
    RoseRep rose = fix::shear_rose();
    RoseRep back = rose_from_json(to_json(rose), "t");
    CHECK(back.d == rose.d);
    CHECK(back.mats == rose.mats);

    Json rep_json{{"lattice", to_json(fix::lat2({{1, 0}}))},
                  {"core_words", Json::array({"a1"})},
                  {"lifts", Json::array({Json::array({"0", "0"})})}};
    SubgroupRep rep = rep_from_json(rep_json, 2, "t");
    CHECK(rep.lattice == fix::lat2({{1, 0}}));
    CHECK(rep.core.size() == 1);
}

TEST_CASE("cli: byte-identical reruns") {
    auto a = run_cli("modular " + data("gbs_two_edges.json") + " --site v");
    auto b = run_cli("modular " + data("gbs_two_edges.json") + " --site v");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto c = run_cli("saturate " + data("hgraph_line_vertex.json") + " --depth 2");
    auto d = run_cli("saturate " + data("hgraph_line_vertex.json") + " --depth 2");
    CHECK(c.code == 0);
    CHECK(c.out == d.out);
}

TEST_CASE("cli: modular emits the exact generator") {
    auto r = run_cli("modular " + data("gbs_two_edges.json") + " --site v");
    REQUIRE(r.code == 0);
    Json j = parse_json(r.out, "cli");
    REQUIRE(j["generators"].size() == 1);
    RatMatrix expected{{Rat(-1026, 390), Rat(-903, 390)}, {Rat(138, 390), Rat(459, 390)}};
    CHECK(j["generators"][0] == to_json(expected));
    // emitted JSON re-parses under the library schema
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t c = 0; c < 2; ++c)
            CHECK(parse_rat(j["generators"][0][i][c].get<std::string>()) == expected(i, c));
}

TEST_CASE("cli: exit codes partition outcomes") {
    CHECK(run_cli("validate-gog " + data("gbs_loop_edge.json")).code == 0);
    CHECK(run_cli("amenable " + data("loop_2I_I.json")).code == 0);
    CHECK(run_cli("amenable " + data("gbs_hnn_loop.json")).code == 1);
    CHECK(run_cli("unimodular " + data("gbs_hnn_loop.json")).code == 1);
    CHECK(run_cli("validate-hgraph " + data("hgraph_three_vertex.json")).code == 0);
    CHECK(run_cli("validate-hgraph " + data("hgraph_figure_full.json")).code == 1);
    CHECK(run_cli("kernel-check " + data("hgraph_whole_group.json")).code == 1);
    CHECK(run_cli("kernel-check " + data("hgraph_zero_vertex.json") + " --depth 4").code == 2);
    // equiv: positive, negative, unknown
    std::string h0 = data("gbs_loop_edge.json");
    CHECK(run_cli("equiv " + h0 + " --site pink --a \"[[1],[0]]\" --b \"[[2],[0]]\" --depth 4")
              .code == 0);
    std::string hnn = data("gbs_hnn_loop.json");
    CHECK(run_cli("equiv " + hnn +
                  " --site v --a \"[[1,0],[0,1]]\" --b \"[[3,0],[0,3]]\" --depth 3")
              .code == 1);
    CHECK(run_cli("equiv " + h0 +
                  " --site pink --a \"[[1,0],[0,1]]\" --b \"[[3,0],[0,3]]\" --depth 3")
              .code == 2);
    // usage and parse errors
    CHECK(run_cli("no-such-command").code == 64);
    CHECK(run_cli("validate-gog /nonexistent.json").code == 65);
    CHECK(run_cli("delta " + h0 + " --label \"[[1],[0]\"").code == 65);
    // delta: defined vs undefined
    CHECK(run_cli("delta " + h0 + " --label \"[[2,0],[0,2]]\"").code == 0);
    CHECK(run_cli("delta " + h0 + " --label \"[[1],[0]]\"").code == 1);
}

TEST_CASE("cli: amenable verdict text") {
    auto r = run_cli("amenable " + data("loop_2I_I.json"));
    CHECK(r.out.find("single loop with unimodular label") != std::string::npos);
}

TEST_CASE("cli: semidirect subcommands") {
    std::string rose = data("rose_free2.json");
    std::string rep = data("rep_line.json");
    auto fold = run_cli("semidirect fold " + rose + " --word \"a1 a2 A1\"");
    CHECK(fold.code == 0);
    Json fj = parse_json(fold.out, "cli");
    CHECK(fj["num_vertices"] == 2);

    CHECK(run_cli("semidirect orbit " + rose + " --label \"[[1],[0]]\" --budget 20").code == 2);
    CHECK(run_cli("semidirect orbit " + rose + " --label \"[[2,0],[0,2]]\"").code == 0);
    CHECK(run_cli("semidirect kernel " + rose + " " + rep).code == 0);
    CHECK(run_cli("semidirect stab " + rose + " --label \"[[1,0],[0,1]]\"").code == 0);
    CHECK(run_cli("semidirect stab " + rose + " --label \"[[1],[0]]\"").code == 2);

    auto cls = run_cli("semidirect classify " + rose + " --label \"[[1],[0]]\" --budget 20");
    CHECK(cls.code == 0);
    Json cj = parse_json(cls.out, "cli");
    CHECK(cj["case"].get<std::string>().find("D_C = P_C") != std::string::npos);

    auto hg = run_cli("semidirect hgraph " + rose + " " + rep);
    CHECK(hg.code == 0);
    Json hj = parse_json(hg.out, "cli");
    CHECK(hj["vertices"].size() == 1);
    CHECK(hj["edges"].size() == 1);
}

TEST_CASE("cli: merge and export-dot") {
    std::string line = data("hgraph_line_vertex.json");
    auto merged = run_cli("merge " + line + " " + line + " --depth 6");
    CHECK(merged.code == 0);
    Json mj = parse_json(merged.out, "cli");
    CHECK(mj["vertices"].size() >= 3);

    auto dot = run_cli("export-dot " + data("hgraph_three_vertex.json"));
    CHECK(dot.code == 0);
    CHECK(dot.out.find("digraph") == 0);

    auto cyc = run_cli("cycle-witness " + data("gbs_loop_edge.json") +
                       " --site pink --label \"[[1,0],[0,1]]\"");
    CHECK(cyc.code == 0);
}
