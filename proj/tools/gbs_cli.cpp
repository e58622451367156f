// Command-line front door for the GBS toolkit: parses JSON inputs,
// dispatches to the library, and emits deterministic JSON/DOT/text.
//
// Exit codes: 0 success or positive verdict, 1 negative verdict,
// 2 unknown / budget exhausted, 64 usage, 65 input parse, 70 internal.

#include "gbs/json_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kExitPositive = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;
constexpr int kExitInternal = 70;

struct Output {
    std::string path; // empty: stdout
    void emit(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream out(path);
        if (!out) throw gbs::Error("cannot write '" + path + "'");
        out << text;
    }
};

std::string dir_of(const std::string& path) {
    return std::filesystem::path(path).parent_path().string();
}

gbs::HGraph load_hgraph(const std::string& path) {
    return gbs::hgraph_from_json(gbs::load_json_file(path), path, dir_of(path));
}

gbs::Lattice parse_label(const std::string& text, std::size_t d) {
    return gbs::lattice_from_basis_json(gbs::parse_json(text, "--label"), d, "--label");
}

std::string render_hgraph(const gbs::HGraph& hg, const std::string& format,
                          const std::string& base = "") {
    if (format == "dot") return gbs::export_dot(hg);
    return gbs::dump_json(gbs::to_json(hg, base));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact computations with generalized Baumslag-Solitar groups of rank d"};
    app.require_subcommand(1);

    std::string in_path, in_path2, site, label_text, label_a, label_b, out_path;
    std::string format = "json";
    std::size_t depth = 8, budget = 10000;
    std::vector<std::string> words, inputs, bases;

    auto add_common = [&](CLI::App* cmd, bool with_format = true) {
        cmd->add_option("--out", out_path, "write output to a file instead of stdout");
        if (with_format)
            cmd->add_option("--format", format, "output format")
                ->check(CLI::IsMember({"json", "dot", "text"}));
    };

    CLI::App* c_validate_gog = app.add_subcommand("validate-gog", "check a graph of groups");
    c_validate_gog->add_option("file", in_path)->required();

    CLI::App* c_reduce = app.add_subcommand("reduce", "contract unimodular non-loop edges");
    c_reduce->add_option("file", in_path)->required();
    add_common(c_reduce, false);

    CLI::App* c_amenable = app.add_subcommand("amenable", "amenability of the defined group");
    c_amenable->add_option("file", in_path)->required();

    CLI::App* c_unimodular = app.add_subcommand("unimodular", "unimodularity of the group");
    c_unimodular->add_option("file", in_path)->required();

    CLI::App* c_modular = app.add_subcommand("modular", "modular homomorphism generators");
    c_modular->add_option("file", in_path)->required();
    c_modular->add_option("--site", site, "base vertex")->required();
    add_common(c_modular);

    CLI::App* c_prime_set = app.add_subcommand("prime-set", "primes dividing half-edge labels");
    c_prime_set->add_option("file", in_path)->required();

    CLI::App* c_delta = app.add_subcommand("delta", "delta invariant of a full-rank label");
    c_delta->add_option("file", in_path)->required();
    c_delta->add_option("--label", label_text, "basis matrix (rows) of the label")->required();

    CLI::App* c_validate_h = app.add_subcommand("validate-hgraph", "check an H-graph");
    c_validate_h->add_option("file", in_path)->required();

    CLI::App* c_saturate = app.add_subcommand("saturate", "breadth-first saturation");
    c_saturate->add_option("file", in_path)->required();
    c_saturate->add_option("--depth", depth, "levels to grow");
    add_common(c_saturate);

    CLI::App* c_kernel = app.add_subcommand("kernel-check", "perfect-kernel semi-decision");
    c_kernel->add_option("file", in_path)->required();
    c_kernel->add_option("--depth", depth, "saturation depth budget");
    c_kernel->add_option("--budget", budget, "vertex cap (0 = none)");

    CLI::App* c_equiv = app.add_subcommand("equiv", "compare two labels at a site");
    c_equiv->add_option("file", in_path)->required();
    c_equiv->add_option("--site", site)->required();
    c_equiv->add_option("--a", label_a, "first label basis")->required();
    c_equiv->add_option("--b", label_b, "second label basis")->required();
    c_equiv->add_option("--depth", depth);
    c_equiv->add_option("--budget", budget);
    add_common(c_equiv);

    CLI::App* c_classify = app.add_subcommand("classify-label", "phenotype report of a label");
    c_classify->add_option("file", in_path)->required();
    c_classify->add_option("--site", site)->required();
    c_classify->add_option("--label", label_text)->required();
    c_classify->add_option("--budget", budget);
    add_common(c_classify, false);

    CLI::App* c_cycle = app.add_subcommand("cycle-witness", "non-simply-connected H-graph");
    c_cycle->add_option("file", in_path)->required();
    c_cycle->add_option("--site", site)->required();
    c_cycle->add_option("--label", label_text)->required();
    c_cycle->add_option("--depth", depth);
    add_common(c_cycle);

    CLI::App* c_merge = app.add_subcommand("merge", "chain pointed H-graphs at one site");
    c_merge->add_option("files", inputs, "pointed H-graph files")->required()->expected(-1);
    c_merge->add_option("--base", bases, "base vertex per file (overrides the files)");
    c_merge->add_option("--depth", depth);
    add_common(c_merge);

    CLI::App* c_dot = app.add_subcommand("export-dot", "render an H-graph as DOT");
    c_dot->add_option("file", in_path)->required();
    add_common(c_dot, false);

    CLI::App* c_semi = app.add_subcommand("semidirect", "the Z^d x| F_r case");
    c_semi->require_subcommand(1);
    CLI::App* s_fold = c_semi->add_subcommand("fold", "Stallings core of generated subgroup");
    s_fold->add_option("rose", in_path)->required();
    s_fold->add_option("--word", words, "generator word, e.g. \"a1 a2 A1\"")->required();
    add_common(s_fold, false);
    CLI::App* s_orbit = c_semi->add_subcommand("orbit", "lattice orbit under the rose action");
    s_orbit->add_option("rose", in_path)->required();
    s_orbit->add_option("--label", label_text)->required();
    s_orbit->add_option("--budget", budget);
    add_common(s_orbit, false);
    CLI::App* s_stab = c_semi->add_subcommand("stab", "stabilizer core of a lattice");
    s_stab->add_option("rose", in_path)->required();
    s_stab->add_option("--label", label_text)->required();
    s_stab->add_option("--budget", budget);
    add_common(s_stab, false);
    CLI::App* s_kernel = c_semi->add_subcommand("kernel", "perfect-kernel membership");
    s_kernel->add_option("rose", in_path)->required();
    s_kernel->add_option("rep", in_path2)->required();
    CLI::App* s_classify = c_semi->add_subcommand("classify", "piece classification data");
    s_classify->add_option("rose", in_path)->required();
    s_classify->add_option("--label", label_text)->required();
    s_classify->add_option("--budget", budget);
    add_common(s_classify, false);
    CLI::App* s_hgraph = c_semi->add_subcommand("hgraph", "H-graph of a subgroup rep");
    s_hgraph->add_option("rose", in_path)->required();
    s_hgraph->add_option("rep", in_path2)->required();
    std::string gog_path;
    s_hgraph->add_option("--gog", gog_path, "explicit graph-of-groups file");
    add_common(s_hgraph);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    Output out{out_path};
    try {
        if (*c_validate_gog) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            auto violations = gbs::validate_gog(*g);
            if (violations.empty()) {
                out.emit("ok\n");
                return kExitPositive;
            }
            std::string text;
            for (const auto& v : violations) text += v + "\n";
            out.emit(text);
            return kExitNegative;
        }
        if (*c_reduce) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            out.emit(gbs::dump_json(gbs::to_json(gbs::reduce(*g))));
            return kExitPositive;
        }
        if (*c_amenable) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            auto verdict = gbs::is_amenable(gbs::reduce(*g));
            out.emit(verdict.reason + "\n");
            return verdict.amenable ? kExitPositive : kExitNegative;
        }
        if (*c_unimodular) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            bool u = gbs::is_unimodular(*g);
            out.emit(std::string("unimodular: ") + (u ? "true" : "false") + "\n");
            return u ? kExitPositive : kExitNegative;
        }
        if (*c_modular) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            auto gens = gbs::modular_generators(*g, site);
            if (format == "json" || format == "dot") {
                gbs::Json j{{"site", site}, {"generators", gbs::Json::array()},
                            {"dets", gbs::Json::array()}};
                for (const auto& m : gens) {
                    j["generators"].push_back(gbs::to_json(m));
                    j["dets"].push_back(gbs::rat_to_string(gbs::det(m)));
                }
                out.emit(gbs::dump_json(j));
            } else {
                std::string text;
                for (const auto& m : gens) {
                    for (std::size_t i = 0; i < m.rows(); ++i) {
                        for (std::size_t c = 0; c < m.cols(); ++c)
                            text += (c ? " " : "") + gbs::rat_to_string(m(i, c));
                        text += "\n";
                    }
                    text += "det: " + gbs::rat_to_string(gbs::det(m)) + "\n";
                }
                if (gens.empty()) text = "trivial modular image (tree of groups)\n";
                out.emit(text);
            }
            return kExitPositive;
        }
        if (*c_prime_set) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            gbs::Json j = gbs::Json::array();
            for (const auto& p : gbs::prime_set(*g)) j.push_back(p.str());
            out.emit(gbs::dump_json(gbs::Json{{"primes", j}}));
            return kExitPositive;
        }
        if (*c_delta) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            auto l = parse_label(label_text, g->d());
            auto d = gbs::delta(*g, l);
            out.emit((d ? d->str() : std::string("undefined")) + "\n");
            return d ? kExitPositive : kExitNegative;
        }
        if (*c_validate_h) {
            auto hg = load_hgraph(in_path);
            auto violations = gbs::validate_hgraph(hg);
            if (violations.empty()) {
                bool sat = gbs::is_saturated(hg);
                out.emit(std::string("ok\nsaturated: ") + (sat ? "true" : "false") + "\n");
                return kExitPositive;
            }
            std::string text;
            for (const auto& v : violations) text += v + "\n";
            out.emit(text);
            return kExitNegative;
        }
        if (*c_saturate) {
            auto hg = load_hgraph(in_path);
            out.emit(render_hgraph(gbs::saturate(hg, depth), format));
            return kExitPositive;
        }
        if (*c_kernel) {
            auto hg = load_hgraph(in_path);
            auto res = gbs::close_or_grow(hg, depth, budget);
            if (res.status == gbs::CloseResult::Status::Finite) {
                out.emit("finite: saturation closed with " +
                         std::to_string(res.graph.vertices().size()) +
                         " vertices; the subgroup is NOT in the perfect kernel\n");
                return kExitNegative;
            }
            std::string text = "not closed within depth " + std::to_string(depth) +
                               "; frontier sizes:";
            for (auto s : res.frontier_sizes) text += " " + std::to_string(s);
            out.emit(text + "\n");
            return kExitUnknown;
        }
        if (*c_equiv) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            auto a = gbs::lattice_from_basis_json(gbs::parse_json(label_a, "--a"), g->d(), "--a");
            auto b = gbs::lattice_from_basis_json(gbs::parse_json(label_b, "--b"), g->d(), "--b");
            auto dec = gbs::equiv_decide(g, site, a, b, depth, budget);
            switch (dec.verdict) {
            case gbs::EquivDecision::Verdict::Equivalent:
                out.emit(render_hgraph(dec.witness->graph, format, dec.witness->from));
                return kExitPositive;
            case gbs::EquivDecision::Verdict::Distinguished:
                out.emit("distinguished by " + dec.invariant + "\n");
                return kExitNegative;
            default:
                out.emit("unknown within depth " + std::to_string(depth) + "\n");
                return kExitUnknown;
            }
        }
        if (*c_classify) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            auto l = parse_label(label_text, g->d());
            auto report = gbs::phenotype_report(*g, site, l, budget);
            out.emit(gbs::dump_json(gbs::to_json(report)));
            return report.span_orbit.closed ? kExitPositive : kExitUnknown;
        }
        if (*c_cycle) {
            auto g = gbs::gog_from_json(gbs::load_json_file(in_path), in_path);
            auto l = parse_label(label_text, g->d());
            auto hg = gbs::build_cycle_witness(g, site, l, depth);
            out.emit(render_hgraph(hg, format));
            return kExitPositive;
        }
        if (*c_merge) {
            std::vector<gbs::PointedHGraph> ps;
            for (std::size_t i = 0; i < inputs.size(); ++i) {
                gbs::Json j = gbs::load_json_file(inputs[i]);
                gbs::HGraph hg = gbs::hgraph_from_json(j, inputs[i], dir_of(inputs[i]));
                std::string base =
                    i < bases.size() ? bases[i] : gbs::hgraph_base_from_json(j);
                if (base.empty())
                    throw gbs::ParseError(inputs[i] + ": no base vertex (field or --base)");
                ps.push_back({std::move(hg), base});
            }
            auto merged = gbs::merge_same_phenotype(ps, depth);
            if (!merged) {
                out.emit("not found: no connecting witness within depth " +
                         std::to_string(depth) + "\n");
                return kExitUnknown;
            }
            out.emit(render_hgraph(*merged, format));
            return kExitPositive;
        }
        if (*c_dot) {
            out.emit(gbs::export_dot(load_hgraph(in_path)));
            return kExitPositive;
        }
        if (*c_semi) {
            auto rose = gbs::rose_from_json(gbs::load_json_file(in_path), in_path);
            if (*s_fold) {
                std::vector<gbs::FreeWord> ws;
                for (const auto& w : words) ws.push_back(gbs::FreeWord::parse(w));
                out.emit(gbs::dump_json(gbs::to_json(gbs::fold(rose.r(), ws))));
                return kExitPositive;
            }
            if (*s_orbit) {
                auto l = parse_label(label_text, rose.d);
                auto orbit = gbs::orbit_lattice(rose, l, budget);
                gbs::Json j{{"closed", orbit.closed}, {"lattices", gbs::Json::array()}};
                for (const auto& x : orbit.lattices) j["lattices"].push_back(gbs::to_json(x));
                out.emit(gbs::dump_json(j));
                return orbit.closed ? kExitPositive : kExitUnknown;
            }
            if (*s_stab) {
                auto l = parse_label(label_text, rose.d);
                if (l.rank() == rose.d) {
                    auto core = gbs::stabilizer_core(rose, l);
                    gbs::Json j = gbs::to_json(core);
                    j["index"] = core.size();
                    j["exact"] = true;
                    out.emit(gbs::dump_json(j));
                    return kExitPositive;
                }
                // rank-deficient: bounded word search, flagged approximation
                auto wordsample = gbs::stabilizer_words(rose, l, 6);
                gbs::Json j{{"exact", false},
                            {"note", "rank-deficient lattice: bounded word search only"},
                            {"stabilizer_words", gbs::Json::array()}};
                for (const auto& w : wordsample) j["stabilizer_words"].push_back(w.str());
                out.emit(gbs::dump_json(j));
                return kExitUnknown;
            }
            if (*s_kernel) {
                auto rep = gbs::rep_from_json(gbs::load_json_file(in_path2), rose.r(), in_path2);
                bool member = gbs::kernel_member(rep, rose);
                out.emit(std::string("in perfect kernel: ") + (member ? "true" : "false") + "\n");
                return member ? kExitPositive : kExitNegative;
            }
            if (*s_classify) {
                auto l = parse_label(label_text, rose.d);
                auto cls = gbs::classify_piece(rose, l, budget);
                auto tri = [](gbs::TriState t) {
                    return t == gbs::TriState::True
                               ? gbs::Json(true)
                               : t == gbs::TriState::False ? gbs::Json(false)
                                                           : gbs::Json("unknown");
                };
                gbs::Json j{{"p_closed", tri(cls.p_closed)},
                            {"d_empty", tri(cls.d_empty)},
                            {"case", cls.piece_case},
                            {"orbit_closed", cls.orbit_closed},
                            {"orbit_size", cls.orbit_size},
                            {"stabilizer_sample", gbs::Json::array()}};
                for (const auto& w : cls.stabilizer_sample)
                    j["stabilizer_sample"].push_back(w.str());
                out.emit(gbs::dump_json(j));
                bool known = cls.p_closed != gbs::TriState::Unknown &&
                             cls.d_empty != gbs::TriState::Unknown;
                return known ? kExitPositive : kExitUnknown;
            }
            if (*s_hgraph) {
                auto rep = gbs::rep_from_json(gbs::load_json_file(in_path2), rose.r(), in_path2);
                std::shared_ptr<const gbs::GbsGraph> gog =
                    gog_path.empty()
                        ? gbs::rose_gog(rose)
                        : gbs::gog_from_json(gbs::load_json_file(gog_path), gog_path);
                auto ph = gbs::hgraph_of_subgroup(rep, rose, gog);
                out.emit(render_hgraph(ph.graph, format, ph.base));
                return kExitPositive;
            }
        }
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const gbs::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitParse;
    } catch (const gbs::SearchExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitUnknown;
    } catch (const gbs::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const gbs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNegative;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
