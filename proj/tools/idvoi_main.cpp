// idvoi: analyze limited-memory influence diagrams, build witness models
// for positive value of information / control, and solve them exactly.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "idvoi/analysis.hpp"
#include "idvoi/errors.hpp"
#include "idvoi/fixtures.hpp"
#include "idvoi/json_io.hpp"
#include "idvoi/normalize.hpp"
#include "idvoi/solver.hpp"
#include "idvoi/witness.hpp"

namespace {

using namespace idvoi;

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("BadInput", "cannot open '" + path + "'");
    Json j;
    in >> j;
    return j;
}

void emit(const Json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw Error("BadInput", "cannot write '" + out_path + "'");
        out << j.dump(2) << "\n";
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("BadInput", "cannot write '" + path + "'");
    out << content;
}

std::string verdict_name(CriterionVerdict v) {
    switch (v) {
        case CriterionVerdict::Positive: return "positive";
        case CriterionVerdict::Zero: return "zero";
        case CriterionVerdict::NotApplicable: return "not_applicable";
    }
    return "not_applicable";
}

Json solution_json(const Solution& s) {
    Json out;
    out["eu"] = s.optimal_eu.str();
    out["eu_decimal"] = s.optimal_eu.to_double();
    out["method"] = s.method;
    if (s.optimal_count) out["optimal_count"] = *s.optimal_count;
    out["policy"] = policy_to_json(s.policy);
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"value-of-information analysis for limited-memory influence diagrams"};
    app.require_subcommand(1);

    std::string graph_path, model_path, tree_path, out_path, out_dir, dot_path;
    std::string node_a, node_b, node_x, node_d;
    std::vector<std::string> given;
    std::vector<std::string> link;
    std::vector<std::string> task_args;
    std::string method = "auto";
    long long seed = 0;
    SolverLimits limits;
    std::size_t bitstring_cap = 8;
    bool voc_no_parents = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "write the JSON report here instead of stdout");
        cmd->add_option("--seed", seed, "seed recorded in the report");
        cmd->add_option("--policy-bound", limits.enumeration_bound, "policy-space cap");
        cmd->add_option("--bitstring-cap", bitstring_cap, "bitstring length cap");
    };

    CLI::App* check = app.add_subcommand("check", "validate a graph and decide solubility");
    check->add_option("--graph", graph_path)->required();
    add_common(check);

    CLI::App* dsep = app.add_subcommand("dsep", "d-separation query with witness path");
    dsep->add_option("--graph", graph_path)->required();
    dsep->add_option("--a", node_a)->required();
    dsep->add_option("--b", node_b)->required();
    dsep->add_option("--given", given, "conditioning nodes");
    add_common(dsep);

    CLI::App* analyze = app.add_subcommand("analyze", "solubility, reduction and both criteria");
    analyze->add_option("--graph", graph_path)->required();
    analyze->add_option("--dot", dot_path, "write a DOT rendering with removed links dashed");
    add_common(analyze);

    CLI::App* tree = app.add_subcommand("tree", "build or check a tree of systems");
    tree->require_subcommand(1);
    CLI::App* tree_build = tree->add_subcommand("build", "full tree on the minimal d-reduction");
    tree_build->add_option("--graph", graph_path)->required();
    tree_build->add_option("--x", node_x)->required();
    tree_build->add_option("--d", node_d)->required();
    add_common(tree_build);
    CLI::App* tree_check = tree->add_subcommand("check", "validate a tree and its normal form");
    tree_check->add_option("--graph", graph_path)->required();
    tree_check->add_option("--tree", tree_path)->required();
    add_common(tree_check);

    CLI::App* hom = app.add_subcommand("hom", "verify or compose homomorphisms");
    hom->require_subcommand(1);
    std::string hom_path, inner_path;
    CLI::App* hom_verify = hom->add_subcommand("verify", "check the four conditions");
    hom_verify->add_option("--hom", hom_path)->required();
    add_common(hom_verify);
    CLI::App* hom_compose = hom->add_subcommand("compose", "outer after inner");
    hom_compose->add_option("--outer", hom_path)->required();
    hom_compose->add_option("--inner", inner_path)->required();
    add_common(hom_compose);

    CLI::App* normalize = app.add_subcommand("normalize", "run the transformation pipeline");
    normalize->add_option("--graph", graph_path)->required();
    std::vector<std::string> infolink;
    normalize->add_option("--infolink", infolink, "observation and decision")->expected(2);
    normalize->add_option("--x", node_x);
    normalize->add_option("--d", node_d);
    normalize->add_option("--out-dir", out_dir, "directory for per-stage artifacts");
    add_common(normalize);

    CLI::App* witness = app.add_subcommand("witness", "construct and certify a witness model");
    witness->require_subcommand(1);
    CLI::App* wit_voi = witness->add_subcommand("voi", "value-of-information witness");
    wit_voi->add_option("--graph", graph_path)->required();
    wit_voi->add_option("--node", node_x)->required();
    wit_voi->add_option("--decision", node_d)->required();
    add_common(wit_voi);
    CLI::App* wit_voc = witness->add_subcommand("voc", "value-of-control witness");
    wit_voc->add_option("--graph", graph_path)->required();
    wit_voc->add_option("--node", node_x)->required();
    add_common(wit_voc);

    CLI::App* solve_cmd = app.add_subcommand("solve", "exact policy optimization");
    solve_cmd->add_option("--model", model_path)->required();
    solve_cmd->add_option("--method", method)->check(CLI::IsMember({"auto", "enum", "bi"}));
    add_common(solve_cmd);

    CLI::App* voi_cmd = app.add_subcommand("voi", "numeric value of information for a link");
    voi_cmd->add_option("--model", model_path)->required();
    voi_cmd->add_option("--link", link, "observation and decision")->expected(2)->required();
    add_common(voi_cmd);

    CLI::App* voc_cmd = app.add_subcommand("voc", "numeric value of control for a node");
    voc_cmd->add_option("--model", model_path)->required();
    voc_cmd->add_option("--node", node_x)->required();
    voc_cmd->add_flag("--constant-intervention", voc_no_parents,
                      "restrict interventions to constants instead of functions of the parents");
    add_common(voc_cmd);

    CLI::App* taskify_cmd = app.add_subcommand("taskify", "extend a model with identity tasks");
    taskify_cmd->add_option("--graph", graph_path)->required();
    taskify_cmd->add_option("--model", model_path)->required();
    taskify_cmd
        ->add_option("--task", task_args,
                     "a decision followed by the parent it must copy; repeatable")
        ->expected(-2)
        ->required();
    add_common(taskify_cmd);

    CLI::App* fixtures_cmd = app.add_subcommand("fixtures", "write a named example graph");
    std::string fixture_name;
    fixtures_cmd->add_option("name", fixture_name, "one of F1 F2 F3 F4 F5 F5c F6 F7")->required();
    fixtures_cmd->add_option("--dir", out_dir, "output directory (default .)");
    add_common(fixtures_cmd);

    CLI11_PARSE(app, argc, argv);

    Json report;
    report["seed"] = seed;

    if (*check) {
        IdGraph g = graph_from_json(load_json(graph_path));
        SolubilityResult sol = is_soluble(g);
        report["soluble"] = sol.soluble;
        if (sol.soluble) {
            report["ordering"] = sol.ordering;
            std::cerr << "soluble\n";
        } else {
            std::cerr << "insoluble\n";
            if (sol.failing_pair) {
                report["failing_pair"] = {{"policy_node", sol.failing_pair->policy_node},
                                          {"decision", sol.failing_pair->decision},
                                          {"witness", sol.failing_pair->witness.nodes}};
            }
        }
        emit(report, out_path);
        return 0;
    }

    if (*dsep) {
        IdGraph g = graph_from_json(load_json(graph_path));
        std::set<NodeId> z(given.begin(), given.end());
        bool separated = d_separated(g, {node_a}, {node_b}, z);
        report["separated"] = separated;
        if (!separated) {
            if (auto p = find_active_path(g, node_a, node_b, z)) {
                report["witness"] = p->nodes;
                std::cerr << "connected: " << p->str() << "\n";
            } else {
                std::cerr << "connected\n";
            }
        } else {
            std::cerr << "separated\n";
        }
        emit(report, out_path);
        return 0;
    }

    if (*analyze) {
        IdGraph g = graph_from_json(load_json(graph_path));
        SolubilityResult sol = is_soluble(g);
        report["soluble"] = sol.soluble;
        if (sol.soluble) report["ordering"] = sol.ordering;
        auto [reduced, trace] = minimal_d_reduction(g);
        Json removed = Json::array();
        std::vector<std::pair<NodeId, NodeId>> removed_edges;
        for (const auto& r : trace.removals) {
            removed.push_back(Json::array({r.from, r.to}));
            removed_edges.push_back({r.from, r.to});
        }
        report["removed_links"] = removed;
        Json voi_report = Json::object();
        for (const auto& [a, b] : g.edges()) {
            if (!g.is_decision(b) || !g.is_chance(a)) continue;
            voi_report[a + "->" + b] = verdict_name(voi_criterion(g, a, b).verdict);
        }
        report["voi"] = voi_report;
        Json voc_report = Json::object();
        for (const auto& x : g.chance_nodes())
            voc_report[x] = verdict_name(voc_criterion(g, x).verdict);
        report["voc"] = voc_report;
        if (!dot_path.empty()) write_file(dot_path, graph_to_dot(reduced, removed_edges));
        std::cerr << (sol.soluble ? "soluble" : "insoluble") << ", " << trace.removals.size()
                  << " nonrequisite links removed\n";
        emit(report, out_path);
        return 0;
    }

    if (*tree_build) {
        IdGraph g = graph_from_json(load_json(graph_path));
        IdGraph gstar = minimal_d_reduction(g).first;
        if (!gstar.has_edge(node_x, node_d))
            throw Error("CriterionFails", "infolink not in the minimal d-reduction");
        SystemTree t = build_full_tree(gstar, node_x, node_d);
        report["tree"] = tree_to_json(t);
        report["systems"] = t.systems.size();
        std::cerr << t.systems.size() << " systems\n";
        emit(report, out_path);
        return 0;
    }

    if (*tree_check) {
        IdGraph g = graph_from_json(load_json(graph_path));
        Json tj = load_json(tree_path);
        SystemTree t = tree_from_json(tj.contains("tree") ? tj.at("tree") : tj, g);
        auto problems = validate_tree(g, t);
        report["valid"] = problems.empty();
        report["problems"] = problems;
        if (problems.empty()) {
            NormalFormVerdict nf = normal_form_check(g, t);
            report["normal_form"] = {{"position_uniqueness", nf.position_uniqueness},
                                     {"no_backdoor_infopaths", nf.no_backdoor_infopaths},
                                     {"no_redundant_links", nf.no_redundant_links},
                                     {"witnesses", nf.witnesses}};
        }
        std::cerr << (problems.empty() ? "valid" : "invalid") << "\n";
        emit(report, out_path);
        return problems.empty() ? 0 : 1;
    }

    if (*hom_verify) {
        IdHom h = hom_from_json(load_json(hom_path));
        HomVerdict v = verify(h);
        report["ok"] = v.ok();
        Json violations = Json::array();
        for (const auto& viol : v.violations)
            violations.push_back({{"condition", std::string(1, viol.condition)},
                                  {"witness", viol.witness},
                                  {"detail", viol.detail}});
        report["violations"] = violations;
        std::cerr << (v.ok() ? "homomorphism" : "not a homomorphism") << "\n";
        emit(report, out_path);
        return v.ok() ? 0 : 2;
    }

    if (*hom_compose) {
        IdHom outer = hom_from_json(load_json(hom_path));
        IdHom inner = hom_from_json(load_json(inner_path));
        if (!verify(outer).ok() || !verify(inner).ok())
            throw Error("DomainMismatch", "compose requires two valid homomorphisms");
        IdHom composed = compose(outer, inner);
        report["hom"] = hom_to_json(composed);
        std::cerr << "composed\n";
        emit(report, out_path);
        return 0;
    }

    if (*normalize) {
        IdGraph g = graph_from_json(load_json(graph_path));
        if (infolink.size() == 2) {
            node_x = infolink[0];
            node_d = infolink[1];
        }
        if (node_x.empty() || node_d.empty())
            throw Error("BadInput", "normalize needs --infolink X D (or --x/--d)");
        NormalFormResult r = to_normal_form(g, node_x, node_d);
        report["graph"] = graph_to_json(r.graph());
        report["tree"] = tree_to_json(r.tree());
        report["hom"] = hom_to_json(r.hom);
        if (!out_dir.empty()) {
            write_file(out_dir + "/stage0_graph.json", graph_to_json(r.original).dump(2));
            write_file(out_dir + "/stage0_tree.json", tree_to_json(r.full_tree).dump(2));
            for (int k = 1; k <= 3; ++k) {
                const TransformResult& s = k == 1 ? r.stage1 : k == 2 ? r.stage2 : r.stage3;
                std::string base = out_dir + "/stage" + std::to_string(k);
                write_file(base + "_graph.json", graph_to_json(s.graph).dump(2));
                write_file(base + "_tree.json", tree_to_json(s.tree).dump(2));
                write_file(base + "_hom.json", hom_to_json(s.hom).dump(2));
            }
            write_file(out_dir + "/hom.json", hom_to_json(r.hom).dump(2));
        }
        std::cerr << "normal form tree with " << r.tree().systems.size() << " systems\n";
        emit(report, out_path);
        return 0;
    }

    if (*wit_voi || *wit_voc) {
        IdGraph g = graph_from_json(load_json(graph_path));
        WitnessReport rep = *wit_voi ? voi_witness(g, node_x, node_d, limits, bitstring_cap)
                                     : voc_witness(g, node_x, limits, bitstring_cap);
        Json j = witness_report_to_json(rep);
        j["seed"] = seed;
        std::cerr << (rep.kind == "voi" ? "voi = " : "voc = ") << rep.value.str() << " ("
                  << rep.value.to_double() << ")\n";
        emit(j, out_path);
        return 0;
    }

    if (*solve_cmd) {
        IdModel m = model_from_json(load_json(model_path));
        ModelVerdict v = validate_model(m);
        if (!v.ok()) throw Error("BadModelJson", v.problems.front());
        Solution s;
        if (method == "enum") {
            s = enumerate_optimal(m, limits);
        } else if (method == "bi") {
            SolubilityResult sol = is_soluble(m.graph);
            if (!sol.soluble) throw Error("OrderingInvalid", "graph is insoluble");
            s = backward_induction(m, sol.ordering, limits);
        } else {
            s = solve(m, limits);
        }
        report.update(solution_json(s));
        std::cerr << "EU* = " << s.optimal_eu.str() << " (" << s.optimal_eu.to_double()
                  << ") via " << s.method << "\n";
        emit(report, out_path);
        return 0;
    }

    if (*voi_cmd) {
        IdModel m = model_from_json(load_json(model_path));
        Rational v = voi(m, link.at(0), link.at(1), limits);
        report["voi"] = v.str();
        report["voi_decimal"] = v.to_double();
        std::cerr << "voi = " << v.str() << " (" << v.to_double() << ")\n";
        emit(report, out_path);
        return 0;
    }

    if (*voc_cmd) {
        IdModel m = model_from_json(load_json(model_path));
        Rational v = voc(m, node_x, !voc_no_parents, limits);
        report["voc"] = v.str();
        report["voc_decimal"] = v.to_double();
        std::cerr << "voc = " << v.str() << " (" << v.to_double() << ")\n";
        emit(report, out_path);
        return 0;
    }

    if (*taskify_cmd) {
        IdGraph g = graph_from_json(load_json(graph_path));
        IdModel m = model_from_json(load_json(model_path));
        if (task_args.size() % 2 != 0)
            throw Error("BadInput", "--task expects decision/parent pairs");
        std::vector<Task> tasks;
        for (std::size_t i = 0; i + 1 < task_args.size(); i += 2)
            tasks.push_back(
                Task::identity(task_args[i], task_args[i + 1], m.domains.at(task_args[i + 1]).size()));
        TaskifyResult r = taskify(g, m, tasks, bitstring_cap);
        report["graph"] = graph_to_json(r.graph);
        report["model"] = model_to_json(r.model);
        report["hom"] = hom_to_json(r.hom);
        std::cerr << r.stages.size() << " tasks assigned\n";
        emit(report, out_path);
        return 0;
    }

    if (*fixtures_cmd) {
        Fixture f = fixture(fixture_name);
        std::string dir = out_dir.empty() ? "." : out_dir;
        Json gj = graph_to_json(f.graph);
        if (f.name == "F3")
            gj["note"] =
                "reconstructed two-decision example; both decisions observe X, the second relays "
                "it; witness models are generated on demand by `idvoi witness voi`";
        if (f.name == "F5" || f.name == "F5c")
            gj["note"] = "supervision setting truncated to two timesteps; the agent sees only the "
                         "suggested action";
        write_file(dir + "/" + f.name + ".graph.json", gj.dump(2));
        std::cerr << "wrote " << dir << "/" << f.name << ".graph.json\n";
        if (f.model) {
            write_file(dir + "/" + f.name + ".model.json", model_to_json(*f.model).dump(2));
            std::cerr << "wrote " << dir << "/" << f.name << ".model.json\n";
        }
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const idvoi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const std::string& code = e.code();
        if (code == "TooLarge" || code == "DomainBlowup") return 3;
        if (code == "CriterionFails" || code == "Insoluble" || code == "NotRequisite" ||
            code == "TaskNotInReduction" || code == "OrderingInvalid" || code == "NotApplicable")
            return 2;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
