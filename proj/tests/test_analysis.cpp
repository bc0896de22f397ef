#include "doctest.h"
#include "idvoi/analysis.hpp"
#include "idvoi/errors.hpp"
#include "idvoi/fixtures.hpp"
#include "test_support.hpp"

using namespace idvoi;

namespace {
constexpr NodeKind C = NodeKind::Chance;
constexpr NodeKind D = NodeKind::Decision;
constexpr NodeKind U = NodeKind::Utility;

IdGraph chain_xdu() { return IdGraph::build({{"X", C}, {"D", D}, {"U", U}}, {{"X", "D"}, {"D", "U"}}); }
}  // namespace

TEST_CASE("solubility of the fixtures") {
    SolubilityResult f1 = is_soluble(fixture("F1").graph);
    CHECK(f1.soluble);
    CHECK(f1.ordering == std::vector<NodeId>{"D"});

    CHECK(is_soluble(fixture("F2").graph).soluble);
    CHECK(is_soluble(fixture("F3").graph).soluble);
    CHECK(is_soluble(fixture("F5").graph).soluble);

    SolubilityResult f6 = is_soluble(fixture("F6").graph);
    CHECK_FALSE(f6.soluble);
    REQUIRE(f6.failing_pair.has_value());
    CHECK(f6.failing_pair->witness.nodes.size() >= 2);

    IdGraph empty = IdGraph::build({{"A", C}}, {});
    CHECK(is_soluble(empty).soluble);
}

TEST_CASE("requisiteness") {
    CHECK(requisite(fixture("F1").graph, "X", "D"));
    CHECK_FALSE(requisite(chain_xdu(), "X", "D"));
    CHECK(requisite(fixture("F2").graph, "D", "Dp"));
    bool threw = false;
    try {
        requisite(fixture("F1").graph, "D", "D");
    } catch (const Error& e) {
        threw = e.code() == "NoSuchInfolink";
    }
    CHECK(threw);
}

TEST_CASE("minimal d-reduction") {
    auto [chain_star, chain_trace] = minimal_d_reduction(chain_xdu());
    CHECK_FALSE(chain_star.has_edge("X", "D"));
    CHECK(chain_star.has_edge("D", "U"));
    REQUIRE(chain_trace.removals.size() == 1);
    CHECK(chain_trace.removals[0].from == "X");
    CHECK(chain_trace.removals[0].given == std::set<NodeId>{"D"});

    auto [f2_star, f2_trace] = minimal_d_reduction(fixture("F2").graph);
    CHECK(f2_star == fixture("F2").graph);
    CHECK(f2_trace.removals.empty());

    auto [f5_star, f5_trace] = minimal_d_reduction(fixture("F5").graph);
    CHECK(f5_star == fixture("F5").graph);
    CHECK(f5_trace.removals.empty());

    auto [f3_star, f3_trace] = minimal_d_reduction(fixture("F3").graph);
    CHECK(f3_star == fixture("F3").graph);
}

TEST_CASE("reduction is order-invariant and only drops infolinks") {
    test::Rng rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        IdGraph g = test::random_dag(rng, 8);
        IdGraph reduced = minimal_d_reduction(g).first;
        // monotone: same nodes, subset of edges, removed ones all infolinks
        CHECK(reduced.nodes() == g.nodes());
        for (const auto& e : reduced.edges()) CHECK(g.has_edge(e.first, e.second));
        for (const auto& [a, b] : g.edges())
            if (!reduced.has_edge(a, b)) CHECK(g.is_decision(b));
        // random removal orders reach the same fixpoint
        for (int run = 0; run < 6; ++run) {
            IdGraph cur = g;
            while (true) {
                std::vector<std::pair<NodeId, NodeId>> nonreq;
                for (const auto& [a, b] : cur.edges())
                    if (cur.is_decision(b) && !requisite(cur, a, b)) nonreq.push_back({a, b});
                if (nonreq.empty()) break;
                auto pick = nonreq[rng() % nonreq.size()];
                cur = cur.with_edge_removed(pick.first, pick.second);
            }
            CHECK(cur == reduced);
        }
    }
}

TEST_CASE("reduction steps preserve solubility on the soluble fixtures") {
    for (const auto& name : {"F1", "F2", "F3", "F4", "F5", "F5c"}) {
        IdGraph cur = fixture(name).graph;
        REQUIRE(is_soluble(cur).soluble);
        while (true) {
            std::optional<std::pair<NodeId, NodeId>> next;
            for (const auto& [a, b] : cur.edges())
                if (cur.is_decision(b) && !requisite(cur, a, b)) {
                    next = {a, b};
                    break;
                }
            if (!next) break;
            cur = cur.with_edge_removed(next->first, next->second);
            CHECK(is_soluble(cur).soluble);
        }
    }
}

TEST_CASE("voi criterion") {
    CHECK(voi_criterion(fixture("F1").graph, "X", "D").verdict == CriterionVerdict::Positive);
    CHECK(voi_criterion(chain_xdu(), "X", "D").verdict == CriterionVerdict::Zero);
    CHECK(voi_criterion(fixture("F3").graph, "X", "D").verdict == CriterionVerdict::Positive);
    CHECK(voi_criterion(fixture("F3").graph, "Xp", "Dp").verdict == CriterionVerdict::Positive);
    CHECK(voi_criterion(fixture("F5").graph, "AH1", "A1").verdict == CriterionVerdict::Positive);
    CHECK(voi_criterion(fixture("F5").graph, "AH2", "A2").verdict == CriterionVerdict::Positive);

    CriterionResult dec = voi_criterion(fixture("F2").graph, "D", "Dp");
    CHECK(dec.verdict == CriterionVerdict::NotApplicable);
    CHECK(dec.reason.find("decision") != std::string::npos);

    // absent infolink: the edge is added before deciding
    IdGraph f1_no_link = fixture("F1").graph.with_edge_removed("X", "D");
    CHECK(voi_criterion(f1_no_link, "X", "D").verdict == CriterionVerdict::Positive);
    IdGraph isolated = IdGraph::build({{"X", C}, {"D", D}, {"U", U}}, {{"D", "U"}});
    CHECK(voi_criterion(isolated, "X", "D").verdict == CriterionVerdict::Zero);

    // insoluble graph: not applicable
    IdGraph bad = IdGraph::build({{"X", C}, {"D1", D}, {"D2", D}, {"U", U}},
                                 {{"X", "D1"}, {"D1", "U"}, {"D2", "U"}, {"X", "U"}});
    CHECK_FALSE(is_soluble(bad).soluble);
    CHECK(voi_criterion(bad, "X", "D1").verdict == CriterionVerdict::NotApplicable);

    // adding the missing edge would create a cycle: not applicable
    IdGraph downstream = IdGraph::build({{"D", D}, {"Y", C}, {"U", U}}, {{"D", "Y"}, {"Y", "U"}});
    CHECK(voi_criterion(downstream, "Y", "D").verdict == CriterionVerdict::NotApplicable);
}

TEST_CASE("voc criterion") {
    IdGraph direct = IdGraph::build({{"X", C}, {"U", U}}, {{"X", "U"}});
    CHECK(voc_criterion(direct, "X").verdict == CriterionVerdict::Positive);

    CHECK(voc_criterion(chain_xdu(), "X").verdict == CriterionVerdict::Zero);

    IdGraph lone = IdGraph::build({{"X", C}, {"U", U}}, {});
    CHECK(voc_criterion(lone, "X").verdict == CriterionVerdict::Zero);

    CHECK(voc_criterion(fixture("F4").graph, "X").verdict == CriterionVerdict::Positive);

    bool threw = false;
    try {
        voc_criterion(fixture("F1").graph, "D");
    } catch (const Error& e) {
        threw = e.code() == "NotAChanceNode";
    }
    CHECK(threw);
}
