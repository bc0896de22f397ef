#include "doctest.h"
#include "idvoi/errors.hpp"
#include "idvoi/fixtures.hpp"
#include "idvoi/separation.hpp"
#include "test_support.hpp"

using namespace idvoi;

namespace {
constexpr NodeKind C = NodeKind::Chance;

IdGraph chain3() { return IdGraph::build({{"A", C}, {"B", C}, {"Cc", C}}, {{"A", "B"}, {"B", "Cc"}}); }
IdGraph collider3() { return IdGraph::build({{"A", C}, {"B", C}, {"Cc", C}}, {{"A", "B"}, {"Cc", "B"}}); }
}  // namespace

TEST_CASE("active path basics") {
    IdGraph g = chain3();
    TracedPath p = trace_path(g, {"A", "B", "Cc"});
    CHECK(is_active_path(g, p, {}));
    CHECK_FALSE(is_active_path(g, p, {"B"}));

    IdGraph h = collider3();
    TracedPath q = trace_path(h, {"A", "B", "Cc"});
    CHECK_FALSE(is_active_path(h, q, {}));
    CHECK(is_active_path(h, q, {"B"}));
}

TEST_CASE("d-separation basics") {
    IdGraph g = chain3();
    CHECK(d_separated(g, {"A"}, {"Cc"}, {"B"}));
    CHECK_FALSE(d_separated(g, {"A"}, {"Cc"}, {}));
    IdGraph h = collider3();
    CHECK(d_separated(h, {"A"}, {"Cc"}, {}));
    CHECK_FALSE(d_separated(h, {"A"}, {"Cc"}, {"B"}));
    CHECK(d_separated(g, {}, {"Cc"}, {}));
}

TEST_CASE("solubility separation for F2 holds in the mapping extension") {
    MappingExtension ext = mapping_extension(fixture("F2").graph);
    CHECK(d_separated(ext.graph, {"Pi__D"}, {"U"}, {"Dp", "D"}));
    CHECK(test::oracle_d_separated(ext.graph, {"Pi__D"}, {"U"}, {"Dp", "D"}));
}

TEST_CASE("find_active_path is deterministic and sound") {
    IdGraph g = chain3();
    auto p = find_active_path(g, "A", "Cc", {});
    REQUIRE(p);
    CHECK(p->nodes == std::vector<NodeId>{"A", "B", "Cc"});
    CHECK_FALSE(find_active_path(g, "A", "Cc", {"B"}));

    IdGraph f1 = fixture("F1").graph;
    auto q = find_active_path(f1, "X", "U", {"D"});
    REQUIRE(q);
    CHECK(q->nodes == std::vector<NodeId>{"X", "U"});
}

TEST_CASE("walk_to_active_path follows the excision lemma") {
    IdGraph g = IdGraph::build({{"A", C}, {"B", C}, {"Cc", C}}, {{"A", "B"}, {"A", "Cc"}});
    WalkWithRepetition w = make_walk(g, {"B", "A", "A", "Cc"});
    TracedPath p = walk_to_active_path(g, w, {});
    CHECK(p.nodes == std::vector<NodeId>{"B", "A", "Cc"});
    CHECK_FALSE(p.steps[0].forward);
    CHECK(p.steps[1].forward);

    // a walk that is already a path comes back unchanged
    IdGraph h = chain3();
    TracedPath simple = walk_to_active_path(h, make_walk(h, {"A", "B", "Cc"}), {});
    CHECK(simple.nodes == std::vector<NodeId>{"A", "B", "Cc"});

    // conditioned fork violates the hypothesis
    bool threw = false;
    try {
        walk_to_active_path(g, make_walk(g, {"B", "A", "Cc"}), {"A"});
    } catch (const Error& e) {
        threw = e.code() == "HypothesisViolated";
    }
    CHECK(threw);
}

TEST_CASE("reachability matches exhaustive path enumeration on all 4-node dags") {
    // all chance-node DAGs over 4 nodes with edges in the lexicographic
    // triangular order
    std::vector<NodeId> names{"A", "B", "Cc", "Dd"};
    std::vector<std::pair<NodeId, NodeId>> slots;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) slots.push_back({names[i], names[j]});
    for (unsigned mask = 0; mask < (1u << slots.size()); ++mask) {
        std::vector<std::pair<NodeId, NodeKind>> nodes;
        for (const auto& n : names) nodes.push_back({n, C});
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (std::size_t s = 0; s < slots.size(); ++s)
            if (mask & (1u << s)) edges.push_back(slots[s]);
        IdGraph g = IdGraph::build(nodes, edges);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                if (i == j) continue;
                std::vector<NodeId> rest;
                for (std::size_t k = 0; k < 4; ++k)
                    if (k != i && k != j) rest.push_back(names[k]);
                for (unsigned zmask = 0; zmask < 4; ++zmask) {
                    std::set<NodeId> z;
                    if (zmask & 1) z.insert(rest[0]);
                    if (zmask & 2) z.insert(rest[1]);
                    bool fast = d_separated(g, {names[i]}, {names[j]}, z);
                    bool slow = test::oracle_d_separated(g, {names[i]}, {names[j]}, z);
                    REQUIRE(fast == slow);
                }
            }
        }
    }
}

TEST_CASE("reachability matches the oracle on random 8-node dags") {
    test::Rng rng(17);
    for (int trial = 0; trial < 150; ++trial) {
        IdGraph g = test::random_dag(rng, 8);
        std::vector<NodeId> names;
        for (const auto& [n, k] : g.nodes()) names.push_back(n);
        for (int q = 0; q < 8; ++q) {
            std::set<NodeId> a = test::random_subset(rng, names, 0.25);
            std::set<NodeId> b = test::random_subset(rng, names, 0.25);
            std::set<NodeId> z = test::random_subset(rng, names, 0.3);
            bool fast = d_separated(g, a, b, z);
            bool slow = test::oracle_d_separated(g, a, b, z);
            REQUIRE(fast == slow);
            CHECK(d_separated(g, b, a, z) == fast);  // symmetry
        }
    }
}

TEST_CASE("found paths are active; separation is monotone under edge deletion") {
    test::Rng rng(19);
    for (int trial = 0; trial < 60; ++trial) {
        IdGraph g = test::random_dag(rng, 7);
        std::vector<NodeId> names;
        for (const auto& [n, k] : g.nodes()) names.push_back(n);
        std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
        for (int q = 0; q < 6; ++q) {
            NodeId a = names[pick(rng)], b = names[pick(rng)];
            if (a == b) continue;
            std::set<NodeId> z = test::random_subset(rng, names, 0.3);
            z.erase(a);
            z.erase(b);
            auto p = find_active_path(g, a, b, z);
            CHECK(p.has_value() != d_separated(g, {a}, {b}, z));
            if (p) CHECK(is_active_path(g, *p, z));
            if (!p && !g.edges().empty()) {
                auto e = g.edges()[pick(rng) % g.edges().size()];
                CHECK(d_separated(g.with_edge_removed(e.first, e.second), {a}, {b}, z));
            }
        }
    }
}

TEST_CASE("active paths between ancestors given ancestors stay inside the ancestors") {
    test::Rng rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        IdGraph g = test::random_dag(rng, 8);
        for (const auto& [n, k] : g.nodes()) {
            std::set<NodeId> anc = g.ancestors(n);
            if (anc.size() < 2) continue;
            std::vector<NodeId> pool(anc.begin(), anc.end());
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            NodeId a = pool[pick(rng)], b = pool[pick(rng)];
            if (a == b) continue;
            std::set<NodeId> z = test::random_subset(rng, pool, 0.4);
            z.erase(a);
            z.erase(b);
            if (auto p = find_active_path(g, a, b, z)) {
                for (const auto& v : p->nodes) CHECK(anc.count(v));
            }
        }
    }
}
