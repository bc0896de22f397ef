#include "doctest.h"
#include "idvoi/analysis.hpp"
#include "idvoi/errors.hpp"
#include "idvoi/fixtures.hpp"
#include "idvoi/solver.hpp"
#include "test_support.hpp"

using namespace idvoi;

namespace {
constexpr NodeKind C = NodeKind::Chance;
constexpr NodeKind U = NodeKind::Utility;

IdModel direct_effect_model(const Rational& eps) {
    IdModel m;
    m.graph = IdGraph::build({{"X", C}, {"U", U}}, {{"X", "U"}});
    m.domains["X"] = boolean_domain();
    m.cpds["X"] = Cpd{{{Rational(1) - eps, eps}}};
    m.utilities["U"] = UtilityTable{{Rational(0), Rational(1)}};
    return m;
}
}  // namespace

TEST_CASE("enumeration solves the matching model exactly") {
    IdModel m = *fixture("F1").model;
    Solution s = enumerate_optimal(m);
    CHECK(s.optimal_eu == Rational(1));
    CHECK(s.method == "enumeration");
    CHECK(s.optimal_count == 1ull);
    // the optimal rule copies x
    CHECK(s.policy.at("D").rows[0][0] == Rational(1));
    CHECK(s.policy.at("D").rows[1][1] == Rational(1));

    Solution cut = enumerate_optimal(remove_infolink(m, "X", "D"));
    CHECK(cut.optimal_eu == Rational(1, 2));
    CHECK(cut.optimal_count == 2ull);
    CHECK(cut.policy.at("D").rows[0][0] == Rational(1));  // lexicographically least
}

TEST_CASE("backward induction agrees with enumeration on the fixtures") {
    IdModel m = *fixture("F1").model;
    Solution bi = backward_induction(m, {"D"});
    CHECK(bi.optimal_eu == Rational(1));
    CHECK(bi.method == "backward-induction");
    CHECK_FALSE(bi.optimal_count.has_value());
    CHECK(expected_total_utility(m, bi.policy) == Rational(1));

    bool threw = false;
    try {
        backward_induction(m, {"D", "D"});
    } catch (const Error& e) {
        threw = e.code() == "OrderingInvalid";
    }
    CHECK(threw);
}

TEST_CASE("insoluble graphs reject every ordering") {
    IdGraph f6 = fixture("F6").graph;
    IdModel m;
    m.graph = f6;
    m.domains["D1"] = boolean_domain();
    m.domains["D2"] = boolean_domain();
    UtilityTable u;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) u.rows.push_back(a == b ? Rational(1) : Rational(0));
    m.utilities["U"] = std::move(u);
    for (auto ordering : {std::vector<NodeId>{"D1", "D2"}, std::vector<NodeId>{"D2", "D1"}}) {
        bool threw = false;
        try {
            backward_induction(m, ordering);
        } catch (const Error& e) {
            threw = e.code() == "OrderingInvalid";
        }
        CHECK(threw);
    }
    // enumeration still solves it
    CHECK(enumerate_optimal(m).optimal_eu == Rational(1));
}

TEST_CASE("voi on the matching model is exactly one half") {
    IdModel m = *fixture("F1").model;
    CHECK(voi(m, "X", "D") == Rational(1, 2));

    IdModel constant = m;
    constant.utilities["U"] = UtilityTable{{Rational(1), Rational(1), Rational(1), Rational(1)}};
    CHECK(voi(constant, "X", "D") == Rational(0));

    bool threw = false;
    try {
        voi(m, "D", "X");
    } catch (const Error& e) {
        threw = e.code() == "NoSuchInfolink";
    }
    CHECK(threw);
}

TEST_CASE("voc on a direct effect chain") {
    IdModel m = direct_effect_model(Rational(1, 4));
    CHECK(voc(m, "X") == Rational(3, 4));
    CHECK(voc(m, "X", false) == Rational(3, 4));  // constant interventions suffice here

    // no utility descendants: nothing to gain
    IdModel lone;
    lone.graph = IdGraph::build({{"X", C}, {"U", U}}, {});
    lone.domains["X"] = boolean_domain();
    lone.cpds["X"] = Cpd{{{Rational(1, 2), Rational(1, 2)}}};
    lone.utilities["U"] = UtilityTable{{Rational(3)}};
    CHECK(voc(lone, "X") == Rational(0));
}

TEST_CASE("values are nonnegative and stochastic policies never beat the optimum") {
    test::Rng rng(61);
    int done = 0;
    while (done < 15) {
        IdGraph g = test::random_soluble_dag(rng, 6, 2);
        IdModel m = test::random_model(rng, g);
        ModelEvaluator ev(m);
        if (ev.deterministic_policy_count(1 << 12) > (1 << 12)) continue;
        ++done;
        Solution best = enumerate_optimal(m);
        for (int k = 0; k < 5; ++k) {
            Policy pi = test::random_stochastic_policy(rng, m);
            CHECK(expected_total_utility(m, pi) <= best.optimal_eu);
        }
        for (const auto& [a, b] : g.edges()) {
            if (!g.is_decision(b)) continue;
            CHECK(voi(m, a, b) >= Rational(0));
        }
        for (const auto& x : g.chance_nodes()) {
            if (ev.context_count(x) > 4) continue;
            CHECK(voc(m, x) >= Rational(0));
        }
    }
}

TEST_CASE("backward induction equals enumeration on random soluble models") {
    test::Rng rng(67);
    int done = 0;
    while (done < 15) {
        IdGraph g = test::random_soluble_dag(rng, 6, 2);
        IdModel m = test::random_model(rng, g);
        ModelEvaluator ev(m);
        if (ev.deterministic_policy_count(1 << 10) > (1 << 10)) continue;
        ++done;
        SolubilityResult sol = is_soluble(g);
        Solution bi = backward_induction(m, sol.ordering);
        Solution en = enumerate_optimal(m);
        CHECK(bi.optimal_eu == en.optimal_eu);
    }
}

TEST_CASE("parallel enumeration returns bit-identical results") {
    test::Rng rng(73);
    IdGraph g = test::random_soluble_dag(rng, 6, 2);
    IdModel m = test::random_model(rng, g);
    Solution single = enumerate_optimal(m);
    setenv("IDVOI_THREADS", "4", 1);
    Solution parallel = enumerate_optimal(m);
    unsetenv("IDVOI_THREADS");
    CHECK(single.optimal_eu == parallel.optimal_eu);
    CHECK(single.optimal_count == parallel.optimal_count);
    CHECK(policy_key(single.policy) == policy_key(parallel.policy));
}

TEST_CASE("enumeration respects the policy-space bound") {
    IdModel m = *fixture("F1").model;
    SolverLimits limits;
    limits.enumeration_bound = 2;
    bool threw = false;
    try {
        enumerate_optimal(m, limits);
    } catch (const Error& e) {
        threw = e.code() == "TooLarge";
    }
    CHECK(threw);
}
