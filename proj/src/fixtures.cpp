#include "idvoi/fixtures.hpp"

#include "idvoi/errors.hpp"

namespace idvoi {

namespace {

constexpr NodeKind C = NodeKind::Chance;
constexpr NodeKind D = NodeKind::Decision;
constexpr NodeKind U = NodeKind::Utility;

IdGraph f1_graph() {
    return IdGraph::build({{"X", C}, {"D", D}, {"U", U}}, {{"X", "D"}, {"X", "U"}, {"D", "U"}});
}

// X is Bernoulli(1/2); U pays 1 iff the decision matches X.
IdModel f1_model() {
    IdModel m;
    m.graph = f1_graph();
    m.domains["X"] = boolean_domain();
    m.domains["D"] = boolean_domain();
    m.cpds["X"] = Cpd{{{Rational(1, 2), Rational(1, 2)}}};
    UtilityTable u;
    for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t x = 0; x < 2; ++x) u.rows.push_back(d == x ? Rational(1) : Rational(0));
    m.utilities["U"] = std::move(u);
    return m;
}

IdGraph f2_graph() {
    return IdGraph::build({{"D", D}, {"Dp", D}, {"U", U}}, {{"D", "Dp"}, {"Dp", "U"}, {"D", "U"}});
}

// Reconstructed two-decision example. One parameterized system is not
// enough here: U1 pays when D's value (relayed by V) matches the index Dp
// reports, and Dp sees X itself, so "d = 0, report 0" would score as well
// as honest play. The second system makes Dp's report trustworthy: Xp
// holds the x-th bit of the random word Qp, and U2 pays Dp for a correct
// claim about that word, which Dp can only make at index x. Both decisions
// observing X keeps the diagram soluble (X blocks the back-channel from
// D's policy once Dp's parents are conditioned).
IdGraph f3_graph() {
    return IdGraph::build(
        {{"X", C}, {"D", D}, {"V", C}, {"Qp", C}, {"Xp", C}, {"Dp", D}, {"U1", U}, {"U2", U}},
        {{"X", "D"}, {"X", "Dp"}, {"X", "Xp"}, {"Qp", "Xp"}, {"Qp", "U2"}, {"Xp", "Dp"},
         {"V", "Dp"}, {"D", "V"}, {"V", "U1"}, {"Dp", "U1"}, {"Dp", "U2"}});
}

IdGraph f4_graph() {
    return IdGraph::build({{"X", C}, {"W", C}, {"D", D}, {"U", U}},
                          {{"W", "X"}, {"W", "U"}, {"X", "D"}, {"D", "U"}});
}

// Bernoulli(1/4) source feeding the decision; the utility repeats the
// decision, and the confounder keeps X -> D requisite.
IdModel f4_model() {
    IdModel m;
    m.graph = f4_graph();
    m.domains["W"] = singleton_domain();
    m.domains["X"] = boolean_domain();
    m.domains["D"] = boolean_domain();
    m.cpds["W"] = Cpd{{{Rational(1)}}};
    m.cpds["X"] = Cpd{{{Rational(3, 4), Rational(1, 4)}}};
    UtilityTable u;  // parents of U are {D, W}, lexicographic
    u.rows.push_back(Rational(0));
    u.rows.push_back(Rational(1));
    m.utilities["U"] = std::move(u);
    return m;
}

// Two supervision timesteps: the human sees the state and the hidden
// reward parameter and suggests an action; the agent sees only the
// suggestion. State evolves exogenously, so the diagram is soluble with a
// memoryless agent; each action is paid by the following reward node.
IdGraph f5_graph(bool cirl) {
    std::vector<std::pair<NodeId, NodeKind>> nodes = {
        {"Theta", C}, {"S1", C}, {"AH1", C}, {"A1", D}, {"S2", C},
        {"AH2", C},   {"A2", D}, {"R2", U},  {"R3", U}};
    std::vector<std::pair<NodeId, NodeId>> edges = {
        {"Theta", "AH1"}, {"Theta", "AH2"}, {"Theta", "R2"}, {"Theta", "R3"},
        {"S1", "AH1"},    {"S1", "S2"},     {"S1", "R2"},    {"AH1", "A1"},
        {"S2", "AH2"},    {"S2", "R3"},     {"AH2", "A2"},   {"A1", "R2"},
        {"A2", "R3"}};
    if (cirl) edges.push_back({"AH1", "S2"});
    return IdGraph::build(nodes, edges);
}

IdGraph f6_graph() {
    return IdGraph::build({{"D1", D}, {"D2", D}, {"U", U}}, {{"D1", "U"}, {"D2", "U"}});
}

// Control chain through two decisions. W1 confounds X with the utility so
// X -> D1 is requisite; the side channel M -> Z -> U keeps M -> D2
// requisite; and D2 observes W1, which blocks the back-channel from D1's
// policy through the collider at D1, keeping the diagram soluble.
IdGraph f7_graph() {
    return IdGraph::build(
        {{"W1", C}, {"X", C}, {"D1", D}, {"M", C}, {"Z", C}, {"D2", D}, {"U", U}},
        {{"W1", "X"}, {"W1", "U"}, {"W1", "D2"}, {"X", "D1"}, {"D1", "M"}, {"M", "D2"},
         {"M", "Z"}, {"Z", "U"}, {"D2", "U"}});
}

}  // namespace

Fixture fixture(const std::string& name) {
    if (name == "F1") return {name, f1_graph(), f1_model()};
    if (name == "F2") return {name, f2_graph(), std::nullopt};
    if (name == "F3") return {name, f3_graph(), std::nullopt};
    if (name == "F4") return {name, f4_graph(), f4_model()};
    if (name == "F5") return {name, f5_graph(false), std::nullopt};
    if (name == "F5c") return {name, f5_graph(true), std::nullopt};
    if (name == "F6") return {name, f6_graph(), std::nullopt};
    if (name == "F7") return {name, f7_graph(), std::nullopt};
    throw Error("UnknownFixture", "no fixture named '" + name + "'");
}

std::vector<std::string> fixture_names() { return {"F1", "F2", "F3", "F4", "F5", "F5c", "F6", "F7"}; }

}  // namespace idvoi
