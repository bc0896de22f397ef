#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idvoi/graph.hpp"
#include "idvoi/model.hpp"

namespace idvoi {

/// Named example graphs used by the test suites and the CLI.
///   F1: X -> D, X -> U, D -> U (one decision, matching utility)
///   F2: D -> D' -> U, D -> U (decision observes a past decision)
///   F3: two-decision graph where one system is not enough
///   F4: control chain X -> D -> U with a confounder keeping X requisite
///   F5: supervision POMDP truncated to two timesteps
///   F5c: the CIRL variant of F5 (human actions affect the next state)
///   F6: two decisions sharing a utility with no links (insoluble)
///   F7: a control chain through two decisions, both chain links requisite
struct Fixture {
    std::string name;
    IdGraph graph;
    std::optional<IdModel> model;  // F1 and F4 ship models
};

Fixture fixture(const std::string& name);
std::vector<std::string> fixture_names();

}  // namespace idvoi
