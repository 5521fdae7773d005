// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "luciscan/cfg.hpp"

namespace luciscan::dataflow {

using NodeSet = std::set<int>;

/// Reaching-definitions result. `out[v]` is the constraint value of node v:
/// the definitions live immediately after v. The set reaching v (the join
/// over its predecessors) is `reaching_in`.
struct ConstraintTable {
    std::vector<NodeSet> out;

    const NodeSet& at(int v) const { return out[static_cast<std::size_t>(v)]; }
    NodeSet reaching_in(const cfg::Cfg& cfg, int v) const;
};

/// Union of the predecessors' constraint values; empty for Entry.
NodeSet join(int v, const ConstraintTable& ct, const cfg::Cfg& cfg);

/// Assignment nodes kill every definition they fully redefine, then add
/// themselves; all other node kinds pass the join through. Kill granularity:
/// plain names kill by name, attribute paths kill the exact path, a
/// whole-table write kills every path under it, weak (dynamic-index)
/// definitions kill nothing. A node is removed only when all of its
/// definitions are killed.
NodeSet transfer(const cfg::Cfg& cfg, int v, NodeSet joined);

class IterationBudgetExceeded : public std::runtime_error {
  public:
    explicit IterationBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Worklist fixed-point solve. The queue starts holding every node (in the
/// given order when `seed_order` is nonempty); nodes whose constraint changed
/// push their successors. The result is independent of the seed order.
ConstraintTable analyze(const cfg::Cfg& cfg, const std::vector<int>& seed_order = {});

/// "node <id> -> [a, b, ...]" lines, for --dump-reaching goldens.
std::string dump(const ConstraintTable& ct, const cfg::Cfg& cfg);

}  // namespace luciscan::dataflow
