// SPDX-License-Identifier: Apache-2.0
#include "luciscan/reaching.hpp"

#include <deque>

namespace luciscan::dataflow {

using cfg::Cfg;
using cfg::CfgNode;
using cfg::CfgNodeKind;
using cfg::Def;

NodeSet ConstraintTable::reaching_in(const Cfg& cfg, int v) const {
    return join(v, *this, cfg);
}

NodeSet join(int v, const ConstraintTable& ct, const Cfg& cfg) {
    NodeSet result;
    for (int w : cfg.node(v).preds)
        result.insert(ct.at(w).begin(), ct.at(w).end());
    return result;
}

namespace {

// does writing `d` overwrite the definition `old`?
bool kills(const Def& d, const Def& old) {
    if (d.weak) return false;
    if (d.path == old.path) return true;
    // whole-table write t := ... kills t.f, t.[]
    if (!cfg::is_attr_path(d.path) && cfg::path_overlap(d.path, old.path) &&
        old.path.size() > d.path.size())
        return true;
    return false;
}

}  // namespace

NodeSet transfer(const Cfg& cfg, int v, NodeSet joined) {
    const CfgNode& node = cfg.node(v);
    if (node.kind != CfgNodeKind::Assignment) return joined;

    for (auto it = joined.begin(); it != joined.end();) {
        const CfgNode& old = cfg.node(*it);
        bool all_killed = !old.lh.empty();
        for (const Def& od : old.lh) {
            bool killed = false;
            for (const Def& nd : node.lh)
                if (kills(nd, od)) {
                    killed = true;
                    break;
                }
            if (!killed) {
                all_killed = false;
                break;
            }
        }
        if (all_killed)
            it = joined.erase(it);
        else
            ++it;
    }
    joined.insert(v);
    return joined;
}

ConstraintTable analyze(const Cfg& cfg, const std::vector<int>& seed_order) {
    ConstraintTable ct;
    ct.out.assign(cfg.nodes.size(), {});

    std::deque<int> queue;
    std::vector<bool> queued(cfg.nodes.size(), false);
    auto push = [&](int v) {
        if (!queued[static_cast<std::size_t>(v)]) {
            queued[static_cast<std::size_t>(v)] = true;
            queue.push_back(v);
        }
    };
    if (seed_order.empty()) {
        for (const auto& n : cfg.nodes) push(n.id);
    } else {
        for (int v : seed_order) push(v);
        for (const auto& n : cfg.nodes) push(n.id);  // safety: cover all
    }

    std::size_t assignments = cfg.assignment_ids().size();
    std::size_t budget = cfg.nodes.size() * cfg.nodes.size() * (assignments + 1) + 64;
    std::size_t iterations = 0;

    while (!queue.empty()) {
        if (++iterations > budget)
            throw IterationBudgetExceeded(
                "reaching-definitions worklist exceeded its iteration budget on '" +
                cfg.name + "' (non-monotone transfer?)");
        int v = queue.front();
        queue.pop_front();
        queued[static_cast<std::size_t>(v)] = false;

        NodeSet next = transfer(cfg, v, join(v, ct, cfg));
        if (next != ct.out[static_cast<std::size_t>(v)]) {
            ct.out[static_cast<std::size_t>(v)] = std::move(next);
            for (int s : cfg.node(v).succs) push(s);
        }
    }
    return ct;
}

std::string dump(const ConstraintTable& ct, const Cfg& cfg) {
    std::string out;
    for (const auto& n : cfg.nodes) {
        out += "node " + std::to_string(n.id) + " -> [";
        bool first = true;
        for (int a : ct.at(n.id)) {
            if (!first) out += ", ";
            out += std::to_string(a);
            first = false;
        }
        out += "]\n";
    }
    return out;
}

}  // namespace luciscan::dataflow
