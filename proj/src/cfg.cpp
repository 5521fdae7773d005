// SPDX-License-Identifier: Apache-2.0
#include "luciscan/cfg.hpp"

#include <algorithm>
#include <deque>

namespace luciscan::cfg {

std::string identity_root(const Identity& id) {
    auto dot = id.find('.');
    return dot == std::string::npos ? id : id.substr(0, dot);
}

bool is_attr_path(const Identity& id) { return id.find('.') != std::string::npos; }

bool path_overlap(const Identity& a, const Identity& b) {
    if (a == b) return true;
    if (a.size() < b.size())
        return b.compare(0, a.size(), a) == 0 && b[a.size()] == '.';
    if (b.size() < a.size())
        return a.compare(0, b.size(), b) == 0 && a[b.size()] == '.';
    return false;
}

Identity rename_root(const Identity& id, const std::string& suffix) {
    auto dot = id.find('.');
    if (dot == std::string::npos) return id + suffix;
    return id.substr(0, dot) + suffix + id.substr(dot);
}

const char* to_string(CfgNodeKind k) {
    switch (k) {
        case CfgNodeKind::Entry: return "Entry";
        case CfgNodeKind::Exit: return "Exit";
        case CfgNodeKind::Assignment: return "Assignment";
        case CfgNodeKind::Statement: return "Statement";
        case CfgNodeKind::Condition: return "Condition";
        case CfgNodeKind::CallSite: return "CallSite";
    }
    return "?";
}

bool CfgNode::defines(const Identity& id) const {
    return std::any_of(lh.begin(), lh.end(),
                       [&](const Def& d) { return path_overlap(d.path, id); });
}

std::vector<int> Cfg::assignment_ids() const {
    std::vector<int> out;
    for (const auto& n : nodes)
        if (n.kind == CfgNodeKind::Assignment) out.push_back(n.id);
    return out;
}

std::vector<std::string> validate(const Cfg& cfg) {
    std::vector<std::string> issues;
    auto note = [&](std::string s) { issues.push_back(std::move(s)); };

    int entries = 0, exits = 0;
    for (const auto& n : cfg.nodes) {
        if (n.id != static_cast<int>(&n - cfg.nodes.data())) note("node id != index");
        if (n.kind == CfgNodeKind::Entry) ++entries;
        if (n.kind == CfgNodeKind::Exit) ++exits;
        for (int s : n.succs) {
            const auto& other = cfg.node(s);
            if (std::find(other.preds.begin(), other.preds.end(), n.id) == other.preds.end())
                note("edge " + std::to_string(n.id) + "->" + std::to_string(s) +
                     " missing back link");
        }
        for (int p : n.preds) {
            const auto& other = cfg.node(p);
            if (std::find(other.succs.begin(), other.succs.end(), n.id) == other.succs.end())
                note("pred " + std::to_string(p) + " of " + std::to_string(n.id) +
                     " missing forward link");
        }
    }
    if (entries != 1) note("expected exactly one Entry, saw " + std::to_string(entries));
    if (exits != 1) note("expected exactly one Exit, saw " + std::to_string(exits));
    const CfgNode& entry = cfg.node(cfg.entry_id);
    if (!entry.preds.empty()) note("Entry has predecessors");
    if (entry.succs.size() != 1) note("Entry must have exactly one successor");
    const CfgNode& exit = cfg.node(cfg.exit_id);
    if (!exit.succs.empty()) note("Exit has successors");
    if (exit.preds.empty()) note("Exit has no predecessor");

    std::vector<bool> seen(cfg.nodes.size(), false);
    std::deque<int> q{cfg.entry_id};
    seen[static_cast<std::size_t>(cfg.entry_id)] = true;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int s : cfg.node(v).succs)
            if (!seen[static_cast<std::size_t>(s)]) {
                seen[static_cast<std::size_t>(s)] = true;
                q.push_back(s);
            }
    }
    for (const auto& n : cfg.nodes)
        if (!seen[static_cast<std::size_t>(n.id)])
            note("node " + std::to_string(n.id) + " unreachable from Entry");
    return issues;
}

bool Reachability::in(int from, int to) const {
    auto it = cache_.find(from);
    if (it == cache_.end()) {
        std::vector<bool> seen(cfg_.nodes.size(), false);
        std::deque<int> q{from};
        seen[static_cast<std::size_t>(from)] = true;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int s : cfg_.node(v).succs)
                if (!seen[static_cast<std::size_t>(s)]) {
                    seen[static_cast<std::size_t>(s)] = true;
                    q.push_back(s);
                }
        }
        it = cache_.emplace(from, std::move(seen)).first;
    }
    return it->second[static_cast<std::size_t>(to)];
}

void FunctionDict::add(Cfg* cfg) {
    if (approximate_) {
        by_name_[cfg->name] = cfg;  // the new node replaces the old one
    } else {
        Instance inst;
        inst.name = cfg->name;
        inst.file = cfg->source_path;
        inst.line = cfg->def_span.line_begin;
        inst.cfg = cfg;
        instances_.push_back(std::move(inst));
    }
}

Cfg* FunctionDict::resolve(const std::string& qname) const {
    if (approximate_) {
        auto it = by_name_.find(qname);
        return it == by_name_.end() ? nullptr : it->second;
    }
    Cfg* hit = nullptr;
    for (const auto& inst : instances_)
        if (inst.name == qname) hit = inst.cfg;
    return hit;
}

std::size_t FunctionDict::size() const {
    return approximate_ ? by_name_.size() : instances_.size();
}

}  // namespace luciscan::cfg
