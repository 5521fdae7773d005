// SPDX-License-Identifier: Apache-2.0
#include "luciscan/taint.hpp"

#include <algorithm>

namespace luciscan::taint {

using cfg::ArgInfo;
using cfg::CallRef;
using cfg::Cfg;
using cfg::CfgNode;
using cfg::CfgNodeKind;
using cfg::Identity;
using cfg::path_overlap;
using cfg::Reachability;
using cfg::RhsBinding;

std::vector<SinkSite> find_sinks(const Cfg& cfg, const TriggerWords& tw) {
    std::vector<SinkSite> out;
    for (auto it = cfg.nodes.rbegin(); it != cfg.nodes.rend(); ++it) {
        for (const auto& c : it->calls) {
            if (c.dynamic || c.qname.empty()) continue;
            const SinkSpec* spec = tw.match_sink(c.qname);
            if (!spec) continue;
            SinkSite s;
            s.node_id = it->id;
            s.call_id = c.call_id;
            s.qname = c.qname;
            s.span = c.span;
            s.file = it->file;
            s.spec = spec;
            out.push_back(std::move(s));
        }
    }
    return out;
}

namespace {

bool has_source_call(const std::vector<cfg::CallUse>& calls, const TriggerWords& tw,
                     std::string* which = nullptr) {
    for (const auto& c : calls)
        if (tw.is_source(c.qname)) {
            if (which) *which = c.qname;
            return true;
        }
    return false;
}

class Backtracker {
  public:
    Backtracker(const Cfg& cfg, const dataflow::ConstraintTable& ct, const TriggerWords& tw)
        : cfg_(cfg), ct_(ct), tw_(tw) {}

    struct Leaves {
        bool constant = false;
        bool unknown = false;
        std::vector<SourceRef> sources;

        void merge(const Leaves& o) {
            constant = constant || o.constant;
            unknown = unknown || o.unknown;
            for (const auto& s : o.sources) add_source(s);
        }
        void add_source(const SourceRef& s) {
            for (const auto& have : sources)
                if (have.node_id == s.node_id && have.name == s.name) return;
            sources.push_back(s);
        }
    };

    Leaves trace(int at_node, const Identity& ident) {
        auto key = std::make_pair(at_node, ident);
        auto mit = memo_.find(key);
        if (mit != memo_.end()) return mit->second;
        if (!in_progress_.insert(key).second) return {};  // cycle: nothing new

        Leaves leaves;
        dataflow::NodeSet reaching = ct_.reaching_in(cfg_, at_node);
        bool any_def = false;
        for (int a : reaching) {
            const CfgNode& def = cfg_.node(a);
            if (!def.defines(ident)) continue;
            any_def = true;
            if (def.synthetic_param) {
                SourceRef src;
                src.node_id = a;
                src.name = def.param_name;
                src.is_param = true;
                src.span = def.span;
                src.file = def.file;
                leaves.add_source(src);
                continue;
            }
            for (const auto& b : def.bindings) {
                if (!path_overlap(b.target.path, ident)) continue;
                std::string source_name;
                if (has_source_call(b.calls, tw_, &source_name)) {
                    SourceRef src;
                    src.node_id = a;
                    src.name = source_name;
                    src.span = def.span;
                    src.file = def.file;
                    leaves.add_source(src);
                    continue;
                }
                if (!b.alias_of.empty() && ident.size() > b.target.path.size() &&
                    path_overlap(b.target.path, ident)) {
                    // looking for t.f through `t := other`: follow other.f
                    leaves.merge(trace(a, b.alias_of + ident.substr(b.target.path.size())));
                    continue;
                }
                if (b.literal_only) {
                    leaves.constant = true;
                    continue;
                }
                bool recursed = false;
                for (const auto& r : b.reads) {
                    recursed = true;
                    leaves.merge(trace(a, r.ident));
                }
                if (!recursed) leaves.unknown = true;  // opaque call result, closure, ...
            }
        }
        if (!any_def) leaves.unknown = true;  // global or never defined
        in_progress_.erase(key);
        memo_.emplace(key, leaves);
        return leaves;
    }

  private:
    const Cfg& cfg_;
    const dataflow::ConstraintTable& ct_;
    const TriggerWords& tw_;
    std::map<std::pair<int, Identity>, Leaves> memo_;
    std::set<std::pair<int, Identity>> in_progress_;
};

Provenance finish_provenance(const Backtracker::Leaves& leaves) {
    Provenance p;
    if (!leaves.sources.empty()) {
        p.kind = ProvenanceKind::SourceTainted;
        p.sources = leaves.sources;
    } else if (leaves.unknown) {
        p.kind = ProvenanceKind::Unknown;
    } else {
        p.kind = ProvenanceKind::Constant;
    }
    return p;
}

}  // namespace

Provenance backtrack_argument(const Cfg& cfg, const dataflow::ConstraintTable& ct,
                              int sink_node, const ArgInfo& arg, const TriggerWords& tw) {
    Backtracker bt(cfg, ct, tw);
    Backtracker::Leaves leaves;

    std::string source_name;
    if (has_source_call(arg.calls, tw, &source_name)) {
        SourceRef src;
        src.node_id = sink_node;
        src.name = source_name;
        src.span = cfg.node(sink_node).span;
        src.file = cfg.node(sink_node).file;
        leaves.add_source(src);
    }
    for (const auto& r : arg.reads) leaves.merge(bt.trace(sink_node, r.ident));
    if (arg.literal_only) leaves.constant = true;
    if (!arg.literal_only && arg.reads.empty() && leaves.sources.empty())
        leaves.unknown = true;
    return finish_provenance(leaves);
}

namespace {

// taint entry points defined by the source node itself
void seed_taint(const Cfg& cfg, int source_node, const TriggerWords& tw, Propagation& p) {
    const CfgNode& s = cfg.node(source_node);
    bool seeded = false;
    for (const auto& b : s.bindings) {
        bool tainted = s.synthetic_param || has_source_call(b.calls, tw);
        if (tainted && !b.target.path.empty()) {
            p.tainted.insert(b.target.path);
            p.introducer[b.target.path] = source_node;
            seeded = true;
        }
    }
    if (!seeded) {
        for (const auto& d : s.lh) {
            p.tainted.insert(d.path);
            p.introducer[d.path] = source_node;
        }
    }
}

}  // namespace

Propagation propagate_taint(const Cfg& lat, const Reachability& reach, int source_node,
                            const std::vector<int>& assignments, const TriggerWords& tw) {
    Propagation p;
    p.chain.push_back(source_node);
    seed_taint(lat, source_node, tw, p);

    std::set<int> in_chain{source_node};
    bool grew = true;
    std::size_t rounds = 0;
    while (grew && rounds++ <= assignments.size() + 1) {
        grew = false;
        for (int id : assignments) {
            if (in_chain.count(id)) continue;
            const CfgNode& node = lat.node(id);

            int via = -1;
            std::vector<Identity> fresh;
            for (const auto& b : node.bindings) {
                // which tainted paths does this binding read?
                const Identity* matched = nullptr;
                int matched_intro = -1;
                for (const auto& r : b.reads) {
                    for (const auto& t : p.tainted) {
                        if (!path_overlap(r.ident, t)) continue;
                        int intro = p.introducer.at(t);
                        if (!reach.in(intro, id)) continue;
                        if (!matched || p.introducer.at(*matched) > intro) {
                            matched = &t;
                            matched_intro = intro;
                        }
                    }
                }
                if (!matched) continue;
                if (via == -1 || matched_intro < via) via = matched_intro;

                if (!b.alias_of.empty()) {
                    // table copy: map tainted attribute paths across the alias
                    const Identity& x = b.alias_of;
                    for (const auto& t : p.tainted) {
                        if (!path_overlap(x, t)) continue;
                        if (!reach.in(p.introducer.at(t), id)) continue;
                        if (t.size() > x.size())
                            fresh.push_back(b.target.path + t.substr(x.size()));
                        else
                            fresh.push_back(b.target.path);
                    }
                } else {
                    fresh.push_back(b.target.path);
                }
            }
            if (via == -1) continue;

            p.chain.push_back(id);
            in_chain.insert(id);
            p.via[id] = via;
            for (auto& f : fresh) {
                if (f.empty()) continue;
                if (p.tainted.insert(f).second) p.introducer[f] = id;
            }
            grew = true;
        }
    }
    return p;
}

namespace {

std::vector<int> via_path(const Propagation& p, int last) {
    std::vector<int> rev{last};
    int cur = last;
    while (true) {
        auto it = p.via.find(cur);
        if (it == p.via.end()) break;
        cur = it->second;
        rev.push_back(cur);
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
}

// reads of `node` that carry taint over from `prev` (defs of prev)
std::vector<const cfg::ReadRef*> connecting_reads(const CfgNode& prev, const CfgNode& node) {
    std::vector<const cfg::ReadRef*> out;
    for (const auto& b : node.bindings)
        for (const auto& r : b.reads) {
            bool overlaps = std::any_of(prev.lh.begin(), prev.lh.end(), [&](const cfg::Def& d) {
                return path_overlap(r.ident, d.path);
            });
            if (overlaps) out.push_back(&r);
        }
    return out;
}

bool all_sanitized(const std::vector<const cfg::ReadRef*>& reads, const TriggerWords& tw) {
    if (reads.empty()) return false;
    for (const auto* r : reads) {
        bool covered = false;
        for (const auto& q : r->enclosing_calls)
            if (tw.is_sanitizer(q)) {
                covered = true;
                break;
            }
        if (!covered) return false;
    }
    return true;
}

}  // namespace

bool is_sanitized(const TaintFlow& flow, const Cfg& cfg, const TriggerWords& tw) {
    // source assignment itself wrapped: x := sanitize(source())
    if (!flow.chain.empty()) {
        const CfgNode& src = cfg.node(flow.chain.front());
        for (const auto& b : src.bindings)
            for (const auto& c : b.calls)
                if (tw.is_source(c.qname))
                    for (const auto& encl : c.enclosing_calls)
                        if (tw.is_sanitizer(encl)) return true;
    }
    // links between chain elements
    for (std::size_t i = 1; i < flow.chain.size(); ++i) {
        const CfgNode& prev = cfg.node(flow.chain[i - 1]);
        const CfgNode& node = cfg.node(flow.chain[i]);
        auto reads = connecting_reads(prev, node);
        if (all_sanitized(reads, tw)) return true;
    }
    // the sink argument itself
    const CfgNode& sink = cfg.node(flow.sink.node_id);
    for (const auto& c : sink.calls) {
        if (c.call_id != flow.sink.call_id) continue;
        if (flow.arg_pos < 1 || static_cast<std::size_t>(flow.arg_pos) > c.args.size())
            continue;
        const ArgInfo& arg = c.args[static_cast<std::size_t>(flow.arg_pos - 1)];
        if (!flow.chain.empty()) {
            const CfgNode& last = cfg.node(flow.chain.back());
            std::vector<const cfg::ReadRef*> carrying;
            for (const auto& r : arg.reads)
                for (const auto& d : last.lh)
                    if (path_overlap(r.ident, d.path)) {
                        carrying.push_back(&r);
                        break;
                    }
            if (all_sanitized(carrying, tw)) return true;
        }
        // direct source-call argument wrapped in a sanitizer
        for (const auto& cu : arg.calls)
            if (tw.is_source(cu.qname))
                for (const auto& encl : cu.enclosing_calls)
                    if (tw.is_sanitizer(encl)) return true;
    }
    return false;
}

FrameworkDecision apply_framework_rules(const TaintFlow& flow, const Cfg& root,
                                        const TriggerWords& tw) {
    // (a) source is the HTTP request interface
    if (!flow.source.is_param && TriggerWords::is_http_source(flow.source.name))
        return {true, "http-source"};
    // (b) parameter of a dispatch-registered handler (URL segment injection)
    if (flow.source.is_param && root.web_reachable) return {true, "dispatched-parameter"};
    // (c) controller directory with an external source
    bool in_controller = root.source_path.find("controller/") != std::string::npos;
    if (in_controller) {
        if (!flow.source.is_param && tw.is_source(flow.source.name))
            return {true, "controller-external-source"};
        if (flow.source.is_param && root.is_public)
            return {true, "controller-public-parameter"};
    }
    return {false, "not-web-reachable"};
}

VulnType classify(const SinkSite& sink) { return sink.spec->type; }

namespace {

struct FlowKey {
    int sink_node;
    int call_id;
    int arg;
    std::string source_name;

    bool operator<(const FlowKey& o) const {
        return std::tie(sink_node, call_id, arg, source_name) <
               std::tie(o.sink_node, o.call_id, o.arg, o.source_name);
    }
};

}  // namespace

std::vector<TaintFlow> analyze_root(const Cfg& root, const TriggerWords& tw) {
    dataflow::ConstraintTable ct = dataflow::analyze(root);
    Reachability reach(root);
    std::vector<int> assignments = root.assignment_ids();
    std::vector<SinkSite> sinks = find_sinks(root, tw);

    std::map<int, Propagation> prop_cache;
    auto propagation_for = [&](int src) -> const Propagation& {
        auto it = prop_cache.find(src);
        if (it == prop_cache.end())
            it = prop_cache.emplace(src, propagate_taint(root, reach, src, assignments, tw))
                     .first;
        return it->second;
    };

    std::map<FlowKey, TaintFlow> best;
    for (const auto& sink : sinks) {
        const CfgNode& node = root.node(sink.node_id);
        const CallRef* call = nullptr;
        for (const auto& c : node.calls)
            if (c.call_id == sink.call_id) call = &c;
        if (!call) continue;

        for (int pos : sink.spec->args) {
            if (pos < 1 || static_cast<std::size_t>(pos) > call->args.size()) continue;
            const ArgInfo& arg = call->args[static_cast<std::size_t>(pos - 1)];

            Provenance prov = backtrack_argument(root, ct, sink.node_id, arg, tw);
            if (prov.kind != ProvenanceKind::SourceTainted) continue;

            for (const auto& src : prov.sources) {
                TaintFlow flow;
                flow.source = src;
                flow.sink = sink;
                flow.arg_pos = pos;

                if (src.node_id == sink.node_id && !src.is_param) {
                    flow.chain = {sink.node_id};  // source call fed straight in
                } else {
                    const Propagation& p = propagation_for(src.node_id);
                    // does the tainted set cover this argument, and from where?
                    int carrier = -1;
                    for (const auto& r : arg.reads) {
                        for (const auto& t : p.tainted) {
                            if (!path_overlap(r.ident, t)) continue;
                            int intro = p.introducer.at(t);
                            if (!reach.in(intro, sink.node_id)) continue;
                            if (carrier == -1 ||
                                via_path(p, intro).size() < via_path(p, carrier).size())
                                carrier = intro;
                        }
                    }
                    if (carrier == -1) continue;
                    flow.chain = via_path(p, carrier);
                    flow.tainted_attrs = p.tainted;
                }

                flow.sanitized = is_sanitized(flow, root, tw);
                flow.web_reachable = root.web_reachable;

                FlowKey key{sink.node_id, sink.call_id, pos, src.name};
                auto it = best.find(key);
                if (it == best.end() || flow.chain.size() < it->second.chain.size())
                    best[key] = std::move(flow);
            }
        }
    }

    std::vector<TaintFlow> out;
    out.reserve(best.size());
    for (auto& [k, f] : best) out.push_back(std::move(f));
    return out;
}

}  // namespace luciscan::taint
