// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "luciscan/cfg.hpp"
#include "luciscan/reaching.hpp"
#include "luciscan/triggers.hpp"

namespace luciscan::taint {

struct SinkSite {
    int node_id = -1;
    int call_id = -1;
    std::string qname;
    Span span;
    std::string file;
    const SinkSpec* spec = nullptr;
};

/// Every call site matching a sink entry, in reverse node order
/// (sink-first processing walks backwards from the most recently seen).
std::vector<SinkSite> find_sinks(const cfg::Cfg& cfg, const TriggerWords& tw);

enum class ProvenanceKind { Constant, SourceTainted, Unknown };

struct SourceRef {
    int node_id = -1;     // assignment holding the source call, or the
                          // synthetic parameter node, or the sink node itself
    std::string name;     // source qualified name, or the parameter name
    bool is_param = false;
    Span span;
    std::string file;
};

struct Provenance {
    ProvenanceKind kind = ProvenanceKind::Unknown;
    std::vector<SourceRef> sources;
};

/// Walks one sink argument backwards through its reaching definitions.
/// Constant when every contributing leaf is a literal; SourceTainted when any
/// leaf is a source call or a root-function parameter; Unknown otherwise.
Provenance backtrack_argument(const cfg::Cfg& cfg, const dataflow::ConstraintTable& ct,
                              int sink_node, const cfg::ArgInfo& arg,
                              const TriggerWords& tw);

/// Field-sensitive forward propagation state for one source.
struct Propagation {
    std::vector<int> chain;                    // list_TF: append order, source first
    std::set<cfg::Identity> tainted;           // tainted_attr
    std::map<cfg::Identity, int> introducer;   // taint path -> chain node that set it
    std::map<int, int> via;                    // chain node -> parent chain node
};

/// Taint propagation over the assignment-node list: a node joins the flow
/// when it is new, forward-reachable from the chain member that introduced
/// the taint it reads, and its read attribute paths are actually tainted.
/// The scan repeats until the tainted set stops growing, so loop-carried
/// flows converge.
Propagation propagate_taint(const cfg::Cfg& lat, const cfg::Reachability& reach,
                            int source_node, const std::vector<int>& assignments,
                            const TriggerWords& tw);

struct TaintFlow {
    SourceRef source;
    SinkSite sink;
    int arg_pos = 1;               // 1-based tainted argument position
    std::vector<int> chain;        // assignment node ids, source first
    std::set<cfg::Identity> tainted_attrs;
    bool sanitized = false;
    bool web_reachable = false;
    std::string drop_reason;       // nonempty once framework rules drop it
};

/// True when every read carrying the taint across some chain link (or into
/// the sink argument) goes through a sanitizer call.
bool is_sanitized(const TaintFlow& flow, const cfg::Cfg& cfg, const TriggerWords& tw);

struct FrameworkDecision {
    bool keep = true;
    std::string reason;
};

/// LuCI dispatching rules: keep flows sourced from the HTTP request
/// interface, from parameters of dispatch-registered handlers, or from
/// external sources inside a controller directory; drop the rest.
FrameworkDecision apply_framework_rules(const TaintFlow& flow, const cfg::Cfg& root,
                                        const TriggerWords& tw);

VulnType classify(const SinkSite& sink);

/// Full sink-first pass over one expanded root: find sinks, backtrack their
/// arguments, propagate from each discovered source, and assemble flows
/// (sanitized ones flagged, framework rules not yet applied). One flow per
/// (sink site, argument, source), shortest chain wins.
std::vector<TaintFlow> analyze_root(const cfg::Cfg& root, const TriggerWords& tw);

}  // namespace luciscan::taint
