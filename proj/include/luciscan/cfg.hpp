// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "luciscan/span.hpp"

namespace luciscan::cfg {

/// Variable identity: a plain root ("x") or an attribute path ("self.name").
/// "t.[]" stands for a dynamically indexed element of t. Inline shadowing
/// renames the root segment: "self#3.name".
using Identity = std::string;

std::string identity_root(const Identity& id);
bool is_attr_path(const Identity& id);

/// True when one identity is the other, or a dot-boundary prefix of it
/// ("t" overlaps "t.f"; "t.f" does not overlap "t.g").
bool path_overlap(const Identity& a, const Identity& b);

/// Replaces the root segment ("self.name" + "#3" -> "self#3.name").
Identity rename_root(const Identity& id, const std::string& suffix);

/// A variable read, tagged with the static names of the calls whose argument
/// lists enclose it (innermost last). Used for sanitizer detection.
struct ReadRef {
    Identity ident;
    std::vector<std::string> enclosing_calls;
    std::vector<int> enclosing_call_ids;
};

/// A defined identity. Weak definitions (dynamic-index writes) never kill.
struct Def {
    Identity path;
    bool weak = false;
};

/// One call-site use nested inside an expression (for sanitizer checks).
struct CallUse {
    std::string qname;
    std::vector<std::string> enclosing_calls;
};

struct ArgInfo {
    std::vector<ReadRef> reads;
    std::vector<CallUse> calls;
    bool literal_only = true;
    Identity bare_identity;    // set when the argument is exactly one identity
    int result_of_call = -1;   // call id when the argument is exactly one call
    std::string excerpt;
};

struct CallRef {
    int call_id = -1;
    std::string qname;   // empty when dynamic
    bool dynamic = false;
    bool is_method = false;
    Span span;
    std::vector<ArgInfo> args;            // explicit arguments as written
    std::vector<ReadRef> receiver_reads;  // method receiver
};

/// How one defined identity gets its value.
struct RhsBinding {
    Def target;
    std::vector<ReadRef> reads;
    std::vector<CallUse> calls;
    bool literal_only = true;
    Identity alias_of;          // bare-identity copy
    int result_of_call = -1;    // bound to exactly one call's result
};

enum class CfgNodeKind { Entry, Exit, Assignment, Statement, Condition, CallSite };

const char* to_string(CfgNodeKind k);

struct CfgNode {
    int id = -1;
    CfgNodeKind kind = CfgNodeKind::Statement;
    std::string label;
    Span span;
    std::string file;  // inlined nodes keep their defining file
    std::vector<int> preds;
    std::vector<int> succs;

    std::vector<Def> lh;
    std::vector<Identity> rh;  // reads plus called qualified names
    std::vector<CallRef> calls;
    std::vector<RhsBinding> bindings;

    std::string func;            // enclosing function (inline provenance)
    bool synthetic_param = false;
    std::string param_name;
    int top_call_id = -1;  // the statement's own call, for CallSite nodes

    bool defines(const Identity& id) const;
};

struct Cfg {
    std::string name;  // qualified function name or "<chunk>"
    std::string source_path;
    Span def_span;
    std::vector<CfgNode> nodes;  // program order; node id == index
    int entry_id = 0;
    int exit_id = 0;

    std::vector<std::string> params;
    bool has_varargs = false;
    std::set<std::string> locals;  // local roots, for inline renaming
    bool is_public = false;        // global-style definition
    bool is_method = false;
    bool web_reachable = false;

    int next_call_id = 0;

    const CfgNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
    CfgNode& node(int id) { return nodes[static_cast<std::size_t>(id)]; }

    std::vector<int> assignment_ids() const;
};

/// Structural invariant check: mutual pred/succ links, one Entry with a
/// single successor, one Exit with no successors, full reachability.
std::vector<std::string> validate(const Cfg& cfg);

/// Forward reachability over successor edges (a node reaches itself).
class Reachability {
  public:
    explicit Reachability(const Cfg& cfg) : cfg_(cfg) {}
    bool in(int from, int to) const;

  private:
    const Cfg& cfg_;
    mutable std::unordered_map<int, std::vector<bool>> cache_;
};

/// Name-keyed function dictionary. In approximate mode a later definition of
/// the same name replaces the earlier one; in exact mode every definition
/// instance is kept under its (name, file, line) key and lookups scan the
/// whole registration list.
class FunctionDict {
  public:
    explicit FunctionDict(bool approximate = true) : approximate_(approximate) {}

    void add(Cfg* cfg);
    Cfg* resolve(const std::string& qname) const;
    std::size_t size() const;
    bool approximate() const { return approximate_; }

    struct Instance {
        std::string name;
        std::string file;
        int line = 0;
        Cfg* cfg = nullptr;
    };
    const std::vector<Instance>& instances() const { return instances_; }

  private:
    bool approximate_;
    std::unordered_map<std::string, Cfg*> by_name_;  // approximate mode
    std::vector<Instance> instances_;                // exact mode
};

struct DispatchEntry {
    std::vector<std::string> path_segments;
    std::vector<bool> segment_dynamic;
    bool path_dynamic = false;      // whole path not a literal table
    std::string target;             // callee name for call("f") / bare references
    std::string target_kind;        // "call", "template", "cbi", "ref", ...
    std::string title;
    double order = 0;
    bool has_order = false;
    Span source_span;
    std::string file;
    bool from_controller = false;
};

}  // namespace luciscan::cfg
