// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "luciscan/ast.hpp"
#include "luciscan/cfg.hpp"
#include "luciscan/diag.hpp"

namespace luciscan::cfg {

struct BuildResult {
    std::vector<std::unique_ptr<Cfg>> cfgs;  // [0] is the chunk
    DiagnosticList diags;
};

/// Lowers a parsed chunk into one Cfg per function plus one for the chunk.
/// `source` is the text the chunk was parsed from (used for node labels).
BuildResult build_cfgs(const frontend::AstNode& chunk, const std::string& file,
                       std::string_view source);

/// Registers every named Cfg; last definition of a name wins in approximate
/// mode.
FunctionDict build_function_dictionary(const std::vector<Cfg*>& cfgs,
                                       bool approximate = true);

/// Pulls `entry({...}, target, ...)` dispatcher registrations out of an AST.
std::vector<DispatchEntry> extract_dispatch_entries(const frontend::AstNode& chunk,
                                                    const std::string& file,
                                                    DiagnosticList& diags);

/// Ensures every dispatch target's Cfg is in the analysis root set and marks
/// it web-reachable. Unresolvable targets produce TargetNotFound diagnostics.
std::vector<Cfg*> attach_dispatched(std::vector<Cfg*> roots,
                                    const std::vector<DispatchEntry>& entries,
                                    const FunctionDict& dict,
                                    DiagnosticList& diags);

/// Graphviz rendering for --dump-cfg.
std::string to_dot(const Cfg& cfg);

}  // namespace luciscan::cfg
