// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>

#include "luciscan/cfg.hpp"
#include "luciscan/diag.hpp"

namespace luciscan::cfg {

struct InlineOptions {
    int max_depth = 3;
    std::set<std::string> never_inline;  // trigger words keep their call sites
};

enum class InlineStatus { Ok, UnresolvedCallee, DepthExceeded, NotEligible };

struct InlineExpansion {
    Cfg cfg;
    DiagnosticList diags;
    int splice_count = 0;
};

/// Expands every eligible static call in `root` by splicing a renamed copy of
/// the callee at the call site, bounded by `max_depth` nested splices. Formal
/// parameters become shadow assignments `p#<site> := <actual>`; returns become
/// assignments into `<fn>$ret#<site>`. The root Cfg itself is not modified.
InlineExpansion expand(const Cfg& root, const FunctionDict& dict,
                       const InlineOptions& opts = {});

/// Splices one call site. `call_id` of -1 picks the node's top-level call.
/// Expansion stops there: calls inside the spliced body are left alone.
InlineStatus inline_call(Cfg& caller, int node_id, int call_id, const FunctionDict& dict,
                         int depth, const InlineOptions& opts, DiagnosticList& diags);

}  // namespace luciscan::cfg
