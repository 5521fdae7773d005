// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "luciscan/diag.hpp"

namespace luciscan::frontend {

struct CollectOptions {
    std::vector<std::string> patterns = {"**/*.lua"};
    std::vector<std::string> include;  // extra keep filters
    std::vector<std::string> exclude;
    bool luci_only = false;  // restrict to usr/lib/lua/luci when present
};

/// Glob match supporting '*', '?' and '**' path components.
bool glob_match(const std::string& pattern, const std::string& path);

/// All matching files under root, as '/'-separated paths relative to root,
/// sorted lexicographically. Throws RootNotFound; unreadable entries become
/// warnings in `diags`.
std::vector<std::string> collect_files(const std::string& root, const CollectOptions& opts,
                                       DiagnosticList& diags);

}  // namespace luciscan::frontend
