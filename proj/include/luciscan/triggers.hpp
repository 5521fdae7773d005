// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace luciscan::taint {

enum class VulnType { CI, RCE, PAT, SQLI };

const char* to_string(VulnType t);
std::optional<VulnType> vuln_type_from(const std::string& s);

struct SinkSpec {
    std::string name;           // qualified name, or "*.m" matching any receiver
    std::vector<int> args;      // 1-based tainted argument positions
    VulnType type = VulnType::CI;
};

/// The <sources, sinks, sanitizers> vocabulary plus dispatcher conventions.
struct TriggerWords {
    std::vector<std::string> sources;
    std::vector<SinkSpec> sinks;
    std::vector<std::string> sanitizers;

    bool is_source(const std::string& qname) const;
    bool is_sanitizer(const std::string& qname) const;
    const SinkSpec* match_sink(const std::string& qname) const;

    /// Sources in the HTTP request interface family (luci.http.*).
    static bool is_http_source(const std::string& qname);

    /// Built-in vocabulary for LuCI firmware trees.
    static TriggerWords defaults();

    /// JSON file with top-level keys sources, sinks, sanitizers; sink entries
    /// {"name", "args", "type"}. Entries merge over the defaults. Throws
    /// ConfigError with line info on malformed input or on a name appearing
    /// in more than one of the three lists.
    static TriggerWords load(const std::string& path);

    void validate() const;
};

}  // namespace luciscan::taint
