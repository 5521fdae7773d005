// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "luciscan/triggers.hpp"

namespace luciscan::report {

enum class LlmLabel { TrueAlarm, FalseAlarm, Unevaluated };

const char* to_string(LlmLabel l);
std::optional<LlmLabel> llm_label_from(const std::string& s);

struct ChainEntry {
    std::string func;
    int line = 0;
    std::string excerpt;

    bool operator==(const ChainEntry&) const = default;
};

struct VoteCounts {
    int true_alarm = 0;
    int false_alarm = 0;
    int unparseable = 0;

    bool operator==(const VoteCounts&) const = default;
};

struct Finding {
    std::string id;  // stable hash of file + sink + arg + source
    taint::VulnType type = taint::VulnType::CI;
    std::string file;

    std::string sink_name;
    int sink_line = 0;
    int sink_col = 0;
    int arg = 1;

    std::string source_name;
    int source_line = 0;
    int source_col = 0;

    std::vector<ChainEntry> chain;
    bool web_reachable = false;
    bool sanitized = false;  // always false once emitted
    int duplicates = 1;

    std::optional<LlmLabel> llm_label;
    std::optional<VoteCounts> llm_votes;

    bool operator==(const Finding&) const = default;
};

struct LlmStats {
    int requests = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t response_tokens = 0;

    bool operator==(const LlmStats&) const = default;
};

struct ParseFailure {
    std::string file;
    int line = 0;
    int col = 0;
    std::string message;

    bool operator==(const ParseFailure&) const = default;
};

struct ScanReport {
    std::string tool = "luciscan";
    std::string tool_version;
    std::string scan_root;
    int file_count = 0;
    std::vector<ParseFailure> parse_failures;
    std::vector<Finding> findings;
    std::vector<Finding> pruned;  // FALSE_ALARM findings land here, never deleted
    // stats
    int suppressed_sanitized = 0;
    int dropped_framework = 0;
    LlmStats llm;

    bool operator==(const ScanReport&) const = default;
};

/// Deterministic finding id.
std::string finding_id(const std::string& file, const std::string& sink_name, int arg,
                       const std::string& source_name);

/// Collapses findings sharing (sink name, argument, source name) to the
/// lexicographically smallest (file, line) representative, accumulating a
/// duplicates count. Result sorted by (file, sink line, arg).
std::vector<Finding> dedup(std::vector<Finding> findings);

/// Stable byte-exact serialization. No timestamps, no absolute paths.
std::string emit_json(const ScanReport& report);
std::string emit_text(const ScanReport& report);

/// Inverse of emit_json (used by tooling and the round-trip tests).
ScanReport parse_json(const std::string& bytes);

}  // namespace luciscan::report
