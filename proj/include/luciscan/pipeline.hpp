// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "luciscan/report.hpp"

namespace luciscan::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

struct LlmConfig {
    bool enabled = false;
    std::string endpoint;
    std::string model = "gpt-4";
    int votes = 5;
};

struct ScanConfig {
    std::string root;
    bool luci_only = false;
    std::vector<std::string> include;
    std::vector<std::string> exclude;
    std::string trigger_words_path;
    std::string fixups_path;
    bool framework_rules = true;
    int inline_depth = 3;
    bool dict_approx = true;
    LlmConfig llm;
    int workers = 1;
    std::string dump_cfg_path;       // DOT output for every built Cfg
    std::string dump_reaching_path;  // reaching tables of every analyzed root

    void validate() const;  // throws ConfigError
};

struct ScanMetrics {
    std::int64_t wall_ms = 0;
    std::int64_t peak_rss_kb = 0;  // working-set estimate (ru_maxrss)
    std::size_t dict_entries = 0;
    std::size_t roots_analyzed = 0;
    std::size_t files_parsed = 0;
};

struct ScanOutcome {
    report::ScanReport report;
    ScanMetrics metrics;
    int exit_code = 0;  // 0 clean, 1 findings, 2 fatal (thrown instead)
};

/// Runs the whole pipeline: collect, prescan, parse, lower, dictionary,
/// dispatch, inline, reaching definitions, taint, framework rules, optional
/// LLM pruning, report. Per-file failures never abort the scan.
ScanOutcome scan(const ScanConfig& config);

struct SelftestResult {
    int fixtures = 0;
    int failed = 0;
    std::string summary;  // per-type recall table plus failures
};

/// Runs scan() per fixture directory (any directory holding expect.json)
/// and diffs findings against the expectations.
SelftestResult selftest(const std::string& corpus_dir, const ScanConfig& base);

}  // namespace luciscan::pipeline
