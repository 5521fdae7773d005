// SPDX-License-Identifier: Apache-2.0
#include "luciscan/pipeline.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "luciscan/cfg_build.hpp"
#include "luciscan/collect.hpp"
#include "luciscan/inline.hpp"
#include "luciscan/llm.hpp"
#include "luciscan/parallel.hpp"
#include "luciscan/parser.hpp"
#include "luciscan/prescan.hpp"
#include "luciscan/reaching.hpp"
#include "luciscan/taint.hpp"

namespace fs = std::filesystem;

namespace luciscan::pipeline {

using cfg::Cfg;
using report::Finding;
using report::ScanReport;

void ScanConfig::validate() const {
    if (root.empty()) throw ConfigError("scan root is required");
    if (inline_depth < 0) throw ConfigError("--inline-depth must be >= 0");
    if (workers < 1) throw ConfigError("--workers must be >= 1");
    if (llm.enabled && llm.votes < 1) throw ConfigError("--llm-votes must be >= 1");
    if (llm.enabled && llm.endpoint.empty())
        throw ConfigError("--llm-prune needs --llm-endpoint");
    if (!llm.enabled && !llm.endpoint.empty())
        throw ConfigError("--llm-endpoint without --llm-prune has no effect");
}

namespace {

struct FileUnit {
    std::string path;  // relative, '/'-separated
    std::string raw_text;
    frontend::PrescanResult pre;
    frontend::AstNodePtr ast;  // null on parse failure
    cfg::BuildResult built;
    std::vector<cfg::DispatchEntry> entries;
    report::ParseFailure failure;
    bool failed = false;
    std::vector<std::string> lines;  // of the sanitized text
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    lines.push_back(cur);
    return lines;
}

std::string line_excerpt(const std::vector<std::string>& lines, int line) {
    if (line < 1 || static_cast<std::size_t>(line) > lines.size()) return "";
    std::string s = lines[static_cast<std::size_t>(line - 1)];
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

struct ScanState {
    std::vector<FileUnit> units;
    std::map<std::string, const FileUnit*> unit_by_path;
    std::vector<std::unique_ptr<Cfg>> all_cfgs;  // owned; dict points in here
    std::vector<cfg::DispatchEntry> all_entries;
    taint::TriggerWords tw;
};

// full source of one function (or the whole chunk) for LLM prompts
std::string function_source(const ScanState& st, const std::string& file,
                            const std::string& func) {
    auto it = st.unit_by_path.find(file);
    if (it == st.unit_by_path.end()) return "";
    const FileUnit& u = *it->second;
    for (const auto& c : u.built.cfgs) {
        if (c->name != func) continue;
        const auto& sp = c->def_span;
        if (sp.offset_end > sp.offset_begin &&
            sp.offset_end <= u.pre.sanitized_text.size())
            return u.pre.sanitized_text.substr(sp.offset_begin,
                                               sp.offset_end - sp.offset_begin);
    }
    if (func == "<chunk>") return u.pre.sanitized_text;
    return "";
}

Finding flow_to_finding(const taint::TaintFlow& flow, const Cfg& root,
                        const ScanState& st) {
    Finding f;
    f.type = taint::classify(flow.sink);
    f.file = flow.sink.file;
    f.sink_name = flow.sink.qname;
    f.sink_line = flow.sink.span.line_begin;
    f.sink_col = flow.sink.span.col_begin;
    f.arg = flow.arg_pos;
    f.source_name = flow.source.name;
    f.source_line = flow.source.span.line_begin;
    f.source_col = flow.source.span.col_begin;
    f.web_reachable = flow.web_reachable;
    f.sanitized = false;
    for (int id : flow.chain) {
        const auto& node = root.node(id);
        report::ChainEntry e;
        e.func = node.func;
        e.line = node.span.line_begin;
        auto uit = st.unit_by_path.find(node.file);
        e.excerpt = uit != st.unit_by_path.end()
                        ? line_excerpt(uit->second->lines, e.line)
                        : node.label;
        f.chain.push_back(std::move(e));
    }
    f.id = report::finding_id(f.file, f.sink_name, f.arg, f.source_name);
    return f;
}

}  // namespace

ScanOutcome scan(const ScanConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    config.validate();

    ScanOutcome outcome;
    ScanReport& rep = outcome.report;
    rep.tool_version = kToolVersion;
    rep.scan_root = config.root;

    ScanState st;
    st.tw = config.trigger_words_path.empty()
                ? taint::TriggerWords::defaults()
                : taint::TriggerWords::load(config.trigger_words_path);
    frontend::FixupTable fixups = config.fixups_path.empty()
                                      ? frontend::FixupTable::defaults()
                                      : frontend::FixupTable::load(config.fixups_path);

    frontend::CollectOptions copts;
    copts.luci_only = config.luci_only;
    copts.include = config.include;
    copts.exclude = config.exclude;
    DiagnosticList collect_diags;
    std::vector<std::string> files = frontend::collect_files(config.root, copts, collect_diags);
    rep.file_count = static_cast<int>(files.size());

    // fan out per file: read, prescan, parse, lower, extract entries
    st.units.resize(files.size());
    parallel_for(files.size(), config.workers, [&](std::size_t i) {
        FileUnit& u = st.units[i];
        u.path = files[i];
        u.raw_text = read_file(fs::path(config.root) / files[i]);
        u.pre = frontend::prescan_source(u.raw_text, fixups);
        u.lines = split_lines(u.pre.sanitized_text);
        try {
            u.ast = frontend::parse_chunk(u.pre.sanitized_text, u.path);
        } catch (const SyntaxError& e) {
            u.failed = true;
            u.failure = {u.path, e.line(), e.col(), e.message()};
            return;
        }
        u.built = cfg::build_cfgs(*u.ast, u.path, u.pre.sanitized_text);
        u.entries = cfg::extract_dispatch_entries(*u.ast, u.path, u.built.diags);
    });

    // serial merge in sorted-path order: dictionary last-wins is deterministic
    std::vector<Cfg*> pool;
    for (auto& u : st.units) {
        st.unit_by_path[u.path] = &u;
        if (u.failed) {
            rep.parse_failures.push_back(u.failure);
            continue;
        }
        for (auto& c : u.built.cfgs) pool.push_back(c.get());
        for (auto& e : u.entries) st.all_entries.push_back(e);
    }
    cfg::FunctionDict dict = cfg::build_function_dictionary(pool, config.dict_approx);

    DiagnosticList dispatch_diags;
    cfg::attach_dispatched(pool, st.all_entries, dict, dispatch_diags);

    if (!config.dump_cfg_path.empty()) {
        std::ofstream out(config.dump_cfg_path, std::ios::binary);
        for (const Cfg* c : pool) out << cfg::to_dot(*c);
    }

    // every chunk and every named function is an analysis root
    std::vector<const Cfg*> roots;
    for (const Cfg* c : pool) roots.push_back(c);

    cfg::InlineOptions iopts;
    iopts.max_depth = config.inline_depth;
    for (const auto& s : st.tw.sources) iopts.never_inline.insert(s);
    for (const auto& s : st.tw.sinks) iopts.never_inline.insert(s.name);
    for (const auto& s : st.tw.sanitizers) iopts.never_inline.insert(s);

    struct RootResult {
        std::vector<Finding> findings;
        int suppressed = 0;
        int dropped = 0;
        std::string reaching_dump;
    };
    std::vector<RootResult> results(roots.size());
    bool want_reaching = !config.dump_reaching_path.empty();

    parallel_for(roots.size(), config.workers, [&](std::size_t i) {
        const Cfg& base = *roots[i];
        cfg::InlineExpansion ex = cfg::expand(base, dict, iopts);
        const Cfg& root = ex.cfg;
        if (want_reaching) {
            auto ct = dataflow::analyze(root);
            results[i].reaching_dump =
                "== " + root.source_path + " :: " + root.name + "\n" +
                dataflow::dump(ct, root);
        }
        std::vector<taint::TaintFlow> flows = taint::analyze_root(root, st.tw);
        for (auto& flow : flows) {
            if (flow.sanitized) {
                ++results[i].suppressed;
                continue;
            }
            if (config.framework_rules) {
                auto decision = taint::apply_framework_rules(flow, root, st.tw);
                if (!decision.keep) {
                    ++results[i].dropped;
                    continue;
                }
            }
            results[i].findings.push_back(flow_to_finding(flow, root, st));
        }
    });

    if (want_reaching) {
        std::ofstream out(config.dump_reaching_path, std::ios::binary);
        for (const auto& r : results) out << r.reaching_dump;
    }

    std::vector<Finding> raw;
    for (auto& r : results) {
        rep.suppressed_sanitized += r.suppressed;
        rep.dropped_framework += r.dropped;
        for (auto& f : r.findings) raw.push_back(std::move(f));
    }
    rep.findings = report::dedup(std::move(raw));

    if (config.llm.enabled) {
        llm::HttpClientOptions hopts;
        hopts.endpoint = config.llm.endpoint;
        hopts.model = config.llm.model;
        auto client = llm::make_http_client(hopts);
        llm::PruneOptions popts;
        popts.votes = config.llm.votes;
        popts.model = config.llm.model;
        auto chain_sources = [&](const Finding& f) {
            std::vector<llm::ChainFunction> fns;
            std::set<std::string> seen;
            for (const auto& e : f.chain) {
                if (!seen.insert(e.func).second) continue;
                std::string src = function_source(st, f.file, e.func);
                if (!src.empty()) fns.push_back({e.func, std::move(src)});
            }
            if (fns.empty()) {
                std::string src = function_source(st, f.file, "<chunk>");
                if (!src.empty()) fns.push_back({"<chunk>", std::move(src)});
            }
            return fns;
        };
        llm::PruneOutcome pr = llm::prune(rep.findings, chain_sources, *client, popts);
        rep.llm = pr.stats;
        std::vector<Finding> kept;
        for (auto& f : rep.findings) {
            if (f.llm_label && *f.llm_label == report::LlmLabel::FalseAlarm)
                rep.pruned.push_back(std::move(f));
            else
                kept.push_back(std::move(f));
        }
        rep.findings = std::move(kept);
    }

    outcome.metrics.files_parsed = files.size();
    outcome.metrics.dict_entries = dict.size();
    outcome.metrics.roots_analyzed = roots.size();
    auto t1 = std::chrono::steady_clock::now();
    outcome.metrics.wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    struct rusage ru{};
    if (getrusage(RUSAGE_SELF, &ru) == 0) outcome.metrics.peak_rss_kb = ru.ru_maxrss;

    outcome.exit_code = rep.findings.empty() ? 0 : 1;
    return outcome;
}

namespace {

struct Expectation {
    std::string type;
    std::string sink;
    int sink_line = 0;  // 0: any line
    std::string source;  // empty: any source
    int arg = 0;         // 0: any arg
};

struct FixtureExpect {
    std::vector<Expectation> findings;
    std::string chain_text;  // expected arrow rendering, optional
};

FixtureExpect load_expect(const fs::path& p) {
    FixtureExpect fx;
    nlohmann::json doc = nlohmann::json::parse(read_file(p));
    for (const auto& e : doc.value("findings", nlohmann::json::array())) {
        Expectation x;
        x.type = e.at("type").get<std::string>();
        x.sink = e.at("sink").get<std::string>();
        x.sink_line = e.value("sink_line", 0);
        x.source = e.value("source", std::string());
        x.arg = e.value("arg", 0);
        fx.findings.push_back(std::move(x));
    }
    fx.chain_text = doc.value("chain_text", std::string());
    return fx;
}

bool matches(const Expectation& x, const Finding& f) {
    if (x.type != taint::to_string(f.type)) return false;
    if (x.sink != f.sink_name) return false;
    if (x.sink_line != 0 && x.sink_line != f.sink_line) return false;
    if (!x.source.empty() && x.source != f.source_name) return false;
    if (x.arg != 0 && x.arg != f.arg) return false;
    return true;
}

std::string chain_arrow_text(const Finding& f) {
    std::string out;
    std::string prev;
    for (const auto& e : f.chain) {
        if (e.func == prev) continue;
        if (!out.empty()) out += " → ";
        out += e.func;
        prev = e.func;
    }
    return out;
}

}  // namespace

SelftestResult selftest(const std::string& corpus_dir, const ScanConfig& base) {
    SelftestResult res;
    std::ostringstream out;

    std::vector<fs::path> fixture_dirs;
    for (auto it = fs::recursive_directory_iterator(corpus_dir);
         it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_regular_file() && it->path().filename() == "expect.json")
            fixture_dirs.push_back(it->path().parent_path());
    }
    std::sort(fixture_dirs.begin(), fixture_dirs.end());

    std::map<std::string, std::pair<int, int>> per_type;  // type -> {expected, detected}
    int clean_fixtures = 0, false_alarms = 0;
    std::vector<std::string> failures;

    for (const auto& dir : fixture_dirs) {
        ++res.fixtures;
        FixtureExpect fx = load_expect(dir / "expect.json");
        ScanConfig cfg = base;
        cfg.root = dir.string();
        ScanOutcome sc = scan(cfg);

        std::vector<bool> used(sc.report.findings.size(), false);
        bool fixture_ok = true;
        for (const auto& x : fx.findings) {
            per_type[x.type].first++;
            bool hit = false;
            for (std::size_t i = 0; i < sc.report.findings.size(); ++i) {
                if (used[i]) continue;
                if (matches(x, sc.report.findings[i])) {
                    used[i] = true;
                    hit = true;
                    per_type[x.type].second++;
                    if (!fx.chain_text.empty() &&
                        chain_arrow_text(sc.report.findings[i]) != fx.chain_text) {
                        fixture_ok = false;
                        failures.push_back(dir.string() + ": chain mismatch, got '" +
                                           chain_arrow_text(sc.report.findings[i]) + "'");
                    }
                    break;
                }
            }
            if (!hit) {
                fixture_ok = false;
                failures.push_back(dir.string() + ": missing " + x.type + " at " + x.sink);
            }
        }
        int extras = 0;
        for (std::size_t i = 0; i < sc.report.findings.size(); ++i)
            if (!used[i]) ++extras;
        if (extras > 0) {
            fixture_ok = false;
            false_alarms += extras;
            failures.push_back(dir.string() + ": " + std::to_string(extras) +
                               " unexpected finding(s)");
        }
        if (fx.findings.empty()) ++clean_fixtures;
        if (!fixture_ok) ++res.failed;
    }

    out << "Type   Cases  Detected  Recall\n";
    int tot_cases = 0, tot_hit = 0;
    for (const char* t : {"CI", "RCE", "PAT", "SQLI"}) {
        auto it = per_type.find(t);
        int cases = it == per_type.end() ? 0 : it->second.first;
        int hit = it == per_type.end() ? 0 : it->second.second;
        tot_cases += cases;
        tot_hit += hit;
        char line[128];
        std::snprintf(line, sizeof line, "%-6s %5d  %8d  %6.2f%%\n", t, cases, hit,
                      cases ? 100.0 * hit / cases : 100.0);
        out << line;
    }
    char line[128];
    std::snprintf(line, sizeof line, "%-6s %5d  %8d  %6.2f%%\n", "Total", tot_cases, tot_hit,
                  tot_cases ? 100.0 * tot_hit / tot_cases : 100.0);
    out << line;
    out << "clean fixtures: " << clean_fixtures << ", false alarms: " << false_alarms
        << "\n";
    for (const auto& f : failures) out << "FAIL " << f << "\n";
    res.summary = out.str();
    return res;
}

}  // namespace luciscan::pipeline
