// SPDX-License-Identifier: Apache-2.0
#include "luciscan/report.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "luciscan/diag.hpp"

namespace luciscan::report {

using ordered = nlohmann::ordered_json;

const char* to_string(LlmLabel l) {
    switch (l) {
        case LlmLabel::TrueAlarm: return "TRUE_ALARM";
        case LlmLabel::FalseAlarm: return "FALSE_ALARM";
        case LlmLabel::Unevaluated: return "UNEVALUATED";
    }
    return "?";
}

std::optional<LlmLabel> llm_label_from(const std::string& s) {
    if (s == "TRUE_ALARM") return LlmLabel::TrueAlarm;
    if (s == "FALSE_ALARM") return LlmLabel::FalseAlarm;
    if (s == "UNEVALUATED") return LlmLabel::Unevaluated;
    return std::nullopt;
}

std::string finding_id(const std::string& file, const std::string& sink_name, int arg,
                       const std::string& source_name) {
    // FNV-1a 64
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    mix(file);
    mix(sink_name);
    mix(std::to_string(arg));
    mix(source_name);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<Finding> dedup(std::vector<Finding> findings) {
    std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        return std::tie(a.file, a.sink_line, a.arg, a.sink_name, a.source_name) <
               std::tie(b.file, b.sink_line, b.arg, b.sink_name, b.source_name);
    });
    std::map<std::tuple<std::string, int, std::string>, std::size_t> seen;
    std::vector<Finding> out;
    for (auto& f : findings) {
        auto key = std::make_tuple(f.sink_name, f.arg, f.source_name);
        auto it = seen.find(key);
        if (it == seen.end()) {
            f.duplicates = 1;
            seen.emplace(key, out.size());
            out.push_back(std::move(f));
        } else {
            ++out[it->second].duplicates;
        }
    }
    std::sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
        return std::tie(a.file, a.sink_line, a.arg, a.sink_name) <
               std::tie(b.file, b.sink_line, b.arg, b.sink_name);
    });
    return out;
}

namespace {

ordered finding_to_json(const Finding& f) {
    ordered j;
    j["id"] = f.id;
    j["type"] = taint::to_string(f.type);
    j["file"] = f.file;
    j["sink"] = {{"name", f.sink_name}, {"line", f.sink_line}, {"col", f.sink_col},
                 {"arg", f.arg}};
    j["source"] = {{"name", f.source_name}, {"line", f.source_line}, {"col", f.source_col}};
    ordered chain = ordered::array();
    for (const auto& e : f.chain)
        chain.push_back({{"func", e.func}, {"line", e.line}, {"excerpt", e.excerpt}});
    j["chain"] = std::move(chain);
    j["web_reachable"] = f.web_reachable;
    j["sanitized"] = f.sanitized;
    j["duplicates"] = f.duplicates;
    if (f.llm_label) j["llm_label"] = to_string(*f.llm_label);
    if (f.llm_votes)
        j["llm_votes"] = {{"true_alarm", f.llm_votes->true_alarm},
                          {"false_alarm", f.llm_votes->false_alarm},
                          {"unparseable", f.llm_votes->unparseable}};
    return j;
}

Finding finding_from_json(const ordered& j) {
    Finding f;
    f.id = j.at("id").get<std::string>();
    f.type = *taint::vuln_type_from(j.at("type").get<std::string>());
    f.file = j.at("file").get<std::string>();
    f.sink_name = j.at("sink").at("name").get<std::string>();
    f.sink_line = j.at("sink").at("line").get<int>();
    f.sink_col = j.at("sink").at("col").get<int>();
    f.arg = j.at("sink").at("arg").get<int>();
    f.source_name = j.at("source").at("name").get<std::string>();
    f.source_line = j.at("source").at("line").get<int>();
    f.source_col = j.at("source").at("col").get<int>();
    for (const auto& e : j.at("chain")) {
        ChainEntry ce;
        ce.func = e.at("func").get<std::string>();
        ce.line = e.at("line").get<int>();
        ce.excerpt = e.at("excerpt").get<std::string>();
        f.chain.push_back(std::move(ce));
    }
    f.web_reachable = j.at("web_reachable").get<bool>();
    f.sanitized = j.at("sanitized").get<bool>();
    f.duplicates = j.at("duplicates").get<int>();
    if (j.contains("llm_label")) f.llm_label = llm_label_from(j["llm_label"].get<std::string>());
    if (j.contains("llm_votes")) {
        VoteCounts v;
        v.true_alarm = j["llm_votes"].at("true_alarm").get<int>();
        v.false_alarm = j["llm_votes"].at("false_alarm").get<int>();
        v.unparseable = j["llm_votes"].at("unparseable").get<int>();
        f.llm_votes = v;
    }
    return f;
}

void count_types(const std::vector<Finding>& fs, int& ci, int& rce, int& pat, int& sqli) {
    for (const auto& f : fs) {
        switch (f.type) {
            case taint::VulnType::CI: ++ci; break;
            case taint::VulnType::RCE: ++rce; break;
            case taint::VulnType::PAT: ++pat; break;
            case taint::VulnType::SQLI: ++sqli; break;
        }
    }
}

}  // namespace

std::string emit_json(const ScanReport& r) {
    ordered j;
    j["tool"] = r.tool;
    j["tool_version"] = r.tool_version;
    j["scan_root"] = r.scan_root;
    j["file_count"] = r.file_count;
    ordered failures = ordered::array();
    for (const auto& p : r.parse_failures)
        failures.push_back(
            {{"file", p.file}, {"line", p.line}, {"col", p.col}, {"message", p.message}});
    j["parse_failures"] = std::move(failures);
    ordered findings = ordered::array();
    for (const auto& f : r.findings) findings.push_back(finding_to_json(f));
    j["findings"] = std::move(findings);
    ordered pruned = ordered::array();
    for (const auto& f : r.pruned) pruned.push_back(finding_to_json(f));
    j["pruned"] = std::move(pruned);

    int ci = 0, rce = 0, pat = 0, sqli = 0;
    count_types(r.findings, ci, rce, pat, sqli);
    j["stats"] = {
        {"findings", static_cast<int>(r.findings.size())},
        {"by_type", {{"CI", ci}, {"RCE", rce}, {"PAT", pat}, {"SQLI", sqli}}},
        {"pruned", static_cast<int>(r.pruned.size())},
        {"suppressed_sanitized", r.suppressed_sanitized},
        {"dropped_framework", r.dropped_framework},
        {"llm",
         {{"requests", r.llm.requests},
          {"prompt_tokens", r.llm.prompt_tokens},
          {"response_tokens", r.llm.response_tokens}}},
    };
    return j.dump(2) + "\n";
}

ScanReport parse_json(const std::string& bytes) {
    ordered j;
    try {
        j = ordered::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("report parse: ") + e.what());
    }
    ScanReport r;
    r.tool = j.at("tool").get<std::string>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.scan_root = j.at("scan_root").get<std::string>();
    r.file_count = j.at("file_count").get<int>();
    for (const auto& p : j.at("parse_failures")) {
        ParseFailure pf;
        pf.file = p.at("file").get<std::string>();
        pf.line = p.at("line").get<int>();
        pf.col = p.at("col").get<int>();
        pf.message = p.at("message").get<std::string>();
        r.parse_failures.push_back(std::move(pf));
    }
    for (const auto& f : j.at("findings")) r.findings.push_back(finding_from_json(f));
    for (const auto& f : j.at("pruned")) r.pruned.push_back(finding_from_json(f));
    r.suppressed_sanitized = j.at("stats").at("suppressed_sanitized").get<int>();
    r.dropped_framework = j.at("stats").at("dropped_framework").get<int>();
    r.llm.requests = j.at("stats").at("llm").at("requests").get<int>();
    r.llm.prompt_tokens = j.at("stats").at("llm").at("prompt_tokens").get<std::int64_t>();
    r.llm.response_tokens = j.at("stats").at("llm").at("response_tokens").get<std::int64_t>();
    return r;
}

std::string emit_text(const ScanReport& r) {
    std::string out;
    out += "scan of " + r.scan_root + ": " + std::to_string(r.file_count) + " files, " +
           std::to_string(r.findings.size()) + " finding(s)";
    if (!r.pruned.empty()) out += ", " + std::to_string(r.pruned.size()) + " pruned";
    out += "\n";
    if (!r.parse_failures.empty()) {
        out += "\nparse failures:\n";
        for (const auto& p : r.parse_failures)
            out += "  " + p.file + ":" + std::to_string(p.line) + ":" +
                   std::to_string(p.col) + ": " + p.message + "\n";
    }
    auto render = [&](const Finding& f) {
        out += "\n[" + std::string(taint::to_string(f.type)) + "] " + f.file + ":" +
               std::to_string(f.sink_line) + ":" + std::to_string(f.sink_col) + " " +
               f.sink_name + " (arg " + std::to_string(f.arg) + ")\n";
        out += "  source: " + f.source_name + " at line " + std::to_string(f.source_line) +
               "\n";
        if (!f.chain.empty()) {
            out += "  chain:  ";
            std::string prev;
            bool first = true;
            for (const auto& e : f.chain) {
                if (e.func == prev) continue;
                if (!first) out += " → ";
                out += e.func;
                prev = e.func;
                first = false;
            }
            out += "\n";
            for (const auto& e : f.chain)
                out += "    line " + std::to_string(e.line) + ": " + e.excerpt + "\n";
        }
        if (f.duplicates > 1)
            out += "  duplicates: " + std::to_string(f.duplicates) + "\n";
        if (f.llm_label) out += "  llm: " + std::string(to_string(*f.llm_label)) + "\n";
    };
    for (const auto& f : r.findings) render(f);
    if (!r.pruned.empty()) {
        out += "\npruned as false alarms:\n";
        for (const auto& f : r.pruned) render(f);
    }
    return out;
}

}  // namespace luciscan::report
