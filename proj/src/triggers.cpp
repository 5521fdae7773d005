// SPDX-License-Identifier: Apache-2.0
#include "luciscan/triggers.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "luciscan/diag.hpp"

namespace luciscan::taint {

using nlohmann::json;

const char* to_string(VulnType t) {
    switch (t) {
        case VulnType::CI: return "CI";
        case VulnType::RCE: return "RCE";
        case VulnType::PAT: return "PAT";
        case VulnType::SQLI: return "SQLI";
    }
    return "?";
}

std::optional<VulnType> vuln_type_from(const std::string& s) {
    if (s == "CI") return VulnType::CI;
    if (s == "RCE") return VulnType::RCE;
    if (s == "PAT") return VulnType::PAT;
    if (s == "SQLI" || s == "SQL") return VulnType::SQLI;
    return std::nullopt;
}

bool TriggerWords::is_source(const std::string& qname) const {
    return std::find(sources.begin(), sources.end(), qname) != sources.end();
}

bool TriggerWords::is_sanitizer(const std::string& qname) const {
    return std::find(sanitizers.begin(), sanitizers.end(), qname) != sanitizers.end();
}

const SinkSpec* TriggerWords::match_sink(const std::string& qname) const {
    const SinkSpec* wildcard = nullptr;
    for (const auto& s : sinks) {
        if (s.name == qname) return &s;  // exact beats wildcard
        if (s.name.size() > 2 && s.name[0] == '*' && s.name[1] == '.') {
            std::string_view suffix(s.name.c_str() + 1);  // ".m"
            if (qname.size() > suffix.size() &&
                qname.compare(qname.size() - suffix.size(), suffix.size(), suffix) == 0)
                wildcard = &s;
        }
    }
    return wildcard;
}

bool TriggerWords::is_http_source(const std::string& qname) {
    return qname.rfind("luci.http.", 0) == 0;
}

TriggerWords TriggerWords::defaults() {
    TriggerWords tw;
    tw.sources = {
        "luci.http.formvalue",
        "luci.http.formvaluetable",
        "luci.http.getcookie",
        "luci.http.content",
        "os.getenv",
    };
    tw.sinks = {
        {"os.execute", {1}, VulnType::CI},
        {"io.popen", {1}, VulnType::CI},
        {"luci.sys.call", {1}, VulnType::CI},
        {"luci.sys.exec", {1}, VulnType::CI},
        {"luci.util.exec", {1}, VulnType::CI},
        {"luci.util.execi", {1}, VulnType::CI},
        {"loadstring", {1}, VulnType::RCE},
        {"load", {1}, VulnType::RCE},
        {"dofile", {1}, VulnType::RCE},
        {"loadfile", {1}, VulnType::RCE},
        {"os.remove", {1}, VulnType::PAT},
        {"os.rename", {1, 2}, VulnType::PAT},
        {"io.open", {1}, VulnType::PAT},
        {"io.lines", {1}, VulnType::PAT},
        {"nixio.fs.unlink", {1}, VulnType::PAT},
        {"*.execute", {1}, VulnType::SQLI},
        {"*.query", {1}, VulnType::SQLI},
        {"*.rawquery", {1}, VulnType::SQLI},
    };
    tw.sanitizers = {
        "luci.util.shellquote",
        "luci.util.shellsqescape",
    };
    return tw;
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

}  // namespace

TriggerWords TriggerWords::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad(path, "cannot open trigger-words file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        bad(path, e.what());
    }
    if (!doc.is_object()) bad(path, "top level must be an object");

    TriggerWords tw = defaults();
    auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
        if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
    };

    if (doc.contains("sources")) {
        if (!doc["sources"].is_array()) bad(path, "\"sources\" must be an array");
        for (const auto& s : doc["sources"]) {
            if (!s.is_string()) bad(path, "source entries must be strings");
            add_unique(tw.sources, s.get<std::string>());
        }
    }
    if (doc.contains("sanitizers")) {
        if (!doc["sanitizers"].is_array()) bad(path, "\"sanitizers\" must be an array");
        for (const auto& s : doc["sanitizers"]) {
            if (!s.is_string()) bad(path, "sanitizer entries must be strings");
            add_unique(tw.sanitizers, s.get<std::string>());
        }
    }
    if (doc.contains("sinks")) {
        if (!doc["sinks"].is_array()) bad(path, "\"sinks\" must be an array");
        for (const auto& s : doc["sinks"]) {
            if (!s.is_object() || !s.contains("name") || !s.contains("type"))
                bad(path, "sink entries need {name, args, type}");
            SinkSpec spec;
            spec.name = s["name"].get<std::string>();
            auto t = vuln_type_from(s["type"].get<std::string>());
            if (!t) bad(path, "unknown vulnerability type for sink '" + spec.name + "'");
            spec.type = *t;
            if (s.contains("args")) {
                for (const auto& a : s["args"]) spec.args.push_back(a.get<int>());
            } else {
                spec.args = {1};
            }
            if (spec.args.empty())
                bad(path, "sink '" + spec.name + "' declares no tainted argument position");
            for (int a : spec.args)
                if (a < 1) bad(path, "sink '" + spec.name + "' has a non-positive position");
            auto it = std::find_if(tw.sinks.begin(), tw.sinks.end(),
                                   [&](const SinkSpec& x) { return x.name == spec.name; });
            if (it != tw.sinks.end())
                *it = spec;  // user entry overrides the default of the same name
            else
                tw.sinks.push_back(spec);
        }
    }
    try {
        tw.validate();
    } catch (const ConfigError& e) {
        bad(path, e.what());
    }
    return tw;
}

void TriggerWords::validate() const {
    std::set<std::string> sink_names;
    for (const auto& s : sinks) {
        if (s.args.empty())
            throw ConfigError("sink '" + s.name + "' declares no tainted argument position");
        sink_names.insert(s.name);
    }
    for (const auto& s : sources) {
        if (sink_names.count(s))
            throw ConfigError("'" + s + "' is listed as both source and sink");
        if (std::find(sanitizers.begin(), sanitizers.end(), s) != sanitizers.end())
            throw ConfigError("'" + s + "' is listed as both source and sanitizer");
    }
    for (const auto& s : sanitizers)
        if (sink_names.count(s))
            throw ConfigError("'" + s + "' is listed as both sink and sanitizer");
}

}  // namespace luciscan::taint
