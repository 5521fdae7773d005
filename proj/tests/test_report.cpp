// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "luciscan/report.hpp"

using namespace luciscan::report;

namespace {

Finding make_finding(const std::string& file, int line, const std::string& sink,
                     const std::string& source, int arg = 1) {
    Finding f;
    f.type = luciscan::taint::VulnType::CI;
    f.file = file;
    f.sink_name = sink;
    f.sink_line = line;
    f.sink_col = 3;
    f.arg = arg;
    f.source_name = source;
    f.source_line = 1;
    f.source_col = 1;
    f.chain.push_back({"<chunk>", 1, "local x = " + source + "()"});
    f.web_reachable = true;
    f.id = finding_id(file, sink, arg, source);
    return f;
}

ScanReport make_report() {
    ScanReport r;
    r.tool_version = "0.1.0";
    r.scan_root = "fw";
    r.file_count = 2;
    r.findings.push_back(make_finding("a/bridge.lua", 7, "io.popen", "luci.http.formvalue"));
    r.findings.push_back(make_finding("b/cmd.lua", 3, "os.execute", "os.getenv"));
    return r;
}

}  // namespace

TEST_CASE("duplicate flaw across two file copies collapses to one finding") {
    std::vector<Finding> fs;
    fs.push_back(make_finding("b/bridge.lua", 7, "io.popen", "http_form"));
    fs.push_back(make_finding("a/bridge.lua", 7, "io.popen", "http_form"));
    auto out = dedup(std::move(fs));
    REQUIRE(out.size() == 1);
    CHECK(out[0].file == "a/bridge.lua");  // lexicographically smallest representative
    CHECK(out[0].duplicates == 2);
}

TEST_CASE("distinct sinks in one file stay distinct") {
    std::vector<Finding> fs;
    fs.push_back(make_finding("a.lua", 3, "os.execute", "os.getenv"));
    fs.push_back(make_finding("a.lua", 9, "io.popen", "os.getenv"));
    auto out = dedup(std::move(fs));
    CHECK(out.size() == 2);
    CHECK(dedup({}).empty());
}

TEST_CASE("finding ids are deterministic and input-sensitive") {
    CHECK(finding_id("a.lua", "os.execute", 1, "os.getenv") ==
          finding_id("a.lua", "os.execute", 1, "os.getenv"));
    CHECK(finding_id("a.lua", "os.execute", 1, "os.getenv") !=
          finding_id("a.lua", "os.execute", 2, "os.getenv"));
    CHECK(finding_id("a.lua", "os.execute", 1, "os.getenv") !=
          finding_id("b.lua", "os.execute", 1, "os.getenv"));
}

TEST_CASE("JSON round-trip reconstructs the report exactly") {
    ScanReport r = make_report();
    r.parse_failures.push_back({"junk.lua", 4, 2, "unexpected symbol"});
    r.findings[0].llm_label = LlmLabel::TrueAlarm;
    r.findings[0].llm_votes = VoteCounts{4, 1, 0};
    r.pruned.push_back(make_finding("c.lua", 2, "os.execute", "os.getenv"));
    r.pruned[0].llm_label = LlmLabel::FalseAlarm;
    r.suppressed_sanitized = 3;
    r.dropped_framework = 5;
    r.llm = LlmStats{10, 12345, 678};

    std::string bytes = emit_json(r);
    ScanReport back = parse_json(bytes);
    CHECK(back == r);
    CHECK(emit_json(back) == bytes);
}

TEST_CASE("serialization is byte-stable and timestamp-free") {
    ScanReport r = make_report();
    std::string a = emit_json(r);
    std::string b = emit_json(r);
    CHECK(a == b);
    CHECK(a.find("time") == std::string::npos);

    ScanReport empty;
    empty.tool_version = "0.1.0";
    std::string e = emit_json(empty);
    CHECK(e.find("\"findings\": []") != std::string::npos);
    CHECK(e.find("\"CI\": 0") != std::string::npos);
}

TEST_CASE("text rendering shows the chain as an arrow sequence") {
    ScanReport r;
    r.tool_version = "0.1.0";
    r.scan_root = "fw";
    r.file_count = 1;
    Finding f = make_finding("bridge.lua", 5, "io.popen", "http_form");
    f.chain.clear();
    f.chain.push_back({"add_br", 21, "function add_br(http_form)"});
    f.chain.push_back({"add_br", 22, "local data = json.decode(http_form.data)"});
    f.chain.push_back({"check_section_available", 14, "..."});
    f.chain.push_back({"tophy", 7, "..."});
    f.chain.push_back({"get_device_byif", 2, "..."});
    r.findings.push_back(f);
    std::string text = emit_text(r);
    CHECK(text.find("add_br → check_section_available → tophy → "
                    "get_device_byif") != std::string::npos);
    CHECK(text.find("io.popen") != std::string::npos);
}
