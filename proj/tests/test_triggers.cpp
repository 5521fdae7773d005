// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "luciscan/diag.hpp"
#include "luciscan/triggers.hpp"
#include "testutil.hpp"

using namespace luciscan::taint;

TEST_CASE("defaults cover the LuCI vocabulary") {
    auto tw = TriggerWords::defaults();
    CHECK(tw.is_source("luci.http.formvalue"));
    CHECK(tw.is_source("os.getenv"));
    CHECK(tw.is_sanitizer("luci.util.shellquote"));

    REQUIRE(tw.match_sink("os.execute") != nullptr);
    CHECK(tw.match_sink("os.execute")->type == VulnType::CI);
    REQUIRE(tw.match_sink("io.popen") != nullptr);
    CHECK(tw.match_sink("io.popen")->type == VulnType::CI);
    REQUIRE(tw.match_sink("luci.sys.call") != nullptr);
    CHECK(tw.match_sink("luci.sys.call")->type == VulnType::CI);
    REQUIRE(tw.match_sink("os.remove") != nullptr);
    CHECK(tw.match_sink("os.remove")->type == VulnType::PAT);
    CHECK(tw.match_sink("dofile")->type == VulnType::RCE);
    CHECK(tw.match_sink("nothing.deadly") == nullptr);
    tw.validate();
}

TEST_CASE("wildcard sinks match any receiver; exact entries win") {
    auto tw = TriggerWords::defaults();
    const SinkSpec* db = tw.match_sink("db.execute");
    REQUIRE(db != nullptr);
    CHECK(db->type == VulnType::SQLI);
    CHECK(tw.match_sink("conn.pool.query")->type == VulnType::SQLI);
    CHECK(tw.match_sink("execute") == nullptr);  // no receiver, no match
    // exact os.execute stays CI even though *.execute exists
    CHECK(tw.match_sink("os.execute")->type == VulnType::CI);
}

TEST_CASE("http-source family test") {
    CHECK(TriggerWords::is_http_source("luci.http.formvalue"));
    CHECK(!TriggerWords::is_http_source("os.getenv"));
}

TEST_CASE("file merge adds over defaults") {
    auto dir = testutil::fresh_dir("tw");
    testutil::write_file(dir / "tw.json", R"({
        "sources": ["my.http.read"],
        "sinks": [{"name": "luci.util.exec", "args": [1], "type": "CI"},
                  {"name": "fs.writefile", "args": [1], "type": "PAT"}],
        "sanitizers": ["my.clean"]
    })");
    auto tw = TriggerWords::load((dir / "tw.json").string());
    CHECK(tw.is_source("my.http.read"));
    CHECK(tw.is_source("luci.http.formvalue"));  // defaults kept
    CHECK(tw.match_sink("fs.writefile")->type == VulnType::PAT);
    CHECK(tw.is_sanitizer("my.clean"));
}

TEST_CASE("a name in two lists is a configuration error") {
    auto dir = testutil::fresh_dir("tw_bad");
    testutil::write_file(dir / "tw.json", R"({
        "sanitizers": ["os.execute"]
    })");
    CHECK_THROWS_AS(TriggerWords::load((dir / "tw.json").string()), luciscan::ConfigError);
}

TEST_CASE("sink without argument positions is rejected") {
    auto dir = testutil::fresh_dir("tw_args");
    testutil::write_file(dir / "tw.json",
                         R"({"sinks": [{"name": "x.y", "args": [], "type": "CI"}]})");
    CHECK_THROWS_AS(TriggerWords::load((dir / "tw.json").string()), luciscan::ConfigError);
}

TEST_CASE("missing or malformed files raise ConfigError with the path") {
    CHECK_THROWS_AS(TriggerWords::load("/nonexistent/tw.json"), luciscan::ConfigError);
    auto dir = testutil::fresh_dir("tw_syntax");
    testutil::write_file(dir / "tw.json", "{not json");
    CHECK_THROWS_AS(TriggerWords::load((dir / "tw.json").string()), luciscan::ConfigError);
}
