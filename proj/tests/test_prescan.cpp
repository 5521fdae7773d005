// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "luciscan/diag.hpp"
#include "luciscan/prescan.hpp"
#include "testutil.hpp"

using namespace luciscan::frontend;

TEST_CASE("star escape inside a match pattern is rewritten") {
    std::string src = R"(val:match("\^[0-9\*#!\%.]+\$"))";
    auto res = prescan_source(src);
    CHECK(res.sanitized_text == R"(val:match("\^[0-9%*#!\%.]+\$"))");
    REQUIRE(res.fixups.size() == 1);
    CHECK(res.fixups[0].original == "\\*");
    CHECK(res.fixups[0].replacement == "%*");
    CHECK(res.fixups[0].line == 1);
}

TEST_CASE("single-backslash dash rewritten, escaped backslash untouched") {
    std::string src = R"(string.gsub(value, "^\-", "\\-"))";
    auto res = prescan_source(src);
    CHECK(res.sanitized_text == R"(string.gsub(value, "^%-", "\\-"))");
    REQUIRE(res.fixups.size() == 1);
    CHECK(res.fixups[0].original == "\\-");
}

TEST_CASE("code without string literals passes through untouched") {
    std::string src = "local x = 1";
    auto res = prescan_source(src);
    CHECK(res.sanitized_text == src);
    CHECK(res.fixups.empty());
}

TEST_CASE("escape-looking bytes outside strings are not touched") {
    std::string src = "-- comment with \\* and \\-\nlocal s = [[\\* long strings keep theirs]]";
    auto res = prescan_source(src);
    CHECK(res.sanitized_text == src);
    CHECK(res.fixups.empty());
}

TEST_CASE("unrecognized escapes pass through") {
    std::string src = R"(local p = "\q\z")";
    auto res = prescan_source(src);
    CHECK(res.sanitized_text == src);
    CHECK(res.fixups.empty());
}

TEST_CASE("prescan is idempotent and locality holds on random byte soup") {
    std::mt19937 rng(42);
    const std::string alphabet = "ab\"'\\*-%[]=\n .x0";
    for (int iter = 0; iter < 300; ++iter) {
        std::string src;
        std::uniform_int_distribution<int> len(0, 60);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(alphabet.size()) - 1);
        int n = len(rng);
        for (int i = 0; i < n; ++i) src += alphabet[static_cast<std::size_t>(pick(rng))];

        auto once = prescan_source(src);
        auto twice = prescan_source(once.sanitized_text);
        CHECK(twice.sanitized_text == once.sanitized_text);
        CHECK(undo_fixups(once.sanitized_text, once.fixups) == src);
    }
}

TEST_CASE("fixup table file: load, comments, custom rules") {
    auto dir = testutil::fresh_dir("fixups");
    testutil::write_file(dir / "rules.txt", "# custom\n\\+\t%+\n");
    auto table = FixupTable::load((dir / "rules.txt").string());
    REQUIRE(table.rules.size() == 3);
    auto res = prescan_source(R"(m("\+"))", table);
    CHECK(res.sanitized_text == R"(m("%+"))");
}

TEST_CASE("fixup table whose replacement reintroduces a pattern is rejected") {
    FixupTable t;
    t.rules = {{"\\a", "\\b"}, {"\\b", "\\c"}};
    CHECK_THROWS_AS(t.validate(), luciscan::ConfigError);
}

TEST_CASE("malformed fixup lines are reported with the line number") {
    auto dir = testutil::fresh_dir("fixups_bad");
    testutil::write_file(dir / "rules.txt", "no-tab-here\n");
    CHECK_THROWS_AS(FixupTable::load((dir / "rules.txt").string()), luciscan::ConfigError);
}
