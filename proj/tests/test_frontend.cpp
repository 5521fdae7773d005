// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <functional>
#include "luciscan/ast.hpp"
#include "luciscan/diag.hpp"
#include "luciscan/lexer.hpp"
#include "luciscan/parser.hpp"
#include "testutil.hpp"

using namespace luciscan::frontend;

namespace {

int count_kind(const AstNode& n, NodeKind k) {
    int c = n.kind == k ? 1 : 0;
    for (const auto& ch : n.children) c += count_kind(*ch, k);
    return c;
}

void collect_calls(const AstNode& n, std::vector<const AstNode*>& out) {
    if (n.kind == NodeKind::Call || n.kind == NodeKind::MethodCall) out.push_back(&n);
    for (const auto& ch : n.children) collect_calls(*ch, out);
}

const char* kFieldSensitiveExample = R"(local Bean = {}
Bean.__index = Bean
function Bean:new(name, gender)
    local self = setmetatable({}, Bean)
    self.name = name
    self.gender = gender
    return self
end
local name = os.getenv("name")
local bean = Bean:new(name, "male")
local command1 = "echo " .. bean.name
local command2 = "echo " .. bean.gender
os.execute(command1)
os.execute(command2)
)";

}  // namespace

TEST_CASE("empty chunk parses to zero children") {
    auto chunk = parse_chunk("", "t.lua");
    CHECK(chunk->kind == NodeKind::Chunk);
    CHECK(chunk->children.empty());
}

TEST_CASE("empty-body while parses") {
    auto chunk = parse_chunk("while x do end", "t.lua");
    REQUIRE(chunk->children.size() == 1);
    const AstNode& w = *chunk->child(0);
    CHECK(w.kind == NodeKind::While);
    CHECK(w.child(0)->kind == NodeKind::Name);
    CHECK(w.child(0)->text == "x");
    CHECK(w.child(1)->children.empty());
}

TEST_CASE("field-sensitive example has the documented shape") {
    auto chunk = parse_chunk(kFieldSensitiveExample, "bean.lua");
    CHECK(count_kind(*chunk, NodeKind::TableConstructor) == 2);  // {} and setmetatable({},..)
    CHECK(count_kind(*chunk, NodeKind::FunctionDef) == 1);
    // local Bean, self, name, bean, command1, command2
    CHECK(count_kind(*chunk, NodeKind::LocalAssign) == 6);
    std::vector<const AstNode*> calls;
    collect_calls(*chunk, calls);
    int os_execute = 0;
    for (const auto* c : calls)
        if (c->callee_qname == "os.execute") ++os_execute;
    CHECK(os_execute == 2);
    // method definition registers under the dotted name
    bool has_bean_new = false;
    for (const auto& ch : chunk->children)
        if (ch->kind == NodeKind::FunctionDef && ch->text == "Bean.new" && ch->is_method)
            has_bean_new = true;
    CHECK(has_bean_new);
}

TEST_CASE("every Lua 5.1 construct the scanner needs") {
    const char* src = R"(
local a, b = f()
for i = 1, 10, 2 do a = a + i end
for k, v in pairs(t), nil do print(k) end
repeat a = a - 1 until a < 0
if a then g() elseif b then h() else i() end
local function varargs(...) return select("#", ...) end
local s = ("fmt %s"):format(a)
local m = obj:method(1, "x")
local req = require "mod.sub".init()
local t2 = { name = "n", [key] = 1, 2, 3; x = y }
while true do break end
do return end
)";
    auto chunk = parse_chunk(src, "t.lua");
    CHECK(count_kind(*chunk, NodeKind::NumericFor) == 1);
    CHECK(count_kind(*chunk, NodeKind::GenericFor) == 1);
    CHECK(count_kind(*chunk, NodeKind::Repeat) == 1);
    CHECK(count_kind(*chunk, NodeKind::If) == 1);
    CHECK(count_kind(*chunk, NodeKind::Varargs) >= 2);
    CHECK(count_kind(*chunk, NodeKind::Break) == 1);
}

TEST_CASE("string-sugar and table-sugar calls parse") {
    auto chunk = parse_chunk("f 'x'\ng {a = 1}\nrequire 'luci.sys'", "t.lua");
    CHECK(count_kind(*chunk, NodeKind::CallStat) == 3);
}

TEST_CASE("call qualified names resolve for static chains only") {
    auto chunk = parse_chunk(
        "os.execute(c)\nluci.http.formvalue('a')\nhandlers[i](x)\nobj:m(1)\nluci['http'].x(1)",
        "t.lua");
    std::vector<const AstNode*> calls;
    collect_calls(*chunk, calls);
    REQUIRE(calls.size() == 5);
    CHECK(calls[0]->callee_qname == "os.execute");
    CHECK(calls[1]->callee_qname == "luci.http.formvalue");
    CHECK(calls[2]->dynamic_callee);
    CHECK(calls[3]->callee_qname == "obj.m");
    CHECK(calls[4]->callee_qname == "luci.http.x");  // constant string subscripts count
}

TEST_CASE("goto is not Lua 5.1") {
    CHECK_THROWS_AS(parse_chunk("::top:: goto top", "t.lua"), luciscan::SyntaxError);
}

TEST_CASE("syntax errors carry file/line/col") {
    try {
        parse_chunk("local = 3", "bad.lua");
        FAIL("expected SyntaxError");
    } catch (const luciscan::SyntaxError& e) {
        CHECK(e.file() == "bad.lua");
        CHECK(e.line() == 1);
        CHECK(e.col() > 1);
    }
}

TEST_CASE("parse determinism: identical bytes, structurally identical trees") {
    auto a = parse_chunk(kFieldSensitiveExample, "t.lua");
    auto b = parse_chunk(kFieldSensitiveExample, "t.lua");
    CHECK(ast_equal(*a, *b));
    CHECK(ast_dump(*a) == ast_dump(*b));
}

TEST_CASE("child spans nest within parent spans") {
    auto chunk = parse_chunk(kFieldSensitiveExample, "t.lua");
    std::function<void(const AstNode&)> walk = [&](const AstNode& n) {
        for (const auto& ch : n.children) {
            if (ch->span.valid() && n.span.valid()) {
                CHECK(n.span.offset_begin <= ch->span.offset_begin);
                CHECK(ch->span.offset_end <= n.span.offset_end);
            }
            walk(*ch);
        }
    };
    walk(*chunk);
}

TEST_CASE("round-trip span soundness: source slice re-lexes to the node's tokens") {
    std::string src = kFieldSensitiveExample;
    auto toks = lex(src, "t.lua");
    auto chunk = parse_chunk(src, "t.lua");

    std::function<void(const AstNode&)> walk = [&](const AstNode& n) {
        if (n.span.valid() && n.last_token >= n.first_token &&
            n.last_token < toks.size() - 1) {
            std::string slice =
                src.substr(n.span.offset_begin, n.span.offset_end - n.span.offset_begin);
            auto again = lex(slice, "slice.lua");
            REQUIRE(again.size() >= 1);
            std::size_t expect = n.last_token - n.first_token + 1;
            REQUIRE(again.size() - 1 == expect);  // drop <eof>
            for (std::size_t i = 0; i < expect; ++i) {
                CHECK(again[i].kind == toks[n.first_token + i].kind);
                CHECK(again[i].text == toks[n.first_token + i].text);
            }
        }
        for (const auto& ch : n.children) walk(*ch);
    };
    walk(*chunk);
}

TEST_CASE("lexer handles long strings, comments, numbers") {
    auto toks = lex("0x1F 3.14 1e-3 [[long\nstring]] --[==[ block\ncomment ]==] 'q'", "t.lua");
    REQUIRE(toks.size() == 6);  // 3 numbers, 2 strings, eof
    CHECK(toks[0].text == "0x1F");
    CHECK(toks[3].text == "long\nstring");
    CHECK(toks[4].text == "q");
}
