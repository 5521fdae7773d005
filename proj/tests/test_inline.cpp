// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <set>

#include "luciscan/cfg_build.hpp"
#include "luciscan/inline.hpp"
#include "testutil.hpp"

using namespace luciscan::cfg;

namespace {

struct Built {
    luciscan::cfg::BuildResult r;
    std::vector<Cfg*> pool;
    FunctionDict dict{true};

    explicit Built(const std::string& src, const std::string& file = "t.lua")
        : r(testutil::build(src, file)) {
        for (auto& c : r.cfgs) pool.push_back(c.get());
        dict = build_function_dictionary(pool);
    }
};

int count_label(const Cfg& g, const std::string& needle) {
    int n = 0;
    for (const auto& node : g.nodes)
        if (node.label.find(needle) != std::string::npos) ++n;
    return n;
}

}  // namespace

TEST_CASE("parameter binding: shadow assignment precedes the copied body") {
    Built b("local function f(x) g(x) end\nf(a)");
    const Cfg& chunk = *b.pool[0];
    InlineExpansion ex = expand(chunk, b.dict);
    CHECK(ex.splice_count == 1);
    CHECK(validate(ex.cfg).empty());

    // find the shadow binding x#1 := a
    const CfgNode* shadow = nullptr;
    for (const auto& n : ex.cfg.nodes)
        if (!n.lh.empty() && n.lh[0].path == "x#1") shadow = &n;
    REQUIRE(shadow != nullptr);
    REQUIRE(shadow->bindings.size() == 1);
    REQUIRE(shadow->bindings[0].reads.size() == 1);
    CHECK(shadow->bindings[0].reads[0].ident == "a");

    // the copied body's call still reads the renamed parameter
    bool copied_call = false;
    for (const auto& n : ex.cfg.nodes)
        for (const auto& c : n.calls)
            if (c.qname == "g" && !c.args.empty() && !c.args[0].reads.empty() &&
                c.args[0].reads[0].ident == "x#1")
                copied_call = true;
    CHECK(copied_call);
}

TEST_CASE("two call sites get disjoint instances and shadow names") {
    Built b("local function f(x) y = x end\nf(a)\nf(b)");
    InlineExpansion ex = expand(*b.pool[0], b.dict);
    CHECK(ex.splice_count == 2);
    CHECK(validate(ex.cfg).empty());

    std::set<std::string> shadows;
    for (const auto& n : ex.cfg.nodes)
        for (const auto& d : n.lh)
            if (d.path.rfind("x#", 0) == 0) shadows.insert(d.path);
    CHECK(shadows == std::set<std::string>{"x#1", "x#2"});

    std::set<int> ids;
    for (const auto& n : ex.cfg.nodes) {
        CHECK(!ids.count(n.id));
        ids.insert(n.id);
    }
}

TEST_CASE("return values land in a result shadow used by the caller") {
    Built b("local function f(x) return x end\nlocal out = f(a)\nsink(out)");
    InlineExpansion ex = expand(*b.pool[0], b.dict);
    CHECK(validate(ex.cfg).empty());
    const CfgNode* out_assign = nullptr;
    for (const auto& n : ex.cfg.nodes)
        if (!n.lh.empty() && n.lh[0].path == "out") out_assign = &n;
    REQUIRE(out_assign != nullptr);
    REQUIRE(out_assign->bindings.size() == 1);
    REQUIRE(out_assign->bindings[0].reads.size() == 1);
    CHECK(out_assign->bindings[0].reads[0].ident == "f$ret#1");

    // the copied return defines that shadow
    bool ret_def = false;
    for (const auto& n : ex.cfg.nodes)
        for (const auto& d : n.lh)
            if (d.path == "f$ret#1") ret_def = true;
    CHECK(ret_def);
}

TEST_CASE("recursion stops at max depth; node count matches a closed-form expander") {
    // function f(x) f(x) end; calling chunk: f(a)
    Built b("local function f(x) f(x) end\nf(a)");
    const Cfg* f = testutil::find_cfg(b.r, "f");
    const Cfg* chunk = b.pool[0];

    for (int max_depth : {0, 1, 2, 3, 5}) {
        InlineOptions opts;
        opts.max_depth = max_depth;
        InlineExpansion ex = expand(*chunk, b.dict, opts);

        // brute-force model: each splice adds the callee's nodes minus
        // entry and exit; expansion recurses until the depth budget is gone
        std::size_t callee_body = f->nodes.size() - 2;
        std::size_t expected = chunk->nodes.size();
        for (int d = 0; d < max_depth; ++d) expected += callee_body;
        CHECK(ex.cfg.nodes.size() == expected);
        CHECK(ex.splice_count == max_depth);
        CHECK(validate(ex.cfg).empty());

        // the innermost call is left opaque
        bool has_call = false;
        for (const auto& n : ex.cfg.nodes)
            for (const auto& c : n.calls)
                if (c.qname == "f") has_call = true;
        CHECK(has_call);
        if (max_depth > 0) {
            bool flagged = false;
            for (const auto& d : ex.diags)
                if (d.kind == luciscan::DiagKind::DepthExceeded) flagged = true;
            CHECK(flagged);
        }
    }
}

TEST_CASE("unresolved callees are left opaque") {
    Built b("local function f(x) y = x end\nos.execute(cmd)\nf(a)");
    InlineExpansion ex = expand(*b.pool[0], b.dict);
    CHECK(ex.splice_count == 1);  // only f
    CHECK(count_label(ex.cfg, "os.execute") == 1);
}

TEST_CASE("trigger words are never inlined even when a definition exists") {
    Built b("function exec(c) end\nexec(x)");
    InlineOptions opts;
    opts.never_inline.insert("exec");
    InlineExpansion ex = expand(*b.pool[0], b.dict, opts);
    CHECK(ex.splice_count == 0);
}

TEST_CASE("single-call op splices exactly one site") {
    Built b("local function f(x) y = x end\nf(a)\nf(b)");
    Cfg work = *b.pool[0];
    int call_node = -1;
    for (const auto& n : work.nodes)
        if (n.kind == CfgNodeKind::CallSite && !n.calls.empty() && n.calls[0].qname == "f") {
            call_node = n.id;
            break;
        }
    REQUIRE(call_node >= 0);
    luciscan::DiagnosticList diags;
    InlineOptions opts;
    CHECK(inline_call(work, call_node, -1, b.dict, 0, opts, diags) == InlineStatus::Ok);
    CHECK(validate(work).empty());
    CHECK(count_label(work, "param x") == 1);  // one splice only

    Cfg work2 = *b.pool[0];
    CHECK(inline_call(work2, call_node, -1, b.dict, opts.max_depth, opts, diags) ==
          InlineStatus::DepthExceeded);
    luciscan::DiagnosticList diags2;
    Cfg work3 = *b.pool[0];
    FunctionDict empty_dict(true);
    CHECK(inline_call(work3, call_node, -1, empty_dict, 0, opts, diags2) ==
          InlineStatus::UnresolvedCallee);
}

TEST_CASE("method calls bind the receiver to self") {
    Built b(
        "local Bean = {}\n"
        "function Bean:new(name) local self = setmetatable({}, Bean) self.name = name "
        "return self end\n"
        "local bean = Bean:new(v)\n");
    InlineExpansion ex = expand(*b.pool[0], b.dict);
    CHECK(ex.splice_count == 1);
    const CfgNode* self_bind = nullptr;
    for (const auto& n : ex.cfg.nodes)
        if (!n.lh.empty() && n.lh[0].path == "self#1" && n.label.rfind("param", 0) == 0)
            self_bind = &n;
    REQUIRE(self_bind != nullptr);
    REQUIRE(!self_bind->bindings[0].reads.empty());
    CHECK(self_bind->bindings[0].reads[0].ident == "Bean");
}

TEST_CASE("globals keep their names inside inlined bodies") {
    Built b("local function f() counter = counter + 1 end\nf()");
    InlineExpansion ex = expand(*b.pool[0], b.dict);
    bool global_def = false;
    for (const auto& n : ex.cfg.nodes)
        for (const auto& d : n.lh)
            if (d.path == "counter") global_def = true;
    CHECK(global_def);
}

TEST_CASE("edge symmetry and single entry/exit survive every expansion") {
    const char* srcs[] = {
        "local function f(x) if x then return x end return 0 end\nlocal r = f(a)",
        "local function g(n) for i = 1, n do h(i) end end\nlocal function h(i) y = i "
        "end\ng(3)",
        "local function f() while c do p = q end end\nf()\nf()",
        "local function f() end\nf()",  // empty body
    };
    for (const char* src : srcs) {
        Built b(src);
        for (Cfg* root : b.pool) {
            InlineExpansion ex = expand(*root, b.dict);
            auto issues = validate(ex.cfg);
            CHECK_MESSAGE(issues.empty(), src, ": ", issues.empty() ? "" : issues[0]);
        }
    }
}
