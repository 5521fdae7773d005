// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "luciscan/cfg_build.hpp"
#include "luciscan/inline.hpp"
#include "luciscan/taint.hpp"
#include "testutil.hpp"

using namespace luciscan::taint;
using namespace luciscan::cfg;

namespace {

struct Scenario {
    luciscan::cfg::BuildResult r;
    std::vector<Cfg*> pool;
    FunctionDict dict{true};
    TriggerWords tw = TriggerWords::defaults();
    InlineOptions iopts;

    explicit Scenario(const std::string& src, const std::string& file = "t.lua")
        : r(testutil::build(src, file)) {
        for (auto& c : r.cfgs) pool.push_back(c.get());
        dict = build_function_dictionary(pool);
        for (const auto& s : tw.sources) iopts.never_inline.insert(s);
        for (const auto& s : tw.sinks) iopts.never_inline.insert(s.name);
        for (const auto& s : tw.sanitizers) iopts.never_inline.insert(s);
    }

    Cfg expanded(const std::string& name = "<chunk>") {
        for (Cfg* c : pool)
            if (c->name == name) return expand(*c, dict, iopts).cfg;
        REQUIRE(false);
        return {};
    }
};

}  // namespace

TEST_CASE("find_sinks matches configured names in reverse order") {
    Scenario s(
        "local ff = io.popen(cmd, \"r\")\n"
        "os.execute(\"ls\")\n"
        "print(\"hi\")\n");
    Cfg g = s.expanded();
    auto sinks = find_sinks(g, s.tw);
    REQUIRE(sinks.size() == 2);
    CHECK(sinks[0].qname == "os.execute");  // reverse node order
    CHECK(sinks[1].qname == "io.popen");
    CHECK(sinks[1].spec->type == VulnType::CI);
}

TEST_CASE("no sensitive calls, no sinks") {
    Scenario s("local x = tostring(1)\nprint(x)");
    Cfg g = s.expanded();
    CHECK(find_sinks(g, s.tw).empty());
}

TEST_CASE("backtracking classifies constants, sources, unknowns") {
    Scenario s(
        "local name = luci.http.formvalue(\"set\")\n"
        "os.remove(name)\n"
        "os.execute(\"echo hi\")\n"
        "io.popen(mystery)\n");
    Cfg g = s.expanded();
    auto ct = luciscan::dataflow::analyze(g);
    auto sinks = find_sinks(g, s.tw);
    REQUIRE(sinks.size() == 3);

    auto arg_of = [&](const SinkSite& site) -> const ArgInfo& {
        const CfgNode& n = g.node(site.node_id);
        for (const auto& c : n.calls)
            if (c.call_id == site.call_id) return c.args[0];
        REQUIRE(false);
        return n.calls[0].args[0];
    };
    for (const auto& site : sinks) {
        auto prov = backtrack_argument(g, ct, site.node_id, arg_of(site), s.tw);
        if (site.qname == "os.remove") {
            CHECK(prov.kind == ProvenanceKind::SourceTainted);
            REQUIRE(prov.sources.size() == 1);
            CHECK(prov.sources[0].name == "luci.http.formvalue");
        } else if (site.qname == "os.execute") {
            CHECK(prov.kind == ProvenanceKind::Constant);
        } else {
            CHECK(prov.kind == ProvenanceKind::Unknown);
        }
    }
}

TEST_CASE("concatenation with a parameter taints the sink argument") {
    Scenario s(
        "function handler(iface)\n"
        "  local cmd = \"prefix \" .. iface\n"
        "  io.popen(cmd)\n"
        "end\n",
        "controller/x.lua");
    Cfg g = s.expanded("handler");
    auto ct = luciscan::dataflow::analyze(g);
    auto sinks = find_sinks(g, s.tw);
    REQUIRE(sinks.size() == 1);
    const CfgNode& n = g.node(sinks[0].node_id);
    auto prov = backtrack_argument(g, ct, sinks[0].node_id, n.calls[0].args[0], s.tw);
    CHECK(prov.kind == ProvenanceKind::SourceTainted);
    REQUIRE(prov.sources.size() == 1);
    CHECK(prov.sources[0].is_param);
    CHECK(prov.sources[0].name == "iface");
}

TEST_CASE("three-hop rename chain matches the def-use closure oracle") {
    Scenario s(
        "local src = os.getenv(\"x\")\n"
        "local a = src\n"
        "local b = a\n"
        "local c = b\n"
        "os.execute(c)\n");
    Cfg g = s.expanded();
    Reachability reach(g);
    auto assigns = g.assignment_ids();

    int src = -1;
    for (const auto& n : g.nodes)
        if (n.label.find("os.getenv") != std::string::npos) src = n.id;
    REQUIRE(src >= 0);

    auto p = propagate_taint(g, reach, src, assigns, s.tw);

    // oracle: transitive closure over def-use pairs
    std::set<int> closure{src};
    bool grew = true;
    while (grew) {
        grew = false;
        for (int id : assigns) {
            if (closure.count(id)) continue;
            const CfgNode& n = g.node(id);
            for (int d : closure) {
                for (const auto& b : n.bindings)
                    for (const auto& rd : b.reads)
                        if (g.node(d).defines(rd.ident) && reach.in(d, id)) {
                            closure.insert(id);
                            grew = true;
                        }
            }
        }
    }
    std::set<int> chain_set(p.chain.begin(), p.chain.end());
    CHECK(chain_set == closure);
    REQUIRE(p.chain.size() == 4);  // src, a, b, c in program order
    CHECK(p.chain[0] == src);
    CHECK(p.tainted.count("src"));
    CHECK(p.tainted.count("a"));
    CHECK(p.tainted.count("b"));
    CHECK(p.tainted.count("c"));
}

TEST_CASE("source with no dependents keeps a singleton chain") {
    Scenario s("local a = os.getenv(\"x\")\nlocal z = 1\n");
    Cfg g = s.expanded();
    Reachability reach(g);
    int src = -1;
    for (const auto& n : g.nodes)
        if (n.label.find("os.getenv") != std::string::npos) src = n.id;
    auto p = propagate_taint(g, reach, src, g.assignment_ids(), s.tw);
    CHECK(p.chain == std::vector<int>{src});
}

TEST_CASE("field sensitivity: only the tainted attribute propagates") {
    Scenario s(
        "local Bean = {}\n"
        "Bean.__index = Bean\n"
        "function Bean:new(name, gender)\n"
        "    local self = setmetatable({}, Bean)\n"
        "    self.name = name\n"
        "    self.gender = gender\n"
        "    return self\n"
        "end\n"
        "local name = os.getenv(\"name\")\n"
        "local bean = Bean:new(name, \"male\")\n"
        "local command1 = \"echo \" .. bean.name\n"
        "local command2 = \"echo \" .. bean.gender\n"
        "os.execute(command1)\n"
        "os.execute(command2)\n",
        "controller/bean.lua");
    auto flows = analyze_root(s.expanded(), s.tw);
    REQUIRE(flows.size() == 1);
    CHECK(flows[0].sink.qname == "os.execute");
    CHECK(flows[0].source.name == "os.getenv");
    // the flagged sink is the command1 one (earlier line)
    CHECK(flows[0].sink.span.line_begin == 13);
    CHECK(flows[0].tainted_attrs.count("bean.name"));
    CHECK(!flows[0].tainted_attrs.count("bean.gender"));
}

TEST_CASE("sanitizer on the tainted identity suppresses; unrelated one does not") {
    Scenario tainted(
        "local t = luci.http.formvalue(\"a\")\n"
        "local st = luci.util.shellquote(t)\n"
        "os.execute(\"echo \" .. st)\n");
    auto flows = analyze_root(tainted.expanded(), tainted.tw);
    REQUIRE(flows.size() == 1);
    CHECK(flows[0].sanitized);

    Scenario unrelated(
        "local t = luci.http.formvalue(\"a\")\n"
        "local u = luci.util.shellquote(w)\n"
        "os.execute(\"echo \" .. t)\n");
    auto flows2 = analyze_root(unrelated.expanded(), unrelated.tw);
    REQUIRE(flows2.size() == 1);
    CHECK(!flows2[0].sanitized);

    // chain without any calls stays unsanitized
    Scenario plain(
        "local t = luci.http.formvalue(\"a\")\n"
        "local u = t\n"
        "os.execute(u)\n");
    auto flows3 = analyze_root(plain.expanded(), plain.tw);
    REQUIRE(flows3.size() == 1);
    CHECK(!flows3[0].sanitized);

    // sanitizer wrapped directly around the sink argument
    Scenario at_sink(
        "local t = luci.http.formvalue(\"a\")\n"
        "os.execute(luci.util.shellquote(t))\n");
    auto flows4 = analyze_root(at_sink.expanded(), at_sink.tw);
    REQUIRE(flows4.size() == 1);
    CHECK(flows4[0].sanitized);
}

TEST_CASE("framework rules: http sources kept anywhere, getenv needs a controller") {
    auto run = [](const std::string& file) {
        Scenario s(
            "function apply()\n"
            "  local v = os.getenv(\"PATH\")\n"
            "  os.execute(v)\n"
            "end\n",
            file);
        Cfg g = s.expanded("apply");
        auto flows = analyze_root(g, s.tw);
        REQUIRE(flows.size() == 1);
        return apply_framework_rules(flows[0], g, s.tw);
    };
    CHECK(run("usr/lib/lua/luci/controller/admin/x.lua").keep);
    auto dropped = run("usr/lib/lua/luci/model/helper.lua");
    CHECK(!dropped.keep);
    CHECK(dropped.reason == "not-web-reachable");
}

TEST_CASE("framework rules: dispatched parameters kept, private ones dropped") {
    Scenario s(
        "local function helper(x)\n"
        "  os.execute(x)\n"
        "end\n"
        "function action_go(seg)\n"
        "  os.execute(seg)\n"
        "end\n",
        "usr/lib/lua/luci/model/m.lua");
    Cfg helper = s.expanded("helper");
    auto hflows = analyze_root(helper, s.tw);
    REQUIRE(hflows.size() == 1);
    CHECK(!apply_framework_rules(hflows[0], helper, s.tw).keep);

    Cfg action = s.expanded("action_go");
    action.web_reachable = true;  // as attach_dispatched would mark it
    auto aflows = analyze_root(action, s.tw);
    REQUIRE(aflows.size() == 1);
    CHECK(apply_framework_rules(aflows[0], action, s.tw).keep);
}

TEST_CASE("classify returns the configured type") {
    Scenario s("io.popen(x)\nos.remove(y)\n");
    Cfg g = s.expanded();
    auto sinks = find_sinks(g, s.tw);
    REQUIRE(sinks.size() == 2);
    for (const auto& site : sinks) {
        if (site.qname == "io.popen") CHECK(classify(site) == VulnType::CI);
        if (site.qname == "os.remove") CHECK(classify(site) == VulnType::PAT);
    }
}

TEST_CASE("one finding per sink/arg/source; multiple paths collapse to shortest") {
    Scenario s(
        "local t = luci.http.formvalue(\"a\")\n"
        "local u\n"
        "if c then u = t else u = t end\n"
        "os.execute(u)\n");
    auto flows = analyze_root(s.expanded(), s.tw);
    REQUIRE(flows.size() == 1);
    CHECK(flows[0].chain.size() == 2);  // source + one branch assignment
}

TEST_CASE("direct source call as sink argument") {
    Scenario s("os.remove(luci.http.formvalue(\"set\"))\n");
    auto flows = analyze_root(s.expanded(), s.tw);
    REQUIRE(flows.size() == 1);
    CHECK(flows[0].source.name == "luci.http.formvalue");
    CHECK(flows[0].chain.size() == 1);
    CHECK(!flows[0].sanitized);
}
