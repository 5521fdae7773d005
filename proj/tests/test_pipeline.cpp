// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "luciscan/collect.hpp"
#include "luciscan/pipeline.hpp"
#include "testutil.hpp"

using namespace luciscan;
using namespace luciscan::pipeline;

namespace {

namespace fs = std::filesystem;

const char* kPopenChain = R"(local function get_device_byif(iface)
    local cmd = ". /lib/zone/zone_api.sh; zone_get_device_byif " .. iface
    local ff = io.popen(cmd, "r")
end
local function tophy(ifname)
    local phy = {}
    for k,v in ipairs(ifname) do
        phy[#phy + 1] = get_device_byif(v)
    end
    return phy
end
local function check_section_available(data, op)
    local new = { }
    new.t_name = data.t_name
    new.t_bindif = data.t_bindif
    new.ifname = tophy(new.t_bindif)
end
function add_br(http_form)
    local data = json.decode(http_form.data)
    local jdata = data.params
    local input = jdata.new
    if not input or type(input) ~= "table" then
        return false, err.ERR_COM_TABLE_ITEM_UCI_ADD
    end
    new = check_section_available(input, "add")
end
)";

const char* kIfupCall = R"(function iface_reconnect(iface)
    local netmd = require "luci.model.network".init()
    local net = netmd:get_network(iface)
    if net then
        luci.sys.call("env -i /sbin/ifup %q >/dev/null 2>/dev/null" % iface)
        luci.http.status(200, "Reconnected")
        return
    end
    luci.http.status(404, "No such interface")
end
)";

const char* kDelScript = R"(function action_del_script()
    local name = luci.http.formvalue("set")
    local rv ={}
    os.remove(name)
    rv["name"] = name
    luci.http.prepare_content("application/json")
    luci.http.write_json(rv)
end
)";

fs::path make_fixture_tree() {
    auto dir = testutil::fresh_dir("pipe");
    testutil::write_file(dir / "usr/lib/lua/luci/controller/admin/bridge.lua", kPopenChain);
    testutil::write_file(dir / "usr/lib/lua/luci/controller/admin/network.lua", kIfupCall);
    testutil::write_file(dir / "usr/lib/lua/luci/controller/commands.lua", kDelScript);
    return dir;
}

ScanConfig base_config(const fs::path& root) {
    ScanConfig cfg;
    cfg.root = root.string();
    return cfg;
}

}  // namespace

TEST_CASE("collect_files: sorted, extension-filtered, luci-only") {
    auto dir = testutil::fresh_dir("collect");
    testutil::write_file(dir / "usr/lib/lua/luci/controller/admin/network.lua", "x = 1");
    testutil::write_file(dir / "b.lua", "x = 1");
    testutil::write_file(dir / "a.lua", "x = 1");
    testutil::write_file(dir / "c.lua", "x = 1");
    testutil::write_file(dir / "run.sh", "echo");
    testutil::write_file(dir / "notes.txt", "");

    DiagnosticList diags;
    frontend::CollectOptions opts;
    auto files = frontend::collect_files(dir.string(), opts, diags);
    CHECK(files == std::vector<std::string>{
                       "a.lua", "b.lua", "c.lua",
                       "usr/lib/lua/luci/controller/admin/network.lua"});

    opts.luci_only = true;
    auto luci = frontend::collect_files(dir.string(), opts, diags);
    CHECK(luci == std::vector<std::string>{
                      "usr/lib/lua/luci/controller/admin/network.lua"});

    opts.luci_only = false;
    opts.exclude = {"c.lua"};
    auto excl = frontend::collect_files(dir.string(), opts, diags);
    CHECK(std::find(excl.begin(), excl.end(), "c.lua") == excl.end());

    CHECK_THROWS_AS(frontend::collect_files((dir / "missing").string(), {}, diags),
                    RootNotFound);

    auto empty = testutil::fresh_dir("empty");
    CHECK(frontend::collect_files(empty.string(), {}, diags).empty());
}

TEST_CASE("paper fixture tree yields exactly CI+CI+PAT") {
    auto dir = make_fixture_tree();
    auto outcome = scan(base_config(dir));
    CHECK(outcome.exit_code == 1);
    REQUIRE(outcome.report.findings.size() == 3);

    const auto& fs_ = outcome.report.findings;
    CHECK(fs_[0].file == "usr/lib/lua/luci/controller/admin/bridge.lua");
    CHECK(fs_[0].sink_name == "io.popen");
    CHECK(taint::to_string(fs_[0].type) == std::string("CI"));
    CHECK(fs_[1].sink_name == "luci.sys.call");
    CHECK(taint::to_string(fs_[1].type) == std::string("CI"));
    CHECK(fs_[2].sink_name == "os.remove");
    CHECK(taint::to_string(fs_[2].type) == std::string("PAT"));
}

TEST_CASE("sanitized variants of the fixtures yield nothing") {
    auto dir = testutil::fresh_dir("pipe_clean");
    testutil::write_file(dir / "usr/lib/lua/luci/controller/commands.lua",
                         "function action_del_script()\n"
                         "    local name = luci.util.shellquote(luci.http.formvalue(\"set\"))\n"
                         "    os.remove(name)\n"
                         "end\n");
    testutil::write_file(dir / "usr/lib/lua/luci/controller/admin/network.lua",
                         "function iface_reconnect(iface)\n"
                         "    luci.sys.call(\"env -i /sbin/ifup \" .. "
                         "luci.util.shellquote(iface))\n"
                         "end\n");
    auto outcome = scan(base_config(dir));
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.report.findings.empty());
    CHECK(outcome.report.suppressed_sanitized >= 2);
}

TEST_CASE("scan JSON is byte-identical across runs and worker counts") {
    auto dir = make_fixture_tree();
    ScanConfig one = base_config(dir);
    one.workers = 1;
    ScanConfig many = base_config(dir);
    many.workers = 8;

    std::string a = report::emit_json(scan(one).report);
    std::string b = report::emit_json(scan(one).report);
    std::string c = report::emit_json(scan(many).report);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("parse failures are reported and never abort the scan") {
    auto dir = make_fixture_tree();
    testutil::write_file(dir / "usr/lib/lua/luci/broken.lua", "function ( end");
    auto outcome = scan(base_config(dir));
    REQUIRE(outcome.report.parse_failures.size() == 1);
    CHECK(outcome.report.parse_failures[0].file == "usr/lib/lua/luci/broken.lua");
    CHECK(outcome.report.findings.size() == 3);  // the rest still scanned
}

TEST_CASE("framework rules off is a superset of on") {
    auto dir = make_fixture_tree();
    testutil::write_file(dir / "usr/lib/lua/luci/model/worker.lua",
                         "function apply_env()\n"
                         "    local v = os.getenv(\"PATH\")\n"
                         "    os.execute(\"run \" .. v)\n"
                         "end\n");
    ScanConfig on = base_config(dir);
    ScanConfig off = base_config(dir);
    off.framework_rules = false;

    auto with_rules = scan(on).report;
    auto without_rules = scan(off).report;
    CHECK(without_rules.findings.size() > with_rules.findings.size());
    std::set<std::string> off_ids;
    for (const auto& f : without_rules.findings) off_ids.insert(f.id);
    for (const auto& f : with_rules.findings) CHECK(off_ids.count(f.id));
}

TEST_CASE("no-dict-approx produces the same findings") {
    auto dir = make_fixture_tree();
    ScanConfig approx = base_config(dir);
    ScanConfig exact = base_config(dir);
    exact.dict_approx = false;
    auto a = scan(approx).report;
    auto b = scan(exact).report;
    REQUIRE(a.findings.size() == b.findings.size());
    for (std::size_t i = 0; i < a.findings.size(); ++i)
        CHECK(a.findings[i].id == b.findings[i].id);
}

TEST_CASE("dump flags write DOT and reaching tables") {
    auto dir = make_fixture_tree();
    auto out = testutil::fresh_dir("dumps");
    ScanConfig cfg = base_config(dir);
    cfg.dump_cfg_path = (out / "cfg.dot").string();
    cfg.dump_reaching_path = (out / "reach.txt").string();
    scan(cfg);
    std::string dot = testutil::read_file(out / "cfg.dot");
    CHECK(dot.find("digraph") != std::string::npos);
    std::string reach = testutil::read_file(out / "reach.txt");
    CHECK(reach.find("node 0 -> []") != std::string::npos);
    CHECK(reach.find("add_br") != std::string::npos);
}

TEST_CASE("config validation rejects nonsense before any work") {
    ScanConfig cfg;
    cfg.root = "x";
    cfg.workers = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.workers = 1;
    cfg.inline_depth = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.inline_depth = 3;
    cfg.llm.enabled = true;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);  // endpoint missing
}

TEST_CASE("selftest: green corpus, broken golden, empty corpus") {
    auto corpus = testutil::fresh_dir("selftest");
    // passing fixture
    testutil::write_file(corpus / "good/usr/lib/lua/luci/controller/commands.lua",
                         kDelScript);
    testutil::write_file(corpus / "good/expect.json", R"({"findings": [
        {"type": "PAT", "sink": "os.remove", "source": "luci.http.formvalue"}]})");
    ScanConfig cfg;
    cfg.root = ".";
    auto res = selftest(corpus.string(), cfg);
    CHECK(res.fixtures == 1);
    CHECK(res.failed == 0);
    CHECK(res.summary.find("PAT") != std::string::npos);

    // deliberately broken golden
    testutil::write_file(corpus / "broken/usr/lib/lua/luci/controller/clean.lua",
                         "local x = 1\n");
    testutil::write_file(corpus / "broken/expect.json", R"({"findings": [
        {"type": "CI", "sink": "os.execute"}]})");
    auto res2 = selftest(corpus.string(), cfg);
    CHECK(res2.fixtures == 2);
    CHECK(res2.failed == 1);

    // empty corpus
    auto empty = testutil::fresh_dir("selftest_empty");
    auto res3 = selftest(empty.string(), cfg);
    CHECK(res3.fixtures == 0);
    CHECK(res3.failed == 0);
}
