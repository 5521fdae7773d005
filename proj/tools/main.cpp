// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <thread>
#include <iostream>

#include <CLI11.hpp>

#include "luciscan/cfg_build.hpp"
#include "luciscan/parser.hpp"
#include "luciscan/pipeline.hpp"
#include "luciscan/prescan.hpp"
#include "luciscan/reaching.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw luciscan::ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty() || path == "-") {
        std::cout << bytes;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw luciscan::ConfigError("cannot write " + path);
    out << bytes;
}

// parse + lower one file the same way the scanner would
luciscan::cfg::BuildResult build_file(const std::string& path, std::string& text) {
    text = read_file(path);
    auto pre = luciscan::frontend::prescan_source(text);
    text = pre.sanitized_text;
    auto ast = luciscan::frontend::parse_chunk(text, path);
    return luciscan::cfg::build_cfgs(*ast, path, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"static taint analysis for Lua/LuCI firmware trees"};
    app.require_subcommand(1);
    app.set_config("--config");

    luciscan::pipeline::ScanConfig cfg;
    cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string format = "json";
    std::string output;
    std::string timings_path;
    bool no_framework = false;
    bool no_dict_approx = false;

    auto* scan_cmd = app.add_subcommand("scan", "scan a firmware directory tree");
    scan_cmd->add_option("root", cfg.root, "extracted firmware root")->required();
    scan_cmd->add_flag("--luci-only", cfg.luci_only,
                       "restrict to usr/lib/lua/luci when present");
    scan_cmd->add_option("--include", cfg.include, "extra include globs");
    scan_cmd->add_option("--exclude", cfg.exclude, "exclude globs");
    scan_cmd->add_option("--trigger-words", cfg.trigger_words_path,
                         "JSON trigger-words file merged over the defaults");
    scan_cmd->add_option("--fixups", cfg.fixups_path,
                         "escape fixup table (FROM<TAB>TO lines)");
    scan_cmd->add_flag("--no-framework-rules", no_framework,
                       "keep flows the dispatcher rules would drop");
    scan_cmd->add_option("--inline-depth", cfg.inline_depth, "max nested inline splices")
        ->capture_default_str();
    scan_cmd->add_flag("--no-dict-approx", no_dict_approx,
                       "keep every function definition instance (slower)");
    scan_cmd->add_flag("--llm-prune", cfg.llm.enabled, "post-filter findings via an LLM");
    scan_cmd->add_option("--llm-endpoint", cfg.llm.endpoint,
                         "chat-completions endpoint URL");
    scan_cmd->add_option("--llm-model", cfg.llm.model, "model name")->capture_default_str();
    scan_cmd->add_option("--llm-votes", cfg.llm.votes, "votes per finding")
        ->capture_default_str();
    scan_cmd->add_option("--format", format, "json|text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    scan_cmd->add_option("--output,-o", output, "report path (default stdout)");
    scan_cmd->add_option("--workers,-j", cfg.workers, "worker threads")
        ->capture_default_str();
    scan_cmd->add_option("--dump-cfg", cfg.dump_cfg_path, "write all CFGs as DOT");
    scan_cmd->add_option("--dump-reaching", cfg.dump_reaching_path,
                         "write reaching-definitions tables");
    scan_cmd->add_option("--timings", timings_path,
                         "write wall time / memory metrics as JSON");

    std::string selftest_dir;
    auto* selftest_cmd = app.add_subcommand("selftest", "run the annotated fixture corpus");
    selftest_cmd->add_option("corpus", selftest_dir, "corpus directory")->required();
    selftest_cmd->add_option("--workers,-j", cfg.workers, "worker threads");
    selftest_cmd->add_flag("--no-framework-rules", no_framework);
    selftest_cmd->add_option("--trigger-words", cfg.trigger_words_path);
    selftest_cmd->add_option("--inline-depth", cfg.inline_depth);

    std::string dump_file;
    std::string dump_out;
    auto* dumpcfg_cmd = app.add_subcommand("dump-cfg", "print the CFGs of one Lua file");
    dumpcfg_cmd->add_option("file", dump_file, "Lua source file")->required();
    dumpcfg_cmd->add_option("--output,-o", dump_out, "output path (default stdout)");

    auto* dumpreach_cmd =
        app.add_subcommand("dump-reaching", "print reaching-definitions tables");
    dumpreach_cmd->add_option("file", dump_file, "Lua source file")->required();
    dumpreach_cmd->add_option("--output,-o", dump_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(scan_cmd)) {
            cfg.framework_rules = !no_framework;
            cfg.dict_approx = !no_dict_approx;
            auto outcome = luciscan::pipeline::scan(cfg);
            write_output(output, format == "json"
                                     ? luciscan::report::emit_json(outcome.report)
                                     : luciscan::report::emit_text(outcome.report));
            if (!timings_path.empty()) {
                std::ostringstream ts;
                ts << "{\n  \"wall_ms\": " << outcome.metrics.wall_ms
                   << ",\n  \"peak_rss_kb\": " << outcome.metrics.peak_rss_kb
                   << ",\n  \"dict_entries\": " << outcome.metrics.dict_entries
                   << ",\n  \"roots_analyzed\": " << outcome.metrics.roots_analyzed
                   << ",\n  \"files_parsed\": " << outcome.metrics.files_parsed << "\n}\n";
                write_output(timings_path, ts.str());
            }
            std::cerr << "scanned " << outcome.report.file_count << " files in "
                      << outcome.metrics.wall_ms << " ms, "
                      << outcome.report.findings.size() << " finding(s)\n";
            return outcome.exit_code;
        }
        if (app.got_subcommand(selftest_cmd)) {
            cfg.framework_rules = !no_framework;
            cfg.root = ".";  // set per fixture
            auto res = luciscan::pipeline::selftest(selftest_dir, cfg);
            std::cout << res.summary;
            std::cout << (res.failed == 0 ? "PASS" : "FAIL") << " (" << res.fixtures
                      << " fixtures, " << res.failed << " failed)\n";
            return res.failed == 0 ? 0 : 1;
        }
        if (app.got_subcommand(dumpcfg_cmd)) {
            std::string text;
            auto built = build_file(dump_file, text);
            std::string out;
            for (const auto& c : built.cfgs) out += luciscan::cfg::to_dot(*c);
            write_output(dump_out, out);
            return 0;
        }
        if (app.got_subcommand(dumpreach_cmd)) {
            std::string text;
            auto built = build_file(dump_file, text);
            std::string out;
            for (const auto& c : built.cfgs) {
                auto ct = luciscan::dataflow::analyze(*c);
                out += "== " + c->source_path + " :: " + c->name + "\n";
                out += luciscan::dataflow::dump(ct, *c);
            }
            write_output(dump_out, out);
            return 0;
        }
    } catch (const luciscan::RootNotFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const luciscan::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const luciscan::SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
