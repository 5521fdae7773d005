// SPDX-License-Identifier: Apache-2.0
#include "luciscan/llm.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace luciscan::llm {

using nlohmann::json;

namespace {

std::size_t find_ci(const std::string& haystack, const std::string& needle) {
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                          [](char a, char b) {
                              return std::tolower(static_cast<unsigned char>(a)) ==
                                     std::tolower(static_cast<unsigned char>(b));
                          });
    return it == haystack.end() ? std::string::npos
                                : static_cast<std::size_t>(it - haystack.begin());
}

}  // namespace

Verdict parse_verdict(const std::string& response) {
    std::size_t t = find_ci(response, "TRUE_ALARM");
    std::size_t f = find_ci(response, "FALSE_ALARM");
    if (t != std::string::npos && f != std::string::npos) return Verdict::Unparseable;
    if (t != std::string::npos) return Verdict::TrueAlarm;
    if (f != std::string::npos) return Verdict::FalseAlarm;
    return Verdict::Unparseable;
}

VoteTally tally_votes(const std::vector<Verdict>& votes) {
    VoteTally t;
    t.votes = votes;
    int yes = 0, no = 0;
    for (Verdict v : votes) {
        if (v == Verdict::TrueAlarm) ++yes;
        if (v == Verdict::FalseAlarm) ++no;
    }
    if (yes == 0 && no == 0) {
        t.label = report::LlmLabel::Unevaluated;
        t.confidence = 0.0;
        return t;
    }
    // ties keep the alarm: never silently drop a possible bug
    if (yes >= no) {
        t.label = report::LlmLabel::TrueAlarm;
        t.confidence = votes.empty() ? 0.0 : static_cast<double>(yes) / votes.size();
    } else {
        t.label = report::LlmLabel::FalseAlarm;
        t.confidence = votes.empty() ? 0.0 : static_cast<double>(no) / votes.size();
    }
    return t;
}

PruneRequest build_prompt(const report::Finding& finding,
                          const std::vector<ChainFunction>& sources,
                          const std::string& model, const PromptLimits& limits) {
    PruneRequest req;
    req.finding_id = finding.id;
    req.model = model;

    std::string head =
        "You are a security auditor reviewing Lua code from an embedded web "
        "configuration interface.\n\n";
    std::string tail = "Finding under review: " +
                       std::string(taint::to_string(finding.type)) +
                       " — data from " + finding.source_name + " (line " +
                       std::to_string(finding.source_line) + ") reaches " +
                       finding.sink_name + " (line " + std::to_string(finding.sink_line) +
                       ", argument " + std::to_string(finding.arg) + ") in " + finding.file +
                       ".\n";
    if (!finding.chain.empty()) {
        tail += "Call/assignment chain: ";
        std::string prev;
        bool first = true;
        for (const auto& e : finding.chain) {
            if (e.func == prev) continue;
            if (!first) tail += " -> ";
            tail += e.func;
            prev = e.func;
            first = false;
        }
        tail += "\n";
    }
    tail +=
        "\nDecide whether this is an exploitable data flow or a false alarm.\n"
        "Answer exactly TRUE_ALARM or FALSE_ALARM, then justify.\n";

    auto fence = [](const ChainFunction& f) {
        return "Function `" + f.name + "`:\n```lua\n" + f.source + "\n```\n\n";
    };

    // middle functions get elided first; source and sink endpoints stay
    std::size_t budget = limits.max_chars;
    std::size_t fixed = head.size() + tail.size();
    std::vector<bool> keep(sources.size(), true);
    std::size_t total = fixed;
    for (const auto& f : sources) total += fence(f).size();
    if (total > budget && sources.size() > 2) {
        req.truncated = true;
        // drop the most central functions first; endpoints always stay
        std::vector<std::size_t> order;
        for (std::size_t i = 1; i + 1 < sources.size(); ++i) order.push_back(i);
        double center = (static_cast<double>(sources.size()) - 1.0) / 2.0;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double da = std::abs(static_cast<double>(a) - center);
            double db = std::abs(static_cast<double>(b) - center);
            return da != db ? da < db : a < b;
        });
        for (std::size_t idx : order) {
            if (total <= budget) break;
            keep[idx] = false;
            total -= fence(sources[idx]).size();
        }
    }

    std::string body;
    bool elided = false;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (keep[i]) {
            if (elided) {
                body += "(... intermediate functions elided ...)\n\n";
                elided = false;
            }
            body += fence(sources[i]);
        } else {
            elided = true;
        }
    }
    if (elided) body += "(... intermediate functions elided ...)\n\n";

    req.prompt_text = head + body + tail;
    return req;
}

namespace {

struct ParsedEndpoint {
    std::string host_port;  // scheme://host:port
    std::string path;
};

ParsedEndpoint split_endpoint(const std::string& endpoint) {
    ParsedEndpoint out;
    auto scheme = endpoint.find("://");
    std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    auto slash = endpoint.find('/', host_start);
    if (slash == std::string::npos) {
        out.host_port = endpoint;
        out.path = "/v1/chat/completions";
    } else {
        out.host_port = endpoint.substr(0, slash);
        out.path = endpoint.substr(slash);
    }
    return out;
}

class HttpChatClient : public ChatClient {
  public:
    explicit HttpChatClient(const HttpClientOptions& opts)
        : opts_(opts), parsed_(split_endpoint(opts.endpoint)) {}

    ChatResult complete(const PruneRequest& request) override {
        httplib::Client cli(parsed_.host_port);
        cli.set_connection_timeout(0, opts_.connect_timeout_ms * 1000);
        cli.set_read_timeout(opts_.read_timeout_ms / 1000,
                             (opts_.read_timeout_ms % 1000) * 1000);

        httplib::Headers headers;
        if (const char* key = std::getenv(opts_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

        json body;
        body["model"] = request.model;
        body["temperature"] = request.temperature;
        body["messages"] = json::array(
            {{{"role", "user"}, {"content", request.prompt_text}}});

        ChatResult result;
        auto res = cli.Post(parsed_.path, headers, body.dump(), "application/json");
        if (!res) {
            result.error = "connection failed: " + httplib::to_string(res.error());
            return result;
        }
        if (res->status != 200) {
            result.error = "http status " + std::to_string(res->status);
            return result;
        }
        try {
            json doc = json::parse(res->body);
            result.content =
                doc.at("choices").at(0).at("message").at("content").get<std::string>();
            if (doc.contains("usage")) {
                result.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
                result.response_tokens = doc["usage"].value("completion_tokens", 0);
            }
            result.ok = true;
        } catch (const json::exception& e) {
            result.error = std::string("malformed response: ") + e.what();
        }
        return result;
    }

  private:
    HttpClientOptions opts_;
    ParsedEndpoint parsed_;
};

}  // namespace

std::unique_ptr<ChatClient> make_http_client(const HttpClientOptions& opts) {
    return std::make_unique<HttpChatClient>(opts);
}

PruneOutcome prune(std::vector<report::Finding>& findings,
                   const std::function<std::vector<ChainFunction>(const report::Finding&)>&
                       chain_sources,
                   ChatClient& client, const PruneOptions& opts) {
    PruneOutcome out;
    // identical prompts are asked once per scan; the tally is shared
    std::map<std::string, VoteTally> by_prompt;

    for (auto& f : findings) {
        PruneRequest req = build_prompt(f, chain_sources(f), opts.model, opts.limits);
        auto cached = by_prompt.find(req.prompt_text);
        VoteTally tally;
        if (cached != by_prompt.end()) {
            tally = cached->second;
        } else {
            std::vector<Verdict> votes;
            bool outage = false;
            for (int v = 0; v < opts.votes && !outage; ++v) {
                ChatResult res;
                for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
                    res = client.complete(req);
                    ++out.stats.requests;
                    if (res.ok) break;
                    std::this_thread::sleep_for(std::chrono::milliseconds(
                        opts.backoff_base_ms * (1 << std::min(attempt, 4))));
                }
                if (!res.ok) {
                    outage = true;
                    break;
                }
                out.stats.prompt_tokens += res.prompt_tokens;
                out.stats.response_tokens += res.response_tokens;
                votes.push_back(parse_verdict(res.content));
            }
            if (outage || static_cast<int>(votes.size()) < opts.votes) {
                tally.votes = votes;
                tally.label = report::LlmLabel::Unevaluated;
                tally.confidence = 0.0;
            } else {
                tally = tally_votes(votes);
            }
            by_prompt.emplace(req.prompt_text, tally);
        }

        out.tallies[f.id] = tally;
        f.llm_label = tally.label;
        report::VoteCounts counts;
        for (Verdict v : tally.votes) {
            if (v == Verdict::TrueAlarm) ++counts.true_alarm;
            if (v == Verdict::FalseAlarm) ++counts.false_alarm;
            if (v == Verdict::Unparseable) ++counts.unparseable;
        }
        f.llm_votes = counts;
    }
    return out;
}

}  // namespace luciscan::llm
