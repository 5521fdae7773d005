// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "luciscan/report.hpp"

namespace luciscan::llm {

enum class Verdict { TrueAlarm, FalseAlarm, Unparseable };

/// Case-insensitive scan for a verdict token; both tokens present (or
/// neither) means the reply is unusable.
Verdict parse_verdict(const std::string& response);

struct PruneRequest {
    std::string finding_id;
    std::string prompt_text;
    std::string model;
    double temperature = 0.0;
    bool truncated = false;
};

struct VoteTally {
    std::vector<Verdict> votes;
    report::LlmLabel label = report::LlmLabel::Unevaluated;
    double confidence = 0.0;
};

/// Majority vote; ties resolve to TRUE_ALARM so possible bugs survive.
VoteTally tally_votes(const std::vector<Verdict>& votes);

/// Source text of one function on the flow chain.
struct ChainFunction {
    std::string name;
    std::string source;
};

struct PromptLimits {
    std::size_t max_chars = 48 * 1024;
};

/// Deterministic prompt: auditor preamble, one code fence per chain function,
/// the source->sink description, and the fixed verdict instruction. When the
/// text would exceed the limit, middle functions are elided (endpoints stay)
/// and `truncated` is set.
PruneRequest build_prompt(const report::Finding& finding,
                          const std::vector<ChainFunction>& sources,
                          const std::string& model, const PromptLimits& limits = {});

struct ChatResult {
    bool ok = false;
    std::string content;
    std::int64_t prompt_tokens = 0;
    std::int64_t response_tokens = 0;
    std::string error;
};

/// Chat-completions transport. The HTTP client and the test mock both
/// implement this.
class ChatClient {
  public:
    virtual ~ChatClient() = default;
    virtual ChatResult complete(const PruneRequest& request) = 0;
};

struct HttpClientOptions {
    std::string endpoint;  // e.g. http://127.0.0.1:8080/v1/chat/completions
    std::string model = "gpt-4";
    std::string api_key_env = "LUCISCAN_LLM_API_KEY";
    int connect_timeout_ms = 5000;
    int read_timeout_ms = 120000;
};

/// OpenAI-compatible chat-completions client over cpp-httplib. The credential
/// comes from the environment, never from a flag.
std::unique_ptr<ChatClient> make_http_client(const HttpClientOptions& opts);

struct PruneOptions {
    int votes = 5;
    int max_attempts = 3;        // per request, capped exponential backoff
    int backoff_base_ms = 100;
    PromptLimits limits;
    std::string model = "gpt-4";
};

struct PruneOutcome {
    std::map<std::string, VoteTally> tallies;  // finding id -> tally
    report::LlmStats stats;
};

/// Labels each finding by majority over `votes` completions. Identical
/// prompts are sent once and the tally shared. Service failures leave the
/// finding UNEVALUATED (and kept). Findings are never deleted here; the
/// caller moves FALSE_ALARM ones into the report's pruned section.
PruneOutcome prune(std::vector<report::Finding>& findings,
                   const std::function<std::vector<ChainFunction>(const report::Finding&)>&
                       chain_sources,
                   ChatClient& client, const PruneOptions& opts);

}  // namespace luciscan::llm
