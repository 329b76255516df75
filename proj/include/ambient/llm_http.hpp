#pragma once

// Chat-completions client over HTTP(S). Kept out of llm.hpp so that only
// translation units that talk to a real endpoint pull in cpp-httplib.

#include <chrono>
#include <cstdlib>
#include <string>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ambient/error.hpp"
#include "ambient/llm.hpp"

namespace ambient {

inline constexpr std::string_view kLlmKeyEnv = "AMBIENT_LLM_KEY";
inline constexpr std::string_view kLlmLiveEnv = "AMBIENT_LLM_LIVE";

struct HttpLlmConfig {
    std::string endpoint = "https://api.openai.com/v1";  // base URL; /chat/completions is appended
    std::string model = "gpt-4";
    double timeout_s = 30.0;
    double temperature = 0.0;
    std::string api_key_env = std::string(kLlmKeyEnv);
};

struct ParsedUrl {
    std::string scheme_host_port;  // "https://host:port"
    std::string path;              // "/v1"
};

inline ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ArgumentError("endpoint must start with http:// or https://");
    auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ArgumentError("unsupported endpoint scheme '" + scheme + "'");
    auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    out.scheme_host_port = url.substr(0, path_start);
    out.path = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

/// Request body for one user turn.
inline nlohmann::json chat_request(const std::string& model, const std::string& prompt, double temperature) {
    return {{"model", model},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
            {"temperature", temperature}};
}

/// choices[0].message.content of a chat-completions response.
inline std::string chat_response_content(const std::string& body) {
    try {
        auto j = nlohmann::json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed chat-completions response: ") + e.what());
    }
}

class HttpCompletionClient final : public CompletionClient {
public:
    explicit HttpCompletionClient(HttpLlmConfig config) : config_(std::move(config)), url_(split_url(config_.endpoint)) {
        if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
    }

    std::string complete(const std::string& prompt) override {
        // One client per call keeps concurrent complete() calls independent.
        httplib::Client cli(url_.scheme_host_port);
        const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::duration<double>(config_.timeout_s));
        cli.set_connection_timeout(timeout);
        cli.set_read_timeout(timeout);
        cli.set_write_timeout(timeout);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        const auto body = chat_request(config_.model, prompt, config_.temperature).dump();
        auto res = cli.Post(url_.path + "/chat/completions", headers, body, "application/json");
        if (!res) throw TransportError("request to " + identity() + " failed: " + httplib::to_string(res.error()));
        if (res->status != 200) {
            throw TransportError("request to " + identity() + " returned HTTP " + std::to_string(res->status) + ": " +
                                 res->body.substr(0, 200));
        }
        return chat_response_content(res->body);
    }

    std::string identity() const override { return "http(" + config_.endpoint + ", " + config_.model + ")"; }

    bool has_key() const noexcept { return !api_key_.empty(); }

private:
    HttpLlmConfig config_;
    ParsedUrl url_;
    std::string api_key_;
};

}  // namespace ambient
