#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "msweep/session.hpp"

namespace msweep {

/// Raised for unusable agent settings (missing credential, malformed endpoint).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RemoteAgentConfig {
  std::string endpoint;  // scheme://host[:port]/path
  std::string model;
  bool chat = true;      // false: completion-style body with a single "prompt"
  std::string api_key;
  int timeout_s = 120;
  int max_tokens = 0;    // 0 leaves it to the server
};

/// Credential lookup: the secret file wins when given, otherwise the environment variable.
inline std::string resolve_api_key(const std::string& env_var, const std::string& secret_file = {}) {
  if (!secret_file.empty()) {
    std::ifstream in(secret_file);
    if (!in) throw ConfigError("cannot read API key file " + secret_file);
    std::string key;
    std::getline(in, key);
    while (!key.empty() && (key.back() == '\r' || key.back() == ' ')) key.pop_back();
    if (key.empty()) throw ConfigError("API key file " + secret_file + " is empty");
    return key;
  }
  const char* v = std::getenv(env_var.c_str());
  if (!v || !*v) throw ConfigError("remote agent needs an API key: set " + env_var + " or pass a key file");
  return v;
}

namespace detail {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;
};

inline Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint must start with http:// or https://: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace detail

/// Chat-completion style HTTP agent, temperature 0. Bodies are kept verbatim for the log.
class RemoteAgent : public Agent {
 public:
  explicit RemoteAgent(RemoteAgentConfig cfg) : cfg_(std::move(cfg)), ep_(detail::split_endpoint(cfg_.endpoint)) {
    if (cfg_.model.empty()) throw ConfigError("remote agent needs a model name");
  }

  std::string request_body(const AgentRequest& req) const {
    nlohmann::ordered_json body;
    body["model"] = cfg_.model;
    body["temperature"] = 0;
    if (cfg_.max_tokens > 0) body["max_tokens"] = cfg_.max_tokens;
    if (cfg_.chat) {
      auto msgs = nlohmann::ordered_json::array();
      for (const auto& m : req.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
      body["messages"] = msgs;
    } else {
      std::string prompt;
      if (req.mode == PromptMode::CH) {
        prompt = req.prompt;
      } else {
        for (const auto& m : req.messages) prompt += (m.role == "user" ? "User: " : "Assistant: ") + m.content + "\n\n";
        prompt += "Assistant:";
      }
      body["prompt"] = prompt;
    }
    return body.dump();
  }

  AgentReply respond(const AgentRequest& req) override {
    AgentReply reply;
    reply.request_body = request_body(req);
    httplib::Client cli(ep_.origin);
    cli.set_connection_timeout(cfg_.timeout_s);
    cli.set_read_timeout(cfg_.timeout_s);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    auto res = cli.Post(ep_.path, headers, reply.request_body, "application/json");
    if (!res) throw TransportError("request to " + ep_.origin + " failed: " + httplib::to_string(res.error()));
    reply.response_body = res->body;
    if (res->status != 200)
      throw TransportError("agent endpoint answered HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    try {
      const auto j = nlohmann::json::parse(res->body);
      const auto& choice = j.at("choices").at(0);
      reply.text = cfg_.chat ? choice.at("message").at("content").get<std::string>() : choice.at("text").get<std::string>();
      if (j.contains("usage")) {
        reply.prompt_tokens = j["usage"].value("prompt_tokens", -1);
        reply.completion_tokens = j["usage"].value("completion_tokens", -1);
      }
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed agent response: ") + e.what());
    }
    return reply;
  }

  std::string name() const override { return "remote:" + cfg_.model; }
  bool remote() const override { return true; }

 private:
  RemoteAgentConfig cfg_;
  detail::Endpoint ep_;
};

}  // namespace msweep
