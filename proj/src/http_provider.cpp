#include "threadsumm/http_provider.hpp"

#include <cstdlib>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "threadsumm/error.hpp"

namespace threadsumm {

using nlohmann::json;

namespace {

std::string lookup_key(const std::string& env_var, const std::string& provider_id) {
  if (env_var.empty()) return "";
  const char* v = std::getenv(env_var.c_str());
  if (!v || !*v)
    throw Error(ErrorKind::Config, "provider '" + provider_id + "': env var '" +
                                       env_var + "' is not set");
  return v;
}

json post_json(const HttpProviderConfig& cfg, const std::string& api_key,
               const std::string& path, const json& body) {
  httplib::Client client(cfg.base_url);
  client.set_connection_timeout(cfg.timeout_s);
  client.set_read_timeout(cfg.timeout_s);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res)
    throw Error(ErrorKind::Transport,
                "provider '" + cfg.id + "': " + httplib::to_string(res.error()));
  if (res->status >= 500)
    throw Error(ErrorKind::Transport,
                "provider '" + cfg.id + "': HTTP " + std::to_string(res->status));
  if (res->status >= 400)
    throw Error(ErrorKind::Config, "provider '" + cfg.id + "': HTTP " +
                                       std::to_string(res->status) + " " + res->body);
  try {
    return json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ProviderContract,
                "provider '" + cfg.id + "': unparseable response: " + e.what());
  }
}

}  // namespace

HttpChatProvider::HttpChatProvider(HttpProviderConfig config)
    : config_(std::move(config)), api_key_(lookup_key(config_.api_key_env, config_.id)) {}

std::string HttpChatProvider::complete(const ChatRequest& req) {
  json body;
  body["model"] = req.model_id.empty() ? config_.model_id : req.model_id;
  body["temperature"] = req.temperature;
  if (req.max_output_tokens) body["max_tokens"] = *req.max_output_tokens;
  body["messages"] = json::array();
  if (req.system_prompt)
    body["messages"].push_back({{"role", "system"}, {"content", *req.system_prompt}});
  body["messages"].push_back({{"role", "user"}, {"content", req.user_prompt}});

  json resp = post_json(config_, api_key_, config_.chat_path, body);
  try {
    return resp.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ProviderContract,
                "provider '" + config_.id + "': unexpected response shape: " + e.what());
  }
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpProviderConfig config)
    : config_(std::move(config)), api_key_(lookup_key(config_.api_key_env, config_.id)) {}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
  json body;
  body["model"] = config_.model_id;
  body["input"] = texts;
  json resp = post_json(config_, api_key_, config_.embeddings_path, body);
  std::vector<std::vector<double>> out;
  try {
    for (const auto& item : resp.at("data"))
      out.push_back(item.at("embedding").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ProviderContract,
                "provider '" + config_.id + "': unexpected response shape: " + e.what());
  }
  return out;
}

}  // namespace threadsumm
