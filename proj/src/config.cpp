#include "threadsumm/config.hpp"

#include <fstream>

#include <json.hpp>

#include "threadsumm/error.hpp"
#include "threadsumm/http_provider.hpp"
#include "threadsumm/mock_provider.hpp"

namespace threadsumm {

using nlohmann::json;

const ProviderEntry& GatewayConfig::find(const std::string& id) const {
  for (const auto& p : providers)
    if (p.id == id) return p;
  throw Error(ErrorKind::Config, "provider id '" + id + "' not found in config");
}

GatewayConfig load_gateway_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }

  GatewayConfig cfg;
  for (const auto& jp : j.value("providers", json::array())) {
    ProviderEntry p;
    p.id = jp.at("id").get<std::string>();
    p.kind = jp.at("kind").get<std::string>();
    p.base_url = jp.value("base_url", "");
    p.model_id = jp.value("model_id", "");
    p.api_key_env = jp.value("api_key_env", "");
    p.timeout_s = jp.value("timeout_s", 60);
    p.seed = jp.value("seed", std::uint64_t{0});
    p.dim = jp.value("dim", std::size_t{32});
    for (const auto& js : jp.value("script", json::array())) {
      std::string response = js.at("response").get<std::string>();
      if (js.contains("substring"))
        p.substring_script.emplace_back(js["substring"].get<std::string>(), response);
      else if (js.contains("digest"))
        p.digest_script.emplace_back(js["digest"].get<std::string>(), response);
      else
        throw Error(ErrorKind::Config,
                    "script entry needs a 'substring' or 'digest' matcher");
    }
    cfg.providers.push_back(std::move(p));
  }
  cfg.generator = j.value("generator", "");
  cfg.scorer = j.value("scorer", "");
  cfg.embedder = j.value("embedder", "");
  if (j.contains("cache_dir")) cfg.cache_dir = j["cache_dir"].get<std::string>();

  if (cfg.generator.empty())
    throw Error(ErrorKind::Config, "config must name a 'generator' provider id");
  cfg.find(cfg.generator);
  if (!cfg.scorer.empty()) cfg.find(cfg.scorer);
  if (!cfg.embedder.empty()) cfg.find(cfg.embedder);
  return cfg;
}

std::shared_ptr<ChatProvider> make_chat_provider(const ProviderEntry& entry) {
  if (entry.kind == "chat") {
    HttpProviderConfig hc;
    hc.id = entry.id;
    hc.base_url = entry.base_url;
    hc.model_id = entry.model_id;
    hc.api_key_env = entry.api_key_env;
    hc.timeout_s = entry.timeout_s;
    return std::make_shared<HttpChatProvider>(hc);
  }
  if (entry.kind == "mock-chat") {
    std::vector<ScriptEntry> script;
    for (const auto& [pat, resp] : entry.substring_script)
      script.push_back({ScriptEntry::Kind::Substring, pat, resp});
    for (const auto& [pat, resp] : entry.digest_script)
      script.push_back({ScriptEntry::Kind::Digest, pat, resp});
    return std::make_shared<MockChatProvider>(std::move(script), entry.id);
  }
  throw Error(ErrorKind::Config,
              "provider '" + entry.id + "' has kind '" + entry.kind +
                  "', expected a chat provider");
}

std::shared_ptr<EmbeddingProvider> make_embedding_provider(const ProviderEntry& entry) {
  if (entry.kind == "embedding") {
    HttpProviderConfig hc;
    hc.id = entry.id;
    hc.base_url = entry.base_url;
    hc.model_id = entry.model_id;
    hc.api_key_env = entry.api_key_env;
    hc.timeout_s = entry.timeout_s;
    return std::make_shared<HttpEmbeddingProvider>(hc);
  }
  if (entry.kind == "mock-embedding")
    return std::make_shared<MockEmbeddingProvider>(entry.seed, entry.dim, entry.id);
  throw Error(ErrorKind::Config,
              "provider '" + entry.id + "' has kind '" + entry.kind +
                  "', expected an embedding provider");
}

std::shared_ptr<Gateway> make_gateway(const GatewayConfig& config) {
  auto chat = make_chat_provider(config.find(config.generator));
  std::shared_ptr<EmbeddingProvider> embed;
  if (!config.embedder.empty())
    embed = make_embedding_provider(config.find(config.embedder));
  std::shared_ptr<ResponseCache> cache;
  if (config.cache_dir) cache = std::make_shared<ResponseCache>(*config.cache_dir);

  auto gateway = std::make_shared<Gateway>(chat, embed, cache);
  if (!config.scorer.empty() && config.scorer != config.generator)
    gateway->set_scorer(make_chat_provider(config.find(config.scorer)));
  return gateway;
}

}  // namespace threadsumm
