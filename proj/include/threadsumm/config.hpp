#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "threadsumm/gateway.hpp"

namespace threadsumm {

struct ProviderEntry {
  std::string id;
  std::string kind;  // chat | embedding | mock-chat | mock-embedding
  std::string base_url;
  std::string model_id;
  std::string api_key_env;
  int timeout_s = 60;
  // mock-chat only
  std::vector<std::pair<std::string, std::string>> substring_script;
  std::vector<std::pair<std::string, std::string>> digest_script;
  // mock-embedding only
  std::uint64_t seed = 0;
  std::size_t dim = 32;
};

struct GatewayConfig {
  std::vector<ProviderEntry> providers;
  std::string generator;  // provider id
  std::string scorer;     // optional; defaults to generator
  std::string embedder;
  std::optional<std::string> cache_dir;

  const ProviderEntry& find(const std::string& id) const;
};

GatewayConfig load_gateway_config(const std::string& path);

std::shared_ptr<ChatProvider> make_chat_provider(const ProviderEntry& entry);
std::shared_ptr<EmbeddingProvider> make_embedding_provider(const ProviderEntry& entry);

// Builds the full gateway from config: generator, optional distinct scorer,
// embedder, and the on-disk cache when configured.
std::shared_ptr<Gateway> make_gateway(const GatewayConfig& config);

}  // namespace threadsumm
