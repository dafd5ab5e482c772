#pragma once

#include <string>

#include "threadsumm/gateway.hpp"

namespace threadsumm {

struct HttpProviderConfig {
  std::string id;
  std::string base_url;     // scheme://host[:port]
  std::string model_id;
  std::string api_key_env;  // env var holding the bearer token
  int timeout_s = 60;
  std::string chat_path = "/v1/chat/completions";
  std::string embeddings_path = "/v1/embeddings";
};

// Chat-completions wire shape: {"model", "messages":[{"role","content"}...],
// "temperature"} -> choices[0].message.content.
class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpProviderConfig config);

  std::string id() const override { return config_.id; }
  std::string complete(const ChatRequest& req) override;

 private:
  HttpProviderConfig config_;
  std::string api_key_;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpProviderConfig config);

  std::string id() const override { return config_.id; }
  std::string model_id() const override { return config_.model_id; }
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

 private:
  HttpProviderConfig config_;
  std::string api_key_;
};

}  // namespace threadsumm
