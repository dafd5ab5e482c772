#pragma once

#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace threadsumm {

// Stage that produced a request, for manifest bookkeeping.
enum class PromptTag {
  Aspect,
  Acu,
  Reorder,
  Paragraph,
  Evaluate,
  Vanilla,
  AspectMetric,
};

const char* to_string(PromptTag tag);

struct ChatRequest {
  std::optional<std::string> system_prompt;
  std::string user_prompt;
  std::string model_id;
  double temperature = 0.0;
  std::optional<int> max_output_tokens;
  PromptTag tag = PromptTag::Vanilla;
  // Skip the cache read (retries of malformed responses); writes still happen.
  bool bypass_cache = false;
};

struct ChatResponse {
  std::string text;
  std::string provider_id;
  std::int64_t latency_ms = 0;
  bool cached = false;
};

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_id;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Content-addressed key over everything that determines a response.
struct CacheKey {
  std::string digest;  // hex SHA-256

  static CacheKey for_chat(const std::string& provider_id, const ChatRequest& req);
  static CacheKey for_embedding(const std::string& provider_id,
                                const std::string& model_id,
                                const std::string& input_text);
};

std::string sha256_hex(const std::string& data);

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string id() const = 0;
  // Returns raw completion text. Throws Error on transport/config failures.
  virtual std::string complete(const ChatRequest& req) = 0;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual std::string model_id() const = 0;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

// On-disk JSON record store keyed by digest; writes are atomic per key.
class ResponseCache {
 public:
  explicit ResponseCache(std::string directory);

  std::optional<std::string> get(const CacheKey& key) const;
  void put(const CacheKey& key, const std::string& request_summary,
           const std::string& response_text, const std::string& provider_id);

  const std::string& directory() const { return dir_; }

 private:
  std::string dir_;
  mutable std::mutex mu_;
};

// One ledger entry per provider call that reaches the gateway. Embedding
// calls are recorded per text (response_text holds the JSON vector) so a
// manifest replay needs no live provider at all.
struct CallRecord {
  enum class Kind { Chat, Embedding };
  Kind kind = Kind::Chat;
  PromptTag tag = PromptTag::Vanilla;
  std::string cache_key;
  bool cached = false;
  std::int64_t latency_ms = 0;
  std::string provider_id;
  std::string model_id;
  std::string response_text;
  std::size_t approx_tokens = 0;  // crude whitespace estimate of request size
  double temperature = 0.0;
};

using CallListener = std::function<void(const CallRecord&)>;

struct RetryPolicy {
  int max_attempts = 3;
  int base_delay_ms = 200;
};

// All pipeline prompts flow through here: caching, retries with backoff,
// and in-flight deduplication of identical concurrent requests.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatProvider> chat,
          std::shared_ptr<EmbeddingProvider> embedder,
          std::shared_ptr<ResponseCache> cache = nullptr,
          RetryPolicy retry = {});

  ChatResponse complete(const ChatRequest& req);
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);

  void set_listener(CallListener listener) { listener_ = std::move(listener); }
  void set_scorer(std::shared_ptr<ChatProvider> scorer) { scorer_ = std::move(scorer); }

  const std::shared_ptr<ChatProvider>& chat_provider() const { return chat_; }
  const std::shared_ptr<EmbeddingProvider>& embedding_provider() const { return embedder_; }

 private:
  std::string run_with_retry(const std::function<std::string()>& call);
  std::string dedup_call(const std::string& digest, const std::function<std::string()>& call);

  std::shared_ptr<ChatProvider> chat_;
  std::shared_ptr<ChatProvider> scorer_;  // optional distinct scoring model
  std::shared_ptr<EmbeddingProvider> embedder_;
  std::shared_ptr<ResponseCache> cache_;
  RetryPolicy retry_;
  CallListener listener_;

  std::mutex inflight_mu_;
  std::map<std::string, std::shared_future<std::string>> inflight_;
};

}  // namespace threadsumm
