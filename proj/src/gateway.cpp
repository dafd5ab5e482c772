#include "threadsumm/gateway.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "threadsumm/error.hpp"

namespace threadsumm {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(PromptTag tag) {
  switch (tag) {
    case PromptTag::Aspect: return "aspect";
    case PromptTag::Acu: return "acu";
    case PromptTag::Reorder: return "reorder";
    case PromptTag::Paragraph: return "paragraph";
    case PromptTag::Evaluate: return "evaluate";
    case PromptTag::Vanilla: return "vanilla";
    case PromptTag::AspectMetric: return "aspect_metric";
  }
  return "unknown";
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

namespace {
// Length-prefixed concatenation so field boundaries cannot collide.
std::string keyed(std::initializer_list<std::string> parts) {
  std::string buf;
  for (const auto& p : parts) {
    buf += std::to_string(p.size());
    buf += ':';
    buf += p;
  }
  return buf;
}
}  // namespace

CacheKey CacheKey::for_chat(const std::string& provider_id, const ChatRequest& req) {
  std::ostringstream temp;
  temp << req.temperature;
  return {sha256_hex(keyed({"chat", provider_id, req.model_id, temp.str(),
                            req.system_prompt.value_or(""), req.user_prompt}))};
}

CacheKey CacheKey::for_embedding(const std::string& provider_id,
                                 const std::string& model_id,
                                 const std::string& input_text) {
  return {sha256_hex(keyed({"embed", provider_id, model_id, input_text}))};
}

ResponseCache::ResponseCache(std::string directory) : dir_(std::move(directory)) {
  fs::create_directories(dir_);
}

std::optional<std::string> ResponseCache::get(const CacheKey& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  fs::path p = fs::path(dir_) / (key.digest + ".json");
  std::ifstream in(p);
  if (!in) return std::nullopt;
  try {
    json rec = json::parse(in);
    return rec.at("response_text").get<std::string>();
  } catch (...) {
    return std::nullopt;  // corrupt record treated as a miss
  }
}

void ResponseCache::put(const CacheKey& key, const std::string& request_summary,
                        const std::string& response_text,
                        const std::string& provider_id) {
  std::lock_guard<std::mutex> lock(mu_);
  fs::path p = fs::path(dir_) / (key.digest + ".json");
  if (fs::exists(p)) return;  // at most one write per key
  json rec;
  rec["key"] = key.digest;
  rec["request_summary"] = request_summary;
  rec["response_text"] = response_text;
  rec["created_at"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch()).count();
  rec["provider_id"] = provider_id;
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << rec.dump(2);
  }
  fs::rename(tmp, p);
}

Gateway::Gateway(std::shared_ptr<ChatProvider> chat,
                 std::shared_ptr<EmbeddingProvider> embedder,
                 std::shared_ptr<ResponseCache> cache, RetryPolicy retry)
    : chat_(std::move(chat)), embedder_(std::move(embedder)),
      cache_(std::move(cache)), retry_(retry) {}

std::string Gateway::run_with_retry(const std::function<std::string()>& call) {
  int attempt = 0;
  for (;;) {
    try {
      return call();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Transport || ++attempt >= retry_.max_attempts) throw;
      std::this_thread::sleep_for(
          std::chrono::milliseconds(retry_.base_delay_ms << (attempt - 1)));
    }
  }
}

std::string Gateway::dedup_call(const std::string& digest,
                                const std::function<std::string()>& call) {
  std::shared_future<std::string> fut;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(inflight_mu_);
    auto it = inflight_.find(digest);
    if (it != inflight_.end()) {
      fut = it->second;
    } else {
      std::promise<std::string> prom;
      fut = prom.get_future().share();
      inflight_.emplace(digest, fut);
      owner = true;
      // Run the call outside the lock via the promise below.
      std::thread([call, p = std::move(prom)]() mutable {
        try {
          p.set_value(call());
        } catch (...) {
          p.set_exception(std::current_exception());
        }
      }).detach();
    }
  }
  struct Cleanup {
    Gateway* g;
    const std::string& d;
    bool active;
    ~Cleanup() {
      if (!active) return;
      std::lock_guard<std::mutex> lock(g->inflight_mu_);
      g->inflight_.erase(d);
    }
  } cleanup{this, digest, owner};
  return fut.get();
}

ChatResponse Gateway::complete(const ChatRequest& req) {
  auto provider = (req.tag == PromptTag::Evaluate && scorer_) ? scorer_ : chat_;
  if (!provider) throw Error(ErrorKind::Config, "no chat provider configured");
  CacheKey key = CacheKey::for_chat(provider->id(), req);

  ChatResponse resp;
  resp.provider_id = provider->id();

  auto emit = [&](const ChatResponse& r) {
    if (!listener_) return;
    CallRecord rec;
    rec.kind = CallRecord::Kind::Chat;
    rec.model_id = req.model_id;
    rec.tag = req.tag;
    rec.cache_key = key.digest;
    rec.cached = r.cached;
    rec.latency_ms = r.latency_ms;
    rec.provider_id = r.provider_id;
    rec.response_text = r.text;
    rec.temperature = req.temperature;
    std::istringstream words(req.user_prompt + " " + req.system_prompt.value_or(""));
    std::string w;
    while (words >> w) ++rec.approx_tokens;
    listener_(rec);
  };

  if (cache_ && !req.bypass_cache) {
    if (auto hit = cache_->get(key)) {
      resp.text = *hit;
      resp.cached = true;
      emit(resp);
      return resp;
    }
  }

  auto started = std::chrono::steady_clock::now();
  resp.text = dedup_call(key.digest, [&] {
    return run_with_retry([&] { return provider->complete(req); });
  });
  resp.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - started).count();
  if (resp.text.empty())
    throw Error(ErrorKind::EmptyResponse,
                std::string("empty completion for tag ") + to_string(req.tag));
  if (cache_)
    cache_->put(key, std::string(to_string(req.tag)), resp.text, provider->id());
  emit(resp);
  return resp;
}

std::vector<EmbeddingVector> Gateway::embed(const std::vector<std::string>& texts) {
  if (!embedder_) throw Error(ErrorKind::Config, "no embedding provider configured");
  if (texts.empty()) throw Error(ErrorKind::EmptyInput, "embed: no texts");
  for (const auto& t : texts)
    if (t.empty()) throw Error(ErrorKind::EmptyInput, "embed: empty text in batch");

  auto emit = [&](const std::string& digest, bool cached, const std::vector<double>& vec) {
    if (!listener_) return;
    CallRecord rec;
    rec.kind = CallRecord::Kind::Embedding;
    rec.cache_key = digest;
    rec.cached = cached;
    rec.provider_id = embedder_->id();
    rec.model_id = embedder_->model_id();
    rec.response_text = json(vec).dump();
    listener_(rec);
  };

  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::size_t> missing;
  std::vector<std::string> missing_texts;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    CacheKey key = CacheKey::for_embedding(embedder_->id(), embedder_->model_id(), texts[i]);
    if (cache_) {
      if (auto hit = cache_->get(key)) {
        json vals = json::parse(*hit);
        out[i] = {vals.get<std::vector<double>>(), embedder_->model_id()};
        emit(key.digest, true, out[i].values);
        continue;
      }
    }
    missing.push_back(i);
    missing_texts.push_back(texts[i]);
  }
  if (!missing.empty()) {
    auto vecs = embedder_->embed(missing_texts);
    if (vecs.size() != missing_texts.size())
      throw Error(ErrorKind::ProviderContract, "embedding count mismatch");
    std::size_t dim = vecs.empty() ? 0 : vecs[0].size();
    for (const auto& v : vecs)
      if (v.size() != dim)
        throw Error(ErrorKind::ProviderContract, "embedding dimension mismatch in batch");
    for (std::size_t j = 0; j < missing.size(); ++j) {
      out[missing[j]] = {vecs[j], embedder_->model_id()};
      CacheKey key = CacheKey::for_embedding(embedder_->id(), embedder_->model_id(),
                                             missing_texts[j]);
      if (cache_) cache_->put(key, "embedding", json(vecs[j]).dump(), embedder_->id());
      emit(key.digest, false, vecs[j]);
    }
  }
  // Enforce one dimension per model across the whole batch, hits included.
  std::size_t dim = out[0].values.size();
  for (const auto& v : out)
    if (v.values.size() != dim)
      throw Error(ErrorKind::ProviderContract, "embedding dimension drift across batch");
  return out;
}

}  // namespace threadsumm
