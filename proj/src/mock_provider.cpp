#include "threadsumm/mock_provider.hpp"

#include <algorithm>
#include <cmath>

#include "threadsumm/error.hpp"

namespace threadsumm {

MockChatProvider::MockChatProvider(std::vector<ScriptEntry> script, std::string provider_id)
    : id_(std::move(provider_id)), script_(std::move(script)) {
  for (std::size_t i = 0; i < script_.size(); ++i) {
    for (std::size_t j = i + 1; j < script_.size(); ++j) {
      const auto& a = script_[i];
      const auto& b = script_[j];
      if (a.kind != b.kind) continue;
      bool overlap = a.kind == ScriptEntry::Kind::Digest
                         ? a.pattern == b.pattern
                         : (a.pattern.find(b.pattern) != std::string::npos ||
                            b.pattern.find(a.pattern) != std::string::npos);
      if (overlap)
        throw Error(ErrorKind::Config,
                    "ambiguous mock script: matchers '" + a.pattern + "' and '" +
                        b.pattern + "' can fire on the same request");
    }
  }
}

void MockChatProvider::add_sequence(const std::string& substring,
                                    std::vector<std::string> responses) {
  sequences_[substring] = {std::move(responses), 0};
}

std::string MockChatProvider::complete(const ChatRequest& req) {
  const std::string digest = CacheKey::for_chat(id_, req).digest;
  const std::string haystack =
      req.system_prompt.value_or("") + "\n" + req.user_prompt;

  const ScriptEntry* hit = nullptr;
  for (const auto& e : script_) {
    bool fires = e.kind == ScriptEntry::Kind::Digest
                     ? e.pattern == digest
                     : haystack.find(e.pattern) != std::string::npos;
    if (!fires) continue;
    if (hit)
      throw Error(ErrorKind::Config, "ambiguous mock script: multiple matchers fired");
    hit = &e;
  }
  if (hit) return hit->response;

  for (auto& [pattern, seq] : sequences_) {
    if (haystack.find(pattern) == std::string::npos) continue;
    std::size_t idx = std::min(seq.next, seq.responses.size() - 1);
    ++seq.next;
    return seq.responses[idx];
  }

  throw Error(ErrorKind::ScriptedGap,
              std::string("mock provider has no script entry for tag ") +
                  to_string(req.tag));
}

MockEmbeddingProvider::MockEmbeddingProvider(std::uint64_t seed, std::size_t dim,
                                             std::string provider_id)
    : id_(std::move(provider_id)), seed_(seed), dim_(dim) {}

void MockEmbeddingProvider::set_override(const std::string& text, std::vector<double> vec) {
  overrides_[text] = std::move(vec);
}

namespace {
// splitmix64: platform-stable, unlike <random> distributions.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace

std::vector<double> MockEmbeddingProvider::vector_for(const std::string& text) const {
  auto it = overrides_.find(text);
  if (it != overrides_.end()) {
    // Pad overrides to the provider dimension so batches stay rectangular.
    std::vector<double> v = it->second;
    v.resize(dim_, 0.0);
    return v;
  }
  std::uint64_t state = fnv1a(text) ^ seed_;
  std::vector<double> v(dim_);
  double norm = 0.0;
  for (auto& x : v) {
    x = static_cast<double>(splitmix64(state) >> 11) /
            static_cast<double>(1ULL << 53) * 2.0 - 1.0;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

std::vector<std::vector<double>> MockEmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(vector_for(t));
  return out;
}

}  // namespace threadsumm
