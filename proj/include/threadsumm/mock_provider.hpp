#pragma once

#include <map>
#include <string>
#include <vector>

#include "threadsumm/gateway.hpp"

namespace threadsumm {

// One scripted answer. Matches either an exact cache-key digest or a
// substring of the user prompt; at most one matcher may fire per request.
struct ScriptEntry {
  enum class Kind { Digest, Substring };
  Kind kind = Kind::Substring;
  std::string pattern;
  std::string response;
};

class MockChatProvider : public ChatProvider {
 public:
  explicit MockChatProvider(std::vector<ScriptEntry> script,
                            std::string provider_id = "mock");

  std::string id() const override { return id_; }
  std::string complete(const ChatRequest& req) override;

  // Responses consumed in order when the same matcher fires repeatedly;
  // the last response sticks. Lets tests script retry sequences.
  void add_sequence(const std::string& substring, std::vector<std::string> responses);

 private:
  std::string id_;
  std::vector<ScriptEntry> script_;
  struct Sequence {
    std::vector<std::string> responses;
    std::size_t next = 0;
  };
  std::map<std::string, Sequence> sequences_;
};

// Deterministic embeddings: unit vectors seeded from a hash of the text,
// with optional explicit per-text overrides for tests.
class MockEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit MockEmbeddingProvider(std::uint64_t seed = 0, std::size_t dim = 32,
                                 std::string provider_id = "mock-embed");

  std::string id() const override { return id_; }
  std::string model_id() const override { return "seeded-hash"; }
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

  void set_override(const std::string& text, std::vector<double> vec);

  std::vector<double> vector_for(const std::string& text) const;

 private:
  std::string id_;
  std::uint64_t seed_;
  std::size_t dim_;
  std::map<std::string, std::vector<double>> overrides_;
};

}  // namespace threadsumm
