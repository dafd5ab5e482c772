#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "threadsumm/error.hpp"
#include "threadsumm/gateway.hpp"
#include "threadsumm/mock_provider.hpp"

using namespace threadsumm;
namespace fs = std::filesystem;

namespace {

ChatRequest make_request(const std::string& user, PromptTag tag = PromptTag::Aspect) {
  ChatRequest req;
  req.system_prompt = "system";
  req.user_prompt = user;
  req.model_id = "m1";
  req.tag = tag;
  return req;
}

// Counts invocations; can fail a scripted number of times first.
class CountingProvider : public ChatProvider {
 public:
  explicit CountingProvider(std::string response, int failures = 0,
                            ErrorKind kind = ErrorKind::Transport)
      : response_(std::move(response)), failures_(failures), kind_(kind) {}

  std::string id() const override { return "counting"; }

  std::string complete(const ChatRequest&) override {
    ++calls_;
    if (failures_ > 0) {
      --failures_;
      throw Error(kind_, "scripted failure");
    }
    return response_;
  }

  int calls() const { return calls_; }

 private:
  std::string response_;
  int failures_;
  ErrorKind kind_;
  std::atomic<int> calls_{0};
};

class SlowProvider : public ChatProvider {
 public:
  std::string id() const override { return "slow"; }
  std::string complete(const ChatRequest&) override {
    ++calls_;
    std::this_thread::sleep_for(std::chrono::milliseconds(80));
    return "slow answer";
  }
  std::atomic<int> calls_{0};
};

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ts-gw-" + std::to_string(std::chrono::steady_clock::now()
                                          .time_since_epoch()
                                          .count()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cache keys are deterministic and sensitive to every field") {
  auto req = make_request("hello");
  CHECK(CacheKey::for_chat("p", req).digest == CacheKey::for_chat("p", req).digest);
  CHECK(CacheKey::for_chat("p", req).digest != CacheKey::for_chat("q", req).digest);

  auto req2 = req;
  req2.user_prompt = "hello!";
  CHECK(CacheKey::for_chat("p", req).digest != CacheKey::for_chat("p", req2).digest);

  auto req3 = req;
  req3.temperature = 0.5;
  CHECK(CacheKey::for_chat("p", req).digest != CacheKey::for_chat("p", req3).digest);

  auto req4 = req;
  req4.system_prompt.reset();
  CHECK(CacheKey::for_chat("p", req).digest != CacheKey::for_chat("p", req4).digest);

  CHECK(CacheKey::for_embedding("p", "m", "a").digest !=
        CacheKey::for_embedding("p", "m", "b").digest);
}

TEST_CASE("sha256_hex matches a known vector") {
  // FIPS 180-2 test vector for "abc".
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("scripted mock answers and reports cached=false without a cache") {
  auto mock = std::make_shared<MockChatProvider>(std::vector<ScriptEntry>{
      {ScriptEntry::Kind::Substring, "aspects", "Aspect 1\nAspect 2"}});
  Gateway gw(mock, nullptr);
  auto resp = gw.complete(make_request("list the aspects please"));
  CHECK(resp.text == "Aspect 1\nAspect 2");
  CHECK_FALSE(resp.cached);
  CHECK(resp.provider_id == "mock");
}

TEST_CASE("digest matchers fire on the exact request") {
  auto req = make_request("digest me");
  std::string digest = CacheKey::for_chat("mock", req).digest;
  auto mock = std::make_shared<MockChatProvider>(std::vector<ScriptEntry>{
      {ScriptEntry::Kind::Digest, digest, "matched by digest"}});
  Gateway gw(mock, nullptr);
  CHECK(gw.complete(req).text == "matched by digest");
}

TEST_CASE("second identical request is served from the cache byte-identically") {
  TempDir tmp;
  auto provider = std::make_shared<CountingProvider>("the answer");
  Gateway gw(provider, nullptr, std::make_shared<ResponseCache>(tmp.path.string()));

  auto first = gw.complete(make_request("q"));
  auto second = gw.complete(make_request("q"));
  CHECK_FALSE(first.cached);
  CHECK(second.cached);
  CHECK(second.text == first.text);
  CHECK(provider->calls() == 1);
}

TEST_CASE("at most one cache write per key") {
  TempDir tmp;
  auto provider = std::make_shared<CountingProvider>("x");
  Gateway gw(provider, nullptr, std::make_shared<ResponseCache>(tmp.path.string()));
  for (int i = 0; i < 5; ++i) gw.complete(make_request("same"));
  std::size_t files = 0;
  for (auto& e : fs::directory_iterator(tmp.path)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
}

TEST_CASE("bypass_cache skips the read but not the provider") {
  TempDir tmp;
  auto provider = std::make_shared<CountingProvider>("fresh");
  Gateway gw(provider, nullptr, std::make_shared<ResponseCache>(tmp.path.string()));
  gw.complete(make_request("r"));
  auto req = make_request("r");
  req.bypass_cache = true;
  auto resp = gw.complete(req);
  CHECK_FALSE(resp.cached);
  CHECK(provider->calls() == 2);
}

TEST_CASE("transport errors are retried, config errors are not") {
  auto flaky = std::make_shared<CountingProvider>("recovered", 2, ErrorKind::Transport);
  Gateway gw(flaky, nullptr, nullptr, RetryPolicy{3, 1});
  CHECK(gw.complete(make_request("a")).text == "recovered");
  CHECK(flaky->calls() == 3);

  auto fatal = std::make_shared<CountingProvider>("never", 5, ErrorKind::Config);
  Gateway gw2(fatal, nullptr, nullptr, RetryPolicy{3, 1});
  CHECK_THROWS_AS(gw2.complete(make_request("b")), Error);
  CHECK(fatal->calls() == 1);
}

TEST_CASE("transport failure after max attempts surfaces as transport error") {
  auto dead = std::make_shared<CountingProvider>("never", 99, ErrorKind::Transport);
  Gateway gw(dead, nullptr, nullptr, RetryPolicy{3, 1});
  try {
    gw.complete(make_request("c"));
    FAIL("expected transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Transport);
  }
  CHECK(dead->calls() == 3);
}

TEST_CASE("empty completion is an error") {
  auto empty = std::make_shared<CountingProvider>("");
  Gateway gw(empty, nullptr);
  try {
    gw.complete(make_request("d"));
    FAIL("expected empty-response error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyResponse);
  }
}

TEST_CASE("unmatched mock request names the prompt tag") {
  auto mock = std::make_shared<MockChatProvider>(std::vector<ScriptEntry>{});
  Gateway gw(mock, nullptr);
  try {
    gw.complete(make_request("nothing matches", PromptTag::Paragraph));
    FAIL("expected scripted-gap error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ScriptedGap);
    CHECK(std::string(e.what()).find("paragraph") != std::string::npos);
  }
}

TEST_CASE("overlapping mock matchers are rejected at construction") {
  CHECK_THROWS_AS(MockChatProvider(std::vector<ScriptEntry>{
                      {ScriptEntry::Kind::Substring, "extract", "a"},
                      {ScriptEntry::Kind::Substring, "extract the aspects", "b"}}),
                  Error);
}

TEST_CASE("two matchers firing on one request is an error") {
  MockChatProvider mock({{ScriptEntry::Kind::Substring, "alpha", "a"},
                         {ScriptEntry::Kind::Substring, "beta", "b"}});
  CHECK_THROWS_AS(mock.complete(make_request("alpha and beta together")), Error);
}

TEST_CASE("add_sequence consumes responses in order, last one sticks") {
  MockChatProvider mock({});
  mock.add_sequence("score", {"first", "second"});
  auto req = make_request("score this");
  CHECK(mock.complete(req) == "first");
  CHECK(mock.complete(req) == "second");
  CHECK(mock.complete(req) == "second");
}

TEST_CASE("mock embeddings are deterministic unit vectors") {
  MockEmbeddingProvider emb(42, 16);
  auto a = emb.embed({"same text"});
  auto b = emb.embed({"same text", "other"});
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 2);
  CHECK(a[0] == b[0]);
  CHECK(a[0].size() == 16);
  CHECK(cosine(a[0], a[0]) == doctest::Approx(1.0));

  MockEmbeddingProvider other_seed(43, 16);
  CHECK(other_seed.embed({"same text"})[0] != a[0]);
}

TEST_CASE("gateway embed caches per text and preserves order") {
  auto emb = std::make_shared<MockEmbeddingProvider>(7, 8);
  Gateway gw(nullptr, emb);
  auto vecs = gw.embed({"a", "b"});
  REQUIRE(vecs.size() == 2);
  CHECK(vecs[0].values.size() == 8);
  CHECK(vecs[0].values != vecs[1].values);
  auto again = gw.embed({"b", "a"});
  CHECK(again[0].values == vecs[1].values);
  CHECK(again[1].values == vecs[0].values);
}

TEST_CASE("listener sees one ledger record per provider call") {
  auto mock = std::make_shared<MockChatProvider>(std::vector<ScriptEntry>{
      {ScriptEntry::Kind::Substring, "ping", "pong"}});
  auto emb = std::make_shared<MockEmbeddingProvider>(1, 4);
  Gateway gw(mock, emb);
  std::vector<CallRecord> records;
  gw.set_listener([&](const CallRecord& r) { records.push_back(r); });
  gw.complete(make_request("ping", PromptTag::Reorder));
  gw.embed({"x", "y"});
  REQUIRE(records.size() == 3);
  CHECK(records[0].kind == CallRecord::Kind::Chat);
  CHECK(records[0].tag == PromptTag::Reorder);
  CHECK(records[0].response_text == "pong");
  CHECK(records[1].kind == CallRecord::Kind::Embedding);
  CHECK(records[2].kind == CallRecord::Kind::Embedding);
}

TEST_CASE("concurrent identical requests deduplicate to one provider call") {
  auto slow = std::make_shared<SlowProvider>();
  Gateway gw(slow, nullptr);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int i = 0; i < 6; ++i)
    threads.emplace_back([&] {
      if (gw.complete(make_request("identical")).text == "slow answer") ++ok;
    });
  for (auto& t : threads) t.join();
  CHECK(ok == 6);
  CHECK(slow->calls_ == 1);
}

TEST_CASE("distinct scorer handles evaluate-tagged requests") {
  auto gen = std::make_shared<MockChatProvider>(
      std::vector<ScriptEntry>{{ScriptEntry::Kind::Substring, "req", "from generator"}},
      "gen");
  auto scorer = std::make_shared<MockChatProvider>(
      std::vector<ScriptEntry>{{ScriptEntry::Kind::Substring, "req", "from scorer"}},
      "scorer");
  Gateway gw(gen, nullptr);
  gw.set_scorer(scorer);
  CHECK(gw.complete(make_request("req", PromptTag::Paragraph)).text == "from generator");
  CHECK(gw.complete(make_request("req", PromptTag::Evaluate)).text == "from scorer");
}
