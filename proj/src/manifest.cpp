#include "threadsumm/manifest.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "threadsumm/error.hpp"

namespace threadsumm {

using nlohmann::json;

nlohmann::json ordering_to_json(const Ordering& ordering) {
  json j;
  j["permutation"] = ordering.permutation;
  switch (ordering.provenance) {
    case OrderingProvenance::Llm: j["provenance"] = "llm"; break;
    case OrderingProvenance::Repair: j["provenance"] = "repair"; break;
    case OrderingProvenance::Initial: j["provenance"] = "initial"; break;
  }
  return j;
}

static Ordering ordering_from_json(const json& j) {
  Ordering o;
  o.permutation = j.at("permutation").get<std::vector<std::size_t>>();
  std::string p = j.at("provenance").get<std::string>();
  o.provenance = p == "llm" ? OrderingProvenance::Llm
               : p == "repair" ? OrderingProvenance::Repair
                               : OrderingProvenance::Initial;
  return o;
}

nlohmann::json trace_to_json(const ToTTrace& trace) {
  json j;
  j["steps"] = json::array();
  for (const auto& st : trace.steps) {
    json js;
    js["orderings"] = json::array();
    for (const auto& o : st.orderings) js["orderings"].push_back(ordering_to_json(o));
    js["candidates"] = json::array();
    for (const auto& c : st.candidates) {
      json jc;
      jc["id"] = c.id;
      jc["text"] = c.text;
      jc["ordering_ref"] = c.ordering_ref;
      jc["coherence"] = c.coherence;
      jc["coverage"] = c.coverage;
      jc["combined"] = c.combined;
      jc["step"] = c.step;
      if (c.discarded) {
        jc["discarded"] = true;
        jc["note"] = c.note;
      }
      js["candidates"].push_back(std::move(jc));
    }
    if (st.selected) js["selected"] = *st.selected;
    j["steps"].push_back(std::move(js));
  }
  j["final_candidate_id"] = trace.final_candidate_id;
  j["warnings"] = trace.warnings;
  return j;
}

static ToTTrace trace_from_json(const json& j) {
  ToTTrace t;
  for (const auto& js : j.at("steps")) {
    ToTStep st;
    for (const auto& jo : js.at("orderings")) st.orderings.push_back(ordering_from_json(jo));
    for (const auto& jc : js.at("candidates")) {
      ParagraphCandidate c;
      c.id = jc.at("id").get<std::size_t>();
      c.text = jc.at("text").get<std::string>();
      c.ordering_ref = jc.at("ordering_ref").get<std::size_t>();
      c.coherence = jc.at("coherence").get<double>();
      c.coverage = jc.at("coverage").get<double>();
      c.combined = jc.at("combined").get<double>();
      c.step = jc.at("step").get<std::size_t>();
      if (jc.contains("discarded")) {
        c.discarded = true;
        c.note = jc.value("note", "");
      }
      st.candidates.push_back(std::move(c));
    }
    if (js.contains("selected")) st.selected = js["selected"].get<std::size_t>();
    t.steps.push_back(std::move(st));
  }
  t.final_candidate_id = j.at("final_candidate_id").get<std::size_t>();
  t.warnings = j.value("warnings", std::vector<std::string>{});
  return t;
}

void RunManifest::record_call(const CallRecord& rec) {
  std::lock_guard<std::mutex> lock(mu_);
  ledger_.push_back(rec);
  // Under a pinned clock the whole manifest must be byte-reproducible.
  if (std::getenv("THREADSUMM_FAKE_TIME")) ledger_.back().latency_ms = 0;
}

json RunManifest::to_json() const {
  std::lock_guard<std::mutex> lock(mu_);
  json j;
  j["run_id"] = run_id;
  j["created_at"] = created_at;
  j["config"] = config;
  j["input"] = {
      {"fingerprint", input_fingerprint},
      {"documents", input.documents},
      {"origin", input.origin == DocOrigin::Tree ? "tree" : "flat"},
  };
  j["splitter_id"] = splitter_id;
  j["artifacts"] = json::object();
  j["artifacts"]["aspects"] = json::array();
  for (const auto& a : aspects)
    j["artifacts"]["aspects"].push_back({{"label", a.label}, {"index", a.index}});
  j["artifacts"]["acus"] = json::array();
  for (const auto& a : acus)
    j["artifacts"]["acus"].push_back(
        {{"text", a.text}, {"aspect_index", a.aspect_index}, {"id", a.id}});
  j["artifacts"]["trace"] = trace_to_json(trace);
  j["artifacts"]["summary"] = summary;
  if (!vanilla_summary.empty()) j["artifacts"]["vanilla_summary"] = vanilla_summary;
  j["warnings"] = warnings;
  j["ledger"] = json::array();
  for (const auto& rec : ledger_) {
    json jr;
    jr["kind"] = rec.kind == CallRecord::Kind::Chat ? "chat" : "embedding";
    if (rec.kind == CallRecord::Kind::Chat) {
      jr["tag"] = to_string(rec.tag);
      jr["approx_tokens"] = rec.approx_tokens;
      jr["temperature"] = rec.temperature;
    }
    jr["cache_key"] = rec.cache_key;
    jr["cached"] = rec.cached;
    jr["latency_ms"] = rec.latency_ms;
    jr["provider_id"] = rec.provider_id;
    jr["model_id"] = rec.model_id;
    jr["response_text"] = rec.response_text;
    j["ledger"].push_back(std::move(jr));
  }
  return j;
}

void RunManifest::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest to " + path);
  out << to_json().dump(2) << "\n";
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read manifest " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("malformed manifest: ") + e.what());
  }
  RunManifest m;
  m.run_id = j.value("run_id", "");
  m.created_at = j.value("created_at", "");
  m.config = j.value("config", json::object());
  m.input_fingerprint = j.at("input").value("fingerprint", "");
  m.input.documents = j.at("input").at("documents").get<std::vector<std::string>>();
  m.input.origin =
      j.at("input").value("origin", "flat") == "tree" ? DocOrigin::Tree : DocOrigin::Flat;
  m.splitter_id = j.value("splitter_id", "");
  if (j.contains("artifacts")) {
    const auto& a = j["artifacts"];
    for (const auto& ja : a.value("aspects", json::array()))
      m.aspects.push_back(
          {ja.at("label").get<std::string>(), ja.at("index").get<std::size_t>()});
    for (const auto& ja : a.value("acus", json::array()))
      m.acus.push_back({ja.at("text").get<std::string>(),
                        ja.at("aspect_index").get<std::size_t>(),
                        ja.at("id").get<std::size_t>()});
    if (a.contains("trace") && a["trace"].contains("steps"))
      m.trace = trace_from_json(a["trace"]);
    m.summary = a.value("summary", "");
    m.vanilla_summary = a.value("vanilla_summary", "");
  }
  m.warnings = j.value("warnings", std::vector<std::string>{});
  for (const auto& jr : j.value("ledger", json::array())) {
    CallRecord rec;
    rec.kind = jr.value("kind", "chat") == "chat" ? CallRecord::Kind::Chat
                                                  : CallRecord::Kind::Embedding;
    if (rec.kind == CallRecord::Kind::Chat) {
      std::string tag = jr.value("tag", "vanilla");
      rec.tag = tag == "aspect"          ? PromptTag::Aspect
                : tag == "acu"           ? PromptTag::Acu
                : tag == "reorder"       ? PromptTag::Reorder
                : tag == "paragraph"     ? PromptTag::Paragraph
                : tag == "evaluate"      ? PromptTag::Evaluate
                : tag == "aspect_metric" ? PromptTag::AspectMetric
                                         : PromptTag::Vanilla;
      rec.approx_tokens = jr.value("approx_tokens", std::size_t{0});
      rec.temperature = jr.value("temperature", 0.0);
    }
    rec.cache_key = jr.value("cache_key", "");
    rec.cached = jr.value("cached", false);
    rec.latency_ms = jr.value("latency_ms", std::int64_t{0});
    rec.provider_id = jr.value("provider_id", "");
    rec.model_id = jr.value("model_id", "");
    rec.response_text = jr.value("response_text", "");
    m.ledger_.push_back(std::move(rec));
  }
  return m;
}

namespace {

class ReplayChatProvider : public ChatProvider {
 public:
  ReplayChatProvider(std::map<std::string, std::string> by_digest,
                     std::set<std::string> provider_ids, std::string reported_id)
      : by_digest_(std::move(by_digest)),
        provider_ids_(std::move(provider_ids)),
        reported_id_(std::move(reported_id)) {}

  // Reports the original provider id so a replayed run writes the same
  // digests and ledger fields as the run it replays.
  std::string id() const override { return reported_id_; }

  std::string complete(const ChatRequest& req) override {
    for (const auto& pid : provider_ids_) {
      auto digest = CacheKey::for_chat(pid, req).digest;
      auto it = by_digest_.find(digest);
      if (it != by_digest_.end()) return it->second;
    }
    throw Error(ErrorKind::ScriptedGap,
                std::string("replay ledger has no response for tag ") + to_string(req.tag));
  }

 private:
  std::map<std::string, std::string> by_digest_;
  std::set<std::string> provider_ids_;
  std::string reported_id_;
};

class ReplayEmbeddingProvider : public EmbeddingProvider {
 public:
  ReplayEmbeddingProvider(std::map<std::string, std::vector<double>> by_digest,
                          std::set<std::pair<std::string, std::string>> sources)
      : by_digest_(std::move(by_digest)), sources_(std::move(sources)) {}

  std::string id() const override {
    return sources_.empty() ? "replay-embed" : sources_.begin()->first;
  }
  std::string model_id() const override {
    return sources_.empty() ? "replay" : sources_.begin()->second;
  }

  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
    std::vector<std::vector<double>> out;
    for (const auto& t : texts) {
      bool found = false;
      for (const auto& [pid, mid] : sources_) {
        auto digest = CacheKey::for_embedding(pid, mid, t).digest;
        auto it = by_digest_.find(digest);
        if (it != by_digest_.end()) {
          out.push_back(it->second);
          found = true;
          break;
        }
      }
      if (!found)
        throw Error(ErrorKind::ScriptedGap,
                    "replay ledger has no embedding for text '" + t.substr(0, 40) + "'");
    }
    return out;
  }

 private:
  std::map<std::string, std::vector<double>> by_digest_;
  std::set<std::pair<std::string, std::string>> sources_;
};

}  // namespace

std::shared_ptr<ChatProvider> replay_chat_provider(const RunManifest& manifest,
                                                   const std::string& id_override) {
  std::map<std::string, std::string> by_digest;
  std::set<std::string> pids;
  for (const auto& rec : manifest.ledger()) {
    if (rec.kind != CallRecord::Kind::Chat) continue;
    by_digest.emplace(rec.cache_key, rec.response_text);
    pids.insert(rec.provider_id);
  }
  std::string reported = id_override;
  if (reported.empty()) reported = pids.empty() ? "replay" : *pids.begin();
  return std::make_shared<ReplayChatProvider>(std::move(by_digest), std::move(pids),
                                              std::move(reported));
}

std::shared_ptr<EmbeddingProvider> replay_embedding_provider(const RunManifest& manifest) {
  std::map<std::string, std::vector<double>> by_digest;
  std::set<std::pair<std::string, std::string>> sources;
  for (const auto& rec : manifest.ledger()) {
    if (rec.kind != CallRecord::Kind::Embedding) continue;
    by_digest.emplace(rec.cache_key,
                      json::parse(rec.response_text).get<std::vector<double>>());
    sources.insert({rec.provider_id, rec.model_id});
  }
  return std::make_shared<ReplayEmbeddingProvider>(std::move(by_digest), std::move(sources));
}

std::string current_timestamp() {
  std::time_t t;
  if (const char* fake = std::getenv("THREADSUMM_FAKE_TIME"); fake && *fake) {
    t = static_cast<std::time_t>(std::strtoll(fake, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string make_run_id(const std::string& input_fingerprint) {
  std::string ts = current_timestamp();
  std::string compact;
  for (char c : ts)
    if (std::isalnum(static_cast<unsigned char>(c))) compact.push_back(c);
  return compact + "-" + input_fingerprint.substr(0, 8);
}

}  // namespace threadsumm
