#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "threadsumm/composition.hpp"
#include "threadsumm/gateway.hpp"
#include "threadsumm/planning.hpp"
#include "threadsumm/thread_model.hpp"

namespace threadsumm {

nlohmann::json trace_to_json(const ToTTrace& trace);
nlohmann::json ordering_to_json(const Ordering& ordering);

// Accumulates everything a run produced: config snapshot, input, per-stage
// artifacts, warnings, and the provider-call ledger. Append-only while the
// run is live; save() can flush a partial manifest after a failure.
class RunManifest {
 public:
  RunManifest() = default;
  RunManifest(RunManifest&& other) noexcept { *this = std::move(other); }
  RunManifest& operator=(RunManifest&& other) noexcept {
    if (this == &other) return *this;
    run_id = std::move(other.run_id);
    created_at = std::move(other.created_at);
    config = std::move(other.config);
    input_fingerprint = std::move(other.input_fingerprint);
    input = std::move(other.input);
    splitter_id = std::move(other.splitter_id);
    aspects = std::move(other.aspects);
    acus = std::move(other.acus);
    trace = std::move(other.trace);
    summary = std::move(other.summary);
    vanilla_summary = std::move(other.vanilla_summary);
    warnings = std::move(other.warnings);
    ledger_ = std::move(other.ledger_);
    return *this;  // the mutex itself never moves
  }

  std::string run_id;
  std::string created_at;
  nlohmann::json config = nlohmann::json::object();
  std::string input_fingerprint;
  DocumentSet input;
  std::string splitter_id;

  std::vector<Aspect> aspects;
  std::vector<ACU> acus;
  ToTTrace trace;
  std::string summary;
  std::string vanilla_summary;
  std::vector<std::string> warnings;

  void record_call(const CallRecord& rec);
  const std::vector<CallRecord>& ledger() const { return ledger_; }

  nlohmann::json to_json() const;
  void save(const std::string& path) const;

  static RunManifest load(const std::string& path);

 private:
  std::vector<CallRecord> ledger_;
  mutable std::mutex mu_;
};

// Scripted providers reconstructed from a manifest ledger; replay performs
// zero network calls and fails loudly on any request the ledger never saw.
std::shared_ptr<ChatProvider> replay_chat_provider(const RunManifest& manifest,
                                                   const std::string& id_override = "");
std::shared_ptr<EmbeddingProvider> replay_embedding_provider(const RunManifest& manifest);

// ISO-8601 UTC; honors THREADSUMM_FAKE_TIME (epoch seconds) for
// reproducible runs.
std::string current_timestamp();

std::string make_run_id(const std::string& input_fingerprint);

}  // namespace threadsumm
