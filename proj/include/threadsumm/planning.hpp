#pragma once

#include <string>
#include <vector>

#include "threadsumm/gateway.hpp"
#include "threadsumm/thread_model.hpp"

namespace threadsumm {

struct Aspect {
  std::string label;
  std::size_t index = 0;  // extraction order
};

struct ACU {
  std::string text;
  std::size_t aspect_index = 0;
  std::size_t id = 0;  // contiguous after deduplication
};

struct PlanningResult {
  std::vector<Aspect> aspects;
  std::vector<ACU> acus;
};

struct PlanningOptions {
  std::string model_id;
  bool embedding_dedup = false;       // near-duplicate removal, off by default
  double embedding_dedup_threshold = 0.95;
};

// Parses a newline/bullet-delimited list response. Accepts "-", "*", the
// bullet glyph, "1.", "1)" and bare lines; when list markers are present,
// unmarked preamble lines are dropped.
std::vector<std::string> parse_list_response(const std::string& response);

// Trim + collapse internal whitespace.
std::string normalize_label(const std::string& label);

// Case-fold, trim, strip terminal punctuation; the dedup equivalence key.
std::string normalize_acu(const std::string& text);

std::vector<Aspect> extract_aspects(Gateway& gateway, const DocumentSet& doc_set,
                                    const PlanningOptions& opts);

std::vector<ACU> generate_acus(Gateway& gateway, const DocumentSet& doc_set,
                               const Aspect& aspect, const PlanningOptions& opts);

std::vector<ACU> deduplicate(std::vector<ACU> acus);

// Full planning stage: aspects, per-aspect ACUs, deduplication. Appends a
// warning string per empty aspect and when r < n.
PlanningResult plan(Gateway& gateway, const DocumentSet& doc_set,
                    const PlanningOptions& opts, std::vector<std::string>* warnings);

std::string join_documents(const DocumentSet& doc_set);

}  // namespace threadsumm
