#pragma once

#include <optional>
#include <string>
#include <vector>

#include "threadsumm/error.hpp"
#include "threadsumm/gateway.hpp"
#include "threadsumm/planning.hpp"
#include "threadsumm/thread_model.hpp"

namespace threadsumm {

enum class OrderingProvenance { Llm, Repair, Initial };

struct Ordering {
  std::vector<std::size_t> permutation;  // ACU ids, bijective over the id set
  OrderingProvenance provenance = OrderingProvenance::Initial;
};

struct ParagraphCandidate {
  std::string text;
  std::size_t ordering_ref = 0;
  double coherence = 0.0;
  double coverage = 0.0;
  double combined = 0.0;
  std::size_t step = 0;
  std::size_t id = 0;  // generation order within the whole search
  bool discarded = false;
  std::string note;
};

enum class ScoreCombiner { Mean, Min, Max, Weighted };

struct ToTConfig {
  int steps = 3;
  int reorder_proposals = 1;
  int paragraph_proposals = 2;
  int score_retry_limit = 2;
  ScoreCombiner combiner = ScoreCombiner::Mean;
  double coherence_weight = 0.5;  // Weighted combiner only
};

double combine_scores(double coherence, double coverage, const ToTConfig& cfg);

struct ToTStep {
  std::vector<Ordering> orderings;
  std::vector<ParagraphCandidate> candidates;
  std::optional<std::size_t> selected;  // candidate id
};

struct ToTTrace {
  std::vector<ToTStep> steps;
  std::size_t final_candidate_id = 0;
  std::vector<std::string> warnings;
};

struct CompositionOptions {
  std::string model_id;
  double embed_match_threshold = 0.85;  // ACU recovery fallback
};

// Renders ACUs (seed order if given, else id order) as continuous text,
// asks the model to reorder, and maps the response back to ACU ids.
// Falls back to repair_ordering when the response is unusable.
Ordering propose_ordering(Gateway& gateway, const std::vector<ACU>& acus,
                          const std::optional<Ordering>& seed,
                          const CompositionOptions& opts,
                          std::vector<std::string>* warnings = nullptr);

// Keeps the first occurrence of each valid id in `partial`, then appends
// missing ids greedily by similarity to the last placed one (ties: lowest
// id). An empty partial starts from the id with maximal similarity row-sum.
Ordering repair_ordering(const std::vector<ACU>& acus,
                         const std::vector<std::size_t>& partial,
                         const std::vector<std::vector<double>>& similarity);

std::vector<std::vector<double>> acu_similarity_matrix(Gateway& gateway,
                                                       const std::vector<ACU>& acus);

std::string write_paragraph(Gateway& gateway, const Ordering& ordering,
                            const std::vector<ACU>& acus, const CompositionOptions& opts,
                            std::vector<std::string>* warnings = nullptr);

struct ScorePair {
  double coherence;
  double coverage;
};

// Parses the two-score response; nullopt on malformed/out-of-range.
std::optional<ScorePair> parse_score_response(const std::string& response);

// Scores a candidate, retrying malformed responses up to the limit.
// nullopt means the candidate is discarded from the step.
std::optional<ScorePair> score_candidate(Gateway& gateway, const DocumentSet& source,
                                         const std::string& candidate,
                                         const CompositionOptions& opts,
                                         const ToTConfig& cfg,
                                         std::vector<std::string>* warnings = nullptr);

struct ToTResult {
  std::string summary;
  ToTTrace trace;
};

// Raised when every candidate in a step is discarded; carries the trace
// accumulated so far so the runner can flush a partial manifest.
class StepError : public Error {
 public:
  StepError(std::string message, ToTTrace trace)
      : Error(ErrorKind::Step, std::move(message)), trace_(std::move(trace)) {}
  const ToTTrace& trace() const { return trace_; }

 private:
  ToTTrace trace_;
};

ToTResult tot_search(Gateway& gateway, const DocumentSet& doc_set,
                     const std::vector<ACU>& acus, const ToTConfig& cfg,
                     const CompositionOptions& opts);

std::string vanilla_summarize(Gateway& gateway, const DocumentSet& doc_set,
                              const std::string& model_id);

bool contains_list_markup(const std::string& text);

}  // namespace threadsumm
