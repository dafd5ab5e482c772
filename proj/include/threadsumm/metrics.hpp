#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "threadsumm/gateway.hpp"
#include "threadsumm/thread_model.hpp"

namespace threadsumm {

struct UnigramBag {
  std::map<std::string, std::size_t> counts;
  std::size_t token_count = 0;
};

// Lowercase, split on non-alphanumeric.
std::vector<std::string> tokenize(const std::string& text);

UnigramBag unigram_bag(const std::string& text);

// Sum over tokens of min(candidate count, reference count) / |reference|.
double rouge1_recall(const std::string& candidate, const std::string& reference);

// Reference-free variant: the concatenated source is the reference.
double rouge1_recall_docasref(const std::string& candidate, const DocumentSet& source);

struct AspectOverlapReport {
  std::vector<std::string> source_aspects;
  std::vector<std::string> summary_aspects;
  std::vector<std::string> common;
  double score = 0.0;
};

struct AspectOverlapOptions {
  std::string model_id;
  bool fuzzy = false;            // token-overlap >= 0.5 instead of exact equality
};

AspectOverlapReport aspect_overlap(Gateway& gateway, const DocumentSet& source,
                                   const std::string& summary,
                                   const AspectOverlapOptions& opts);

struct OpinionClustering {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;
  std::vector<std::vector<double>> centroids;
  std::uint64_t seed = 0;
};

// Lloyd iterations with seeded farthest-point initialization; empty clusters
// are reseeded to the farthest point. Deterministic given the seed.
OpinionClustering kmeans(const std::vector<std::vector<double>>& vectors,
                         std::size_t k, std::uint64_t seed);

struct OpinionCoverageOptions {
  std::size_t k = 5;
  double threshold = 0.6;
  std::uint64_t seed = 0;
};

double opinion_coverage(Gateway& gateway, const std::vector<SentenceUnit>& source_sentences,
                        const std::vector<std::string>& summary_sentences,
                        const OpinionCoverageOptions& opts,
                        std::vector<std::string>* warnings = nullptr);

struct SentencePosition {
  std::size_t global_index = 0;
  double max_similarity = 0.0;
  double softmax_weight = 0.0;
  double quantile_score = 0.0;
  bool represented = false;
};

struct PositionReport {
  std::vector<SentencePosition> sentences;
  double threshold_used = 0.0;
  std::vector<std::size_t> not_represented_indices;
};

// Max-cosine per source sentence, temperature-1 softmax, rank quantile
// transform, dynamic threshold at the cutoff quantile.
PositionReport position_representation(Gateway& gateway,
                                       const std::vector<SentenceUnit>& source_sentences,
                                       const std::vector<std::string>& summary_sentences,
                                       double quantile_cutoff = 0.10);

// Pure core used by the gateway-facing overload and by oracle tests.
PositionReport position_representation_from_similarities(
    const std::vector<std::size_t>& global_indices,
    const std::vector<double>& max_similarities, double quantile_cutoff);

struct LengthStats {
  std::size_t word_count = 0;
  std::size_t sentence_count = 0;
};

LengthStats length_stats(const std::string& summary);

}  // namespace threadsumm
