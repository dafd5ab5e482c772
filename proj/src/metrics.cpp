#include "threadsumm/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

#include "threadsumm/error.hpp"
#include "threadsumm/planning.hpp"
#include "threadsumm/prompts.hpp"

namespace threadsumm {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

UnigramBag unigram_bag(const std::string& text) {
  UnigramBag bag;
  for (const auto& t : tokenize(text)) {
    ++bag.counts[t];
    ++bag.token_count;
  }
  return bag;
}

double rouge1_recall(const std::string& candidate, const std::string& reference) {
  UnigramBag ref = unigram_bag(reference);
  if (ref.token_count == 0)
    throw Error(ErrorKind::Metric, "rouge1_recall: empty reference after tokenization");
  UnigramBag cand = unigram_bag(candidate);
  std::size_t overlap = 0;
  for (const auto& [token, ref_count] : ref.counts) {
    auto it = cand.counts.find(token);
    if (it != cand.counts.end()) overlap += std::min(it->second, ref_count);
  }
  return static_cast<double>(overlap) / static_cast<double>(ref.token_count);
}

double rouge1_recall_docasref(const std::string& candidate, const DocumentSet& source) {
  if (source.documents.empty())
    throw Error(ErrorKind::Metric, "rouge1_recall_docasref: empty source");
  return rouge1_recall(candidate, join_documents(source));
}

namespace {

std::vector<std::string> extract_metric_aspects(Gateway& gateway, const std::string& text,
                                                const std::string& model_id) {
  auto resp = gateway.complete(prompts::aspect_metric_request(text, model_id));
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& raw : parse_list_response(resp.text)) {
    std::string label = normalize_label(raw);
    if (label.empty()) continue;
    std::string key;
    for (unsigned char c : label) key.push_back(static_cast<char>(std::tolower(c)));
    if (seen.insert(key).second) out.push_back(label);
  }
  return out;
}

std::string fold(const std::string& s) {
  std::string out;
  for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

bool fuzzy_match(const std::string& a, const std::string& b) {
  auto ta = tokenize(a);
  auto tb = tokenize(b);
  if (ta.empty() || tb.empty()) return false;
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  std::size_t inter = 0;
  for (const auto& t : sa)
    if (sb.count(t)) ++inter;
  return static_cast<double>(inter) / std::max(sa.size(), sb.size()) >= 0.5;
}

}  // namespace

AspectOverlapReport aspect_overlap(Gateway& gateway, const DocumentSet& source,
                                   const std::string& summary,
                                   const AspectOverlapOptions& opts) {
  AspectOverlapReport report;
  report.source_aspects =
      extract_metric_aspects(gateway, join_documents(source), opts.model_id);
  if (report.source_aspects.empty())
    throw Error(ErrorKind::Metric, "aspect_overlap: zero source aspects");
  report.summary_aspects = extract_metric_aspects(gateway, summary, opts.model_id);

  std::set<std::string> summary_keys;
  for (const auto& a : report.summary_aspects) summary_keys.insert(fold(normalize_label(a)));

  for (const auto& a : report.source_aspects) {
    bool hit = summary_keys.count(fold(normalize_label(a))) > 0;
    if (!hit && opts.fuzzy)
      for (const auto& b : report.summary_aspects)
        if (fuzzy_match(a, b)) {
          hit = true;
          break;
        }
    if (hit) report.common.push_back(a);
  }
  report.score = static_cast<double>(report.common.size()) /
                 static_cast<double>(report.source_aspects.size());
  return report;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

}  // namespace

OpinionClustering kmeans(const std::vector<std::vector<double>>& vectors,
                         std::size_t k, std::uint64_t seed) {
  const std::size_t n = vectors.size();
  if (k == 0 || k > n)
    throw Error(ErrorKind::Parameter,
                "kmeans: k=" + std::to_string(k) + " with n=" + std::to_string(n));

  OpinionClustering result;
  result.k = k;
  result.seed = seed;

  // Seeded first center, then farthest-point for the rest.
  std::uint64_t state = seed ^ 0x6a09e667f3bcc908ULL;
  std::vector<std::vector<double>> centers;
  centers.push_back(vectors[splitmix64(state) % n]);
  while (centers.size() < k) {
    std::size_t far_idx = 0;
    double far_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double nearest = std::numeric_limits<double>::max();
      for (const auto& c : centers) nearest = std::min(nearest, sqdist(vectors[i], c));
      if (nearest > far_dist) {
        far_dist = nearest;
        far_idx = i;
      }
    }
    centers.push_back(vectors[far_idx]);
  }

  std::vector<std::size_t> assign(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (std::size_t c = 0; c < k; ++c) {
        double d = sqdist(vectors[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(vectors[0].size(), 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (std::size_t d = 0; d < vectors[i].size(); ++d)
        sums[assign[i]][d] += vectors[i][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Reseed to the point farthest from its current center.
        std::size_t far_idx = 0;
        double far_dist = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          double d = sqdist(vectors[i], centers[assign[i]]);
          if (d > far_dist) {
            far_dist = d;
            far_idx = i;
          }
        }
        centers[c] = vectors[far_idx];
        continue;
      }
      for (std::size_t d = 0; d < sums[c].size(); ++d)
        centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
  }

  result.assignments = std::move(assign);
  result.centroids = std::move(centers);
  return result;
}

double opinion_coverage(Gateway& gateway, const std::vector<SentenceUnit>& source_sentences,
                        const std::vector<std::string>& summary_sentences,
                        const OpinionCoverageOptions& opts,
                        std::vector<std::string>* warnings) {
  if (source_sentences.empty())
    throw Error(ErrorKind::Parameter, "opinion_coverage: no source sentences");
  std::size_t k = opts.k;
  if (source_sentences.size() < k) {
    k = source_sentences.size();
    if (warnings)
      warnings->push_back("opinion_coverage: k lowered to " + std::to_string(k) +
                          " (fewer source sentences than clusters)");
  }
  if (summary_sentences.empty()) return 0.0;

  std::vector<std::string> src_texts;
  for (const auto& s : source_sentences) src_texts.push_back(s.text);
  auto src_vecs = gateway.embed(src_texts);
  auto sum_vecs = gateway.embed(summary_sentences);

  std::vector<std::vector<double>> points;
  for (const auto& v : src_vecs) points.push_back(v.values);
  auto clustering = kmeans(points, k, opts.seed);

  // Member-wise comparison: a cluster is covered when some summary sentence
  // aligns with some source sentence inside it above the threshold.
  std::vector<bool> covered(k, false);
  for (std::size_t i = 0; i < src_vecs.size(); ++i) {
    if (covered[clustering.assignments[i]]) continue;
    for (const auto& sv : sum_vecs) {
      if (cosine(sv.values, src_vecs[i].values) >= opts.threshold) {
        covered[clustering.assignments[i]] = true;
        break;
      }
    }
  }
  std::size_t n_covered = 0;
  for (bool c : covered)
    if (c) ++n_covered;
  return static_cast<double>(n_covered) / static_cast<double>(k);
}

PositionReport position_representation_from_similarities(
    const std::vector<std::size_t>& global_indices,
    const std::vector<double>& max_similarities, double quantile_cutoff) {
  const std::size_t n = max_similarities.size();
  if (n == 0)
    throw Error(ErrorKind::Parameter, "position_representation: no source sentences");

  // Temperature-1 softmax over the per-sentence maxima.
  double max_val = *std::max_element(max_similarities.begin(), max_similarities.end());
  std::vector<double> soft(n);
  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    soft[i] = std::exp(max_similarities[i] - max_val);
    denom += soft[i];
  }
  for (auto& s : soft) s /= denom;

  // Rank quantile transform: fraction of weights <= this weight.
  std::vector<double> sorted = soft;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> quantile(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto upper = std::upper_bound(sorted.begin(), sorted.end(), soft[i]);
    quantile[i] = static_cast<double>(upper - sorted.begin()) / static_cast<double>(n);
  }

  // Dynamic threshold: the cutoff quantile of the transformed scores.
  std::vector<double> qsorted = quantile;
  std::sort(qsorted.begin(), qsorted.end());
  std::size_t cut = static_cast<std::size_t>(
      std::ceil(quantile_cutoff * static_cast<double>(n)));
  cut = std::min(cut, n - 1);
  double threshold = qsorted[cut];

  PositionReport report;
  report.threshold_used = threshold;
  for (std::size_t i = 0; i < n; ++i) {
    SentencePosition sp;
    sp.global_index = global_indices[i];
    sp.max_similarity = max_similarities[i];
    sp.softmax_weight = soft[i];
    sp.quantile_score = quantile[i];
    sp.represented = quantile[i] >= threshold;
    if (!sp.represented) report.not_represented_indices.push_back(sp.global_index);
    report.sentences.push_back(sp);
  }
  std::sort(report.not_represented_indices.begin(), report.not_represented_indices.end());
  return report;
}

PositionReport position_representation(Gateway& gateway,
                                       const std::vector<SentenceUnit>& source_sentences,
                                       const std::vector<std::string>& summary_sentences,
                                       double quantile_cutoff) {
  if (source_sentences.empty() || summary_sentences.empty())
    throw Error(ErrorKind::Parameter,
                "position_representation: both sentence lists must be non-empty");
  std::vector<std::string> src_texts;
  std::vector<std::size_t> indices;
  for (const auto& s : source_sentences) {
    src_texts.push_back(s.text);
    indices.push_back(s.global_index);
  }
  auto src_vecs = gateway.embed(src_texts);
  auto sum_vecs = gateway.embed(summary_sentences);

  std::vector<double> maxima(src_vecs.size(), -1.0);
  for (std::size_t i = 0; i < src_vecs.size(); ++i)
    for (const auto& sv : sum_vecs)
      maxima[i] = std::max(maxima[i], cosine(src_vecs[i].values, sv.values));

  return position_representation_from_similarities(indices, maxima, quantile_cutoff);
}

LengthStats length_stats(const std::string& summary) {
  LengthStats stats;
  std::string word;
  for (char c : summary + " ") {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!word.empty()) {
        ++stats.word_count;
        word.clear();
      }
    } else {
      word.push_back(c);
    }
  }
  stats.sentence_count = split_sentences(summary).size();
  return stats;
}

}  // namespace threadsumm
