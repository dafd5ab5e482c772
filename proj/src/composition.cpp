#include "threadsumm/composition.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "threadsumm/error.hpp"
#include "threadsumm/prompts.hpp"

namespace threadsumm {

double combine_scores(double coherence, double coverage, const ToTConfig& cfg) {
  switch (cfg.combiner) {
    case ScoreCombiner::Mean: return (coherence + coverage) / 2.0;
    case ScoreCombiner::Min: return std::min(coherence, coverage);
    case ScoreCombiner::Max: return std::max(coherence, coverage);
    case ScoreCombiner::Weighted:
      return cfg.coherence_weight * coherence + (1.0 - cfg.coherence_weight) * coverage;
  }
  return (coherence + coverage) / 2.0;
}

namespace {

const ACU& acu_by_id(const std::vector<ACU>& acus, std::size_t id) {
  if (id < acus.size() && acus[id].id == id) return acus[id];
  for (const auto& a : acus)
    if (a.id == id) return a;
  throw Error(ErrorKind::Parameter, "unknown ACU id " + std::to_string(id));
}

std::string render_acus(const std::vector<ACU>& acus,
                        const std::vector<std::size_t>& order) {
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) out += " ";
    out += acu_by_id(acus, order[i]).text;
  }
  return out;
}

std::vector<std::size_t> identity_order(const std::vector<ACU>& acus) {
  std::vector<std::size_t> ids;
  for (const auto& a : acus) ids.push_back(a.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool is_permutation_of(const std::vector<std::size_t>& seq, const std::vector<ACU>& acus) {
  if (seq.size() != acus.size()) return false;
  std::set<std::size_t> want, got(seq.begin(), seq.end());
  for (const auto& a : acus) want.insert(a.id);
  return want == got;
}

}  // namespace

std::vector<std::vector<double>> acu_similarity_matrix(Gateway& gateway,
                                                       const std::vector<ACU>& acus) {
  std::vector<std::string> texts;
  for (const auto& a : acus) texts.push_back(a.text);
  auto vecs = gateway.embed(texts);
  std::size_t n = acus.size();
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sim[acus[i].id][acus[j].id] = cosine(vecs[i].values, vecs[j].values);
  return sim;
}

Ordering repair_ordering(const std::vector<ACU>& acus,
                         const std::vector<std::size_t>& partial,
                         const std::vector<std::vector<double>>& similarity) {
  std::set<std::size_t> valid;
  for (const auto& a : acus) valid.insert(a.id);

  std::vector<std::size_t> placed;
  std::set<std::size_t> used;
  for (auto id : partial) {
    if (!valid.count(id) || used.count(id)) continue;
    placed.push_back(id);
    used.insert(id);
  }

  std::vector<std::size_t> missing;
  for (auto id : valid)
    if (!used.count(id)) missing.push_back(id);
  std::sort(missing.begin(), missing.end());

  if (placed.empty() && !missing.empty()) {
    // Most-connected ACU first: maximal similarity row-sum, ties lowest id.
    std::size_t best = missing[0];
    double best_sum = -1.0;
    for (auto id : missing) {
      double sum = 0.0;
      for (auto other : missing)
        if (other != id) sum += similarity[id][other];
      if (sum > best_sum) {
        best_sum = sum;
        best = id;
      }
    }
    placed.push_back(best);
    missing.erase(std::find(missing.begin(), missing.end(), best));
  }

  while (!missing.empty()) {
    std::size_t last = placed.back();
    std::size_t best = missing[0];
    double best_sim = -2.0;
    for (auto id : missing) {
      double s = similarity[last][id];
      if (s > best_sim) {
        best_sim = s;
        best = id;
      }
    }
    placed.push_back(best);
    missing.erase(std::find(missing.begin(), missing.end(), best));
  }

  return {std::move(placed), OrderingProvenance::Repair};
}

Ordering propose_ordering(Gateway& gateway, const std::vector<ACU>& acus,
                          const std::optional<Ordering>& seed,
                          const CompositionOptions& opts,
                          std::vector<std::string>* warnings) {
  if (acus.empty())
    throw Error(ErrorKind::Parameter, "propose_ordering: no ACUs");
  if (acus.size() == 1)
    return {{acus[0].id}, OrderingProvenance::Initial};

  std::vector<std::size_t> base = seed ? seed->permutation : identity_order(acus);
  auto resp = gateway.complete(
      prompts::reorder_request(render_acus(acus, base), opts.model_id));

  // Map response sentences back to ACU ids: exact, then normalized, then
  // highest-cosine embedding above the threshold.
  std::map<std::string, std::size_t> exact, normalized;
  for (const auto& a : acus) {
    exact.emplace(a.text, a.id);
    normalized.emplace(normalize_acu(a.text), a.id);
  }

  auto sentences = split_sentences(resp.text);
  std::vector<std::size_t> recovered;
  std::vector<std::string> unmatched;
  std::vector<std::size_t> unmatched_pos;
  for (const auto& s : sentences) {
    auto it = exact.find(s);
    if (it == exact.end()) it = exact.find(trim(s));
    if (it != exact.end()) {
      recovered.push_back(it->second);
      continue;
    }
    auto nit = normalized.find(normalize_acu(s));
    if (nit != normalized.end()) {
      recovered.push_back(nit->second);
      continue;
    }
    unmatched_pos.push_back(recovered.size());
    recovered.push_back(static_cast<std::size_t>(-1));  // placeholder
    unmatched.push_back(s);
  }

  if (!unmatched.empty()) {
    std::vector<std::string> texts;
    for (const auto& a : acus) texts.push_back(a.text);
    auto acu_vecs = gateway.embed(texts);
    auto sent_vecs = gateway.embed(unmatched);
    for (std::size_t u = 0; u < unmatched.size(); ++u) {
      double best = -2.0;
      std::size_t best_id = 0;
      bool found = false;
      for (std::size_t i = 0; i < acus.size(); ++i) {
        double c = cosine(sent_vecs[u].values, acu_vecs[i].values);
        if (c > best) {
          best = c;
          best_id = acus[i].id;
          found = true;
        }
      }
      if (found && best >= opts.embed_match_threshold)
        recovered[unmatched_pos[u]] = best_id;
    }
  }

  std::vector<std::size_t> ids;
  for (auto id : recovered)
    if (id != static_cast<std::size_t>(-1)) ids.push_back(id);

  std::set<std::size_t> distinct(ids.begin(), ids.end());
  if (distinct.size() * 5 < acus.size() * 4) {  // < 80% of ACUs recovered
    if (warnings)
      warnings->push_back("ordering response matched only " +
                          std::to_string(distinct.size()) + "/" +
                          std::to_string(acus.size()) + " ACUs; repaired");
    return repair_ordering(acus, ids, acu_similarity_matrix(gateway, acus));
  }
  if (is_permutation_of(ids, acus))
    return {std::move(ids), OrderingProvenance::Llm};

  if (warnings)
    warnings->push_back("ordering response was not a valid permutation; repaired");
  return repair_ordering(acus, ids, acu_similarity_matrix(gateway, acus));
}

bool contains_list_markup(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string prev;
  bool saw_nonempty = false;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) {
      if (saw_nonempty) prev = "";
      continue;
    }
    if (saw_nonempty && prev.empty()) return true;  // blank-line paragraph break
    saw_nonempty = true;
    prev = t;
    if (t.rfind("- ", 0) == 0 || t.rfind("* ", 0) == 0 || t.rfind("•", 0) == 0)
      return true;
    std::size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')') && i <= 2 &&
        i + 1 < t.size() && t[i + 1] == ' ')
      return true;
  }
  return false;
}

std::string write_paragraph(Gateway& gateway, const Ordering& ordering,
                            const std::vector<ACU>& acus, const CompositionOptions& opts,
                            std::vector<std::string>* warnings) {
  std::string rendered = render_acus(acus, ordering.permutation);
  auto req = prompts::paragraph_request(rendered, opts.model_id);
  auto resp = gateway.complete(req);
  if (!contains_list_markup(resp.text)) return trim(resp.text);

  // One reprompt with an explicit reminder appended to the payload.
  auto retry = req;
  retry.user_prompt += "\n\nReminder: return one plain paragraph with no bullet "
                       "points, numbering, or blank lines.";
  auto second = gateway.complete(retry);
  if (contains_list_markup(second.text) && warnings)
    warnings->push_back("paragraph response still contains list markup after reprompt");
  return trim(second.text);
}

std::optional<ScorePair> parse_score_response(const std::string& response) {
  std::istringstream in(response);
  std::string tok1, tok2, extra;
  if (!(in >> tok1 >> tok2)) return std::nullopt;
  if (in >> extra) return std::nullopt;

  auto parse_real = [](const std::string& tok) -> std::optional<double> {
    std::size_t consumed = 0;
    try {
      double v = std::stod(tok, &consumed);
      if (consumed != tok.size()) return std::nullopt;
      if (!std::isfinite(v)) return std::nullopt;
      return v;
    } catch (...) {
      return std::nullopt;
    }
  };
  auto a = parse_real(tok1);
  auto b = parse_real(tok2);
  if (!a || !b) return std::nullopt;
  if (*a < 0.0 || *a > 1.0 || *b < 0.0 || *b > 1.0) return std::nullopt;
  return ScorePair{*a, *b};
}

std::optional<ScorePair> score_candidate(Gateway& gateway, const DocumentSet& source,
                                         const std::string& candidate,
                                         const CompositionOptions& opts,
                                         const ToTConfig& cfg,
                                         std::vector<std::string>* warnings) {
  if (candidate.empty())
    throw Error(ErrorKind::Parameter, "score_candidate: empty candidate");
  auto req = prompts::evaluate_request(join_documents(source), candidate, opts.model_id);
  for (int attempt = 0; attempt <= cfg.score_retry_limit; ++attempt) {
    auto r = req;
    r.bypass_cache = attempt > 0;  // a cached malformed answer would loop forever
    auto resp = gateway.complete(r);
    if (auto scores = parse_score_response(resp.text)) return scores;
    if (warnings)
      warnings->push_back("score attempt " + std::to_string(attempt + 1) +
                          " unparseable: '" + resp.text.substr(0, 60) + "'");
  }
  return std::nullopt;
}

ToTResult tot_search(Gateway& gateway, const DocumentSet& doc_set,
                     const std::vector<ACU>& acus, const ToTConfig& cfg,
                     const CompositionOptions& opts) {
  if (acus.empty()) throw Error(ErrorKind::Parameter, "tot_search: no ACUs");
  if (cfg.steps < 1 || cfg.reorder_proposals < 1 || cfg.paragraph_proposals < 1 ||
      cfg.score_retry_limit < 0)
    throw Error(ErrorKind::Parameter, "tot_search: invalid configuration");

  ToTResult result;
  std::optional<Ordering> carried;
  std::size_t next_id = 0;

  for (int step = 0; step < cfg.steps; ++step) {
    ToTStep st;
    for (int r = 0; r < cfg.reorder_proposals; ++r)
      st.orderings.push_back(
          propose_ordering(gateway, acus, carried, opts, &result.trace.warnings));

    for (std::size_t oi = 0; oi < st.orderings.size(); ++oi) {
      for (int p = 0; p < cfg.paragraph_proposals; ++p) {
        ParagraphCandidate cand;
        cand.ordering_ref = oi;
        cand.step = static_cast<std::size_t>(step);
        cand.id = next_id++;
        cand.text = write_paragraph(gateway, st.orderings[oi], acus, opts,
                                    &result.trace.warnings);
        auto scores =
            score_candidate(gateway, doc_set, cand.text, opts, cfg, &result.trace.warnings);
        if (scores) {
          cand.coherence = scores->coherence;
          cand.coverage = scores->coverage;
          cand.combined = combine_scores(cand.coherence, cand.coverage, cfg);
        } else {
          cand.discarded = true;
          cand.note = "scoring failed after retries";
        }
        st.candidates.push_back(std::move(cand));
      }
    }

    const ParagraphCandidate* winner = nullptr;
    for (const auto& c : st.candidates) {
      if (c.discarded) continue;
      if (!winner || c.combined > winner->combined) winner = &c;  // ties keep lowest id
    }
    if (!winner) {
      result.trace.steps.push_back(std::move(st));
      throw StepError("every candidate discarded in step " + std::to_string(step + 1),
                      std::move(result.trace));
    }
    st.selected = winner->id;
    carried = st.orderings[winner->ordering_ref];
    result.trace.steps.push_back(std::move(st));
  }

  // Final answer: best over the union of all steps; ties go to the earliest
  // generated candidate (ids are globally increasing).
  const ParagraphCandidate* best = nullptr;
  for (const auto& st : result.trace.steps)
    for (const auto& c : st.candidates) {
      if (c.discarded) continue;
      if (!best || c.combined > best->combined) best = &c;
    }
  result.trace.final_candidate_id = best->id;
  result.summary = best->text;
  return result;
}

std::string vanilla_summarize(Gateway& gateway, const DocumentSet& doc_set,
                              const std::string& model_id) {
  if (doc_set.documents.empty())
    throw Error(ErrorKind::EmptyInput, "vanilla_summarize: empty document set");
  auto resp = gateway.complete(prompts::vanilla_request(join_documents(doc_set), model_id));
  return resp.text;
}

}  // namespace threadsumm
