#include "threadsumm/planning.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "threadsumm/error.hpp"
#include "threadsumm/prompts.hpp"

namespace threadsumm {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Strips a leading bullet or numbering marker; reports whether one was found.
bool strip_marker(std::string& line) {
  std::string t = trim(line);
  if (t.empty()) return false;
  static const char* kBullets[] = {"- ", "* ", "• ", "•"};
  for (const char* b : kBullets) {
    if (t.rfind(b, 0) == 0) {
      line = trim(t.substr(std::string(b).size()));
      return true;
    }
  }
  std::size_t i = 0;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
  if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) {
    line = trim(t.substr(i + 1));
    return true;
  }
  line = t;
  return false;
}

}  // namespace

std::vector<std::string> parse_list_response(const std::string& response) {
  struct Item {
    std::string text;
    bool marked;
  };
  std::vector<Item> items;
  std::istringstream in(response);
  std::string line;
  bool any_marked = false;
  while (std::getline(in, line)) {
    std::string text = line;
    bool marked = strip_marker(text);
    if (text.empty()) continue;
    any_marked |= marked;
    items.push_back({text, marked});
  }
  std::vector<std::string> out;
  for (const auto& it : items)
    if (!any_marked || it.marked) out.push_back(it.text);
  return out;
}

std::string normalize_label(const std::string& label) {
  std::string out;
  bool in_space = false;
  for (char c : trim(label)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

std::string normalize_acu(const std::string& text) {
  std::string t = to_lower(normalize_label(text));
  while (!t.empty() && (t.back() == '.' || t.back() == '!' || t.back() == '?' ||
                        t.back() == ',' || t.back() == ';'))
    t.pop_back();
  return trim(t);
}

std::string join_documents(const DocumentSet& doc_set) {
  std::string out;
  for (std::size_t i = 0; i < doc_set.documents.size(); ++i) {
    if (i) out += "\n\n";
    out += doc_set.documents[i];
  }
  return out;
}

std::vector<Aspect> extract_aspects(Gateway& gateway, const DocumentSet& doc_set,
                                    const PlanningOptions& opts) {
  if (doc_set.documents.empty())
    throw Error(ErrorKind::EmptyInput, "extract_aspects: empty document set");
  auto resp = gateway.complete(
      prompts::aspect_request(join_documents(doc_set), opts.model_id));
  auto lines = parse_list_response(resp.text);

  std::vector<Aspect> aspects;
  std::map<std::string, bool> seen;
  for (const auto& raw : lines) {
    std::string label = normalize_label(raw);
    if (label.empty()) continue;
    std::string key = to_lower(label);
    if (seen.count(key)) continue;
    seen[key] = true;
    aspects.push_back({label, aspects.size()});
  }
  if (aspects.empty())
    throw Error(ErrorKind::Planning, "aspect extraction produced an empty list");
  return aspects;
}

std::vector<ACU> generate_acus(Gateway& gateway, const DocumentSet& doc_set,
                               const Aspect& aspect, const PlanningOptions& opts) {
  auto resp = gateway.complete(
      prompts::acu_request(join_documents(doc_set), aspect.label, opts.model_id));
  std::vector<ACU> acus;
  for (const auto& line : parse_list_response(resp.text)) {
    if (trim(line).empty()) continue;
    acus.push_back({trim(line), aspect.index, acus.size()});
  }
  return acus;
}

std::vector<ACU> deduplicate(std::vector<ACU> acus) {
  std::vector<ACU> out;
  std::map<std::string, bool> seen;
  for (auto& a : acus) {
    std::string key = normalize_acu(a.text);
    if (key.empty() || seen.count(key)) continue;
    seen[key] = true;
    a.id = out.size();
    out.push_back(std::move(a));
  }
  return out;
}

PlanningResult plan(Gateway& gateway, const DocumentSet& doc_set,
                    const PlanningOptions& opts, std::vector<std::string>* warnings) {
  PlanningResult result;
  result.aspects = extract_aspects(gateway, doc_set, opts);

  std::vector<ACU> all;
  for (const auto& aspect : result.aspects) {
    auto acus = generate_acus(gateway, doc_set, aspect, opts);
    if (acus.empty() && warnings)
      warnings->push_back("aspect '" + aspect.label + "' contributed zero ACUs");
    for (auto& a : acus) all.push_back(std::move(a));
  }
  if (all.empty())
    throw Error(ErrorKind::Planning, "no aspect produced any ACUs");

  result.acus = deduplicate(std::move(all));

  if (opts.embedding_dedup && result.acus.size() > 1) {
    std::vector<std::string> texts;
    for (const auto& a : result.acus) texts.push_back(a.text);
    auto vecs = gateway.embed(texts);
    std::vector<ACU> kept;
    for (std::size_t i = 0; i < result.acus.size(); ++i) {
      bool near_dup = false;
      for (const auto& k : kept)
        if (cosine(vecs[i].values, vecs[k.id].values) >= opts.embedding_dedup_threshold) {
          near_dup = true;
          break;
        }
      if (!near_dup) kept.push_back(result.acus[i]);
    }
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i].id = i;
    result.acus = std::move(kept);
  }

  if (result.acus.size() < result.aspects.size() && warnings)
    warnings->push_back("fewer ACUs (" + std::to_string(result.acus.size()) +
                        ") than aspects (" + std::to_string(result.aspects.size()) + ")");
  return result;
}

}  // namespace threadsumm
