#include "threadsumm/thread_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "threadsumm/error.hpp"

namespace threadsumm {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

namespace {

void validate_thread(const Thread& t) {
  std::set<std::string> ids;
  for (const auto& p : t.posts) {
    if (!ids.insert(p.id).second)
      throw Error(ErrorKind::Structure, "duplicate post id '" + p.id + "'");
    if (trim(p.text).empty())
      throw Error(ErrorKind::Parse, "post '" + p.id + "' has empty text");
  }
  std::vector<const Post*> roots;
  for (const auto& p : t.posts) {
    if (!p.reply_to) {
      roots.push_back(&p);
      continue;
    }
    if (!ids.count(*p.reply_to))
      throw Error(ErrorKind::ReferentialIntegrity,
                  "post '" + p.id + "' replies to unknown id '" + *p.reply_to + "'");
  }
  for (const auto& p : t.posts)
    for (const auto& q : p.quotes)
      if (!ids.count(q))
        throw Error(ErrorKind::ReferentialIntegrity,
                    "post '" + p.id + "' quotes unknown id '" + q + "'");
  if (roots.size() != 1)
    throw Error(ErrorKind::Structure,
                "expected exactly one root post, found " + std::to_string(roots.size()));
  if (roots[0]->id != t.root_id)
    throw Error(ErrorKind::Structure,
                "declared root '" + t.root_id + "' does not match the post without reply_to ('" +
                    roots[0]->id + "')");
  // Cycle check: walk reply_to chains; a tree over n nodes has chains <= n.
  std::map<std::string, const std::string*> parent;
  for (const auto& p : t.posts)
    parent[p.id] = p.reply_to ? &*p.reply_to : nullptr;
  for (const auto& p : t.posts) {
    const std::string* cur = parent[p.id];
    std::size_t hops = 0;
    while (cur) {
      if (++hops > t.posts.size())
        throw Error(ErrorKind::Structure, "cycle in reply edges at post '" + p.id + "'");
      cur = parent[*cur];
    }
  }
}

}  // namespace

Thread parse_thread_tree(const std::string& input) {
  json doc;
  try {
    doc = json::parse(input);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse,
                "malformed thread document at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("root") || !doc.contains("posts"))
    throw Error(ErrorKind::Parse, "thread document must be an object with 'root' and 'posts'");

  Thread t;
  t.root_id = doc.at("root").get<std::string>();
  if (doc.contains("source_name")) t.source_name = doc["source_name"].get<std::string>();
  for (const auto& jp : doc.at("posts")) {
    Post p;
    if (!jp.contains("id") || !jp.contains("text"))
      throw Error(ErrorKind::Parse, "each post needs 'id' and 'text'");
    p.id = jp.at("id").get<std::string>();
    p.text = jp.at("text").get<std::string>();
    if (jp.contains("author") && !jp["author"].is_null())
      p.author = jp["author"].get<std::string>();
    if (jp.contains("reply_to") && !jp["reply_to"].is_null())
      p.reply_to = jp["reply_to"].get<std::string>();
    if (jp.contains("quotes"))
      for (const auto& q : jp["quotes"]) p.quotes.push_back(q.get<std::string>());
    t.posts.push_back(std::move(p));
  }
  validate_thread(t);
  return t;
}

std::string serialize_thread(const Thread& thread) {
  json doc;
  doc["root"] = thread.root_id;
  if (thread.source_name) doc["source_name"] = *thread.source_name;
  doc["posts"] = json::array();
  for (const auto& p : thread.posts) {
    json jp;
    jp["id"] = p.id;
    jp["text"] = p.text;
    if (p.author) jp["author"] = *p.author;
    if (p.reply_to) jp["reply_to"] = *p.reply_to;
    if (!p.quotes.empty()) jp["quotes"] = p.quotes;
    doc["posts"].push_back(std::move(jp));
  }
  return doc.dump(2);
}

DocumentSet parse_flat(const std::string& input, const std::string& delimiter) {
  if (trim(input).empty())
    throw Error(ErrorKind::EmptyInput, "flat input is empty");
  DocumentSet ds;
  ds.origin = DocOrigin::Flat;
  std::size_t pos = 0;
  while (pos <= input.size()) {
    std::size_t next = input.find(delimiter, pos);
    std::string seg = next == std::string::npos ? input.substr(pos)
                                                : input.substr(pos, next - pos);
    seg = trim(seg);
    if (!seg.empty()) ds.documents.push_back(std::move(seg));
    if (next == std::string::npos) break;
    pos = next + delimiter.size();
  }
  if (ds.documents.empty())
    throw Error(ErrorKind::EmptyInput, "flat input contains no non-empty documents");
  return ds;
}

DocumentSet flatten(const Thread& thread) {
  validate_thread(thread);
  std::map<std::string, std::vector<const Post*>> children;
  std::map<std::string, const Post*> by_id;
  for (const auto& p : thread.posts) {
    by_id[p.id] = &p;
    if (p.reply_to) children[*p.reply_to].push_back(&p);
  }
  DocumentSet ds;
  ds.origin = DocOrigin::Tree;
  std::vector<const Post*> stack{by_id.at(thread.root_id)};
  while (!stack.empty()) {
    const Post* cur = stack.back();
    stack.pop_back();
    ds.documents.push_back(trim(cur->text));
    auto it = children.find(cur->id);
    if (it != children.end())
      for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit)
        stack.push_back(*rit);
  }
  return ds;
}

const char* const kSplitterId = "rulesplit-v1";

namespace {

// Guard list: a '.' directly after one of these tokens does not end a sentence.
const std::array<const char*, 16> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "st", "vs", "etc", "e.g", "i.e",
    "no", "approx", "dept", "inc", "jr", "sr"};

bool ends_with_abbreviation(const std::string& text, std::size_t dot_pos) {
  std::size_t start = dot_pos;
  while (start > 0) {
    char c = text[start - 1];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '.') --start;
    else break;
  }
  std::string word = text.substr(start, dot_pos - start);
  std::transform(word.begin(), word.end(), word.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (const char* a : kAbbreviations)
    if (word == a) return true;
  // Single-letter initials ("J.") never terminate.
  return word.size() == 1;
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur.push_back(c);
    if (c == '!' || c == '?' || c == '.') {
      if (c == '.' && ends_with_abbreviation(text, i)) continue;
      // Absorb trailing closers and repeated terminators ("?!", '..."').
      while (i + 1 < text.size() &&
             (text[i + 1] == '.' || text[i + 1] == '!' || text[i + 1] == '?' ||
              text[i + 1] == ')' || text[i + 1] == '"' || text[i + 1] == '\''))
        cur.push_back(text[++i]);
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::vector<SentenceUnit> split_sentences(const DocumentSet& doc_set) {
  std::vector<SentenceUnit> units;
  std::size_t global = 0;
  for (std::size_t d = 0; d < doc_set.documents.size(); ++d) {
    auto sents = split_sentences(doc_set.documents[d]);
    for (std::size_t s = 0; s < sents.size(); ++s)
      units.push_back({sents[s], d, s, global++});
  }
  return units;
}

}  // namespace threadsumm
