#pragma once

#include <optional>
#include <string>
#include <vector>

namespace threadsumm {

struct Post {
  std::string id;
  std::optional<std::string> author;
  std::string text;
  std::optional<std::string> reply_to;
  std::vector<std::string> quotes;
};

// A root post plus all nested replies. reply_to edges form a tree rooted
// at root_id; quote edges are kept but never drive traversal order.
struct Thread {
  std::string root_id;
  std::vector<Post> posts;
  std::optional<std::string> source_name;
};

enum class DocOrigin { Tree, Flat };

struct DocumentSet {
  std::vector<std::string> documents;
  DocOrigin origin = DocOrigin::Flat;
};

struct SentenceUnit {
  std::string text;
  std::size_t doc_index = 0;
  std::size_t sent_index = 0;
  std::size_t global_index = 0;
};

// Parses the tree-format JSON document {"root": id, "posts": [...]}.
// Validates uniqueness, referential integrity and the single-root tree shape.
Thread parse_thread_tree(const std::string& input);

std::string serialize_thread(const Thread& thread);

// Splits delimiter-separated flat text (ConvoSumm style). Empty segments
// are dropped after trimming.
DocumentSet parse_flat(const std::string& input,
                       const std::string& delimiter = "</s>");

// Depth-first preorder from the root, children in listed order.
DocumentSet flatten(const Thread& thread);

// Identifier of the rule set used by split_sentences, recorded in manifests.
extern const char* const kSplitterId;

// Rule-based segmentation on . ! ? and newlines with an abbreviation guard.
// A document with no terminator yields one sentence.
std::vector<SentenceUnit> split_sentences(const DocumentSet& doc_set);

std::vector<std::string> split_sentences(const std::string& text);

std::string trim(const std::string& s);

}  // namespace threadsumm
