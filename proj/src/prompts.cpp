#include "threadsumm/prompts.hpp"

namespace threadsumm {
namespace prompts {

const char* const kAspectSystem = "You are an expert at understanding documents.";

const char* const kAspectUser =
    "Extract the unique aspects (places, names, products, features, objects) "
    "mentioned in the following document : {Input}";

const char* const kAcuSystem =
    "You are an expert at analyzing documents and breaking them down into atomic "
    "content units (ACUs). An ACU is the smallest self-contained statement of fact, "
    "claim, or idea that cannot be further broken down without losing its meaning.";

const char* const kAcuUser =
    "Follow this process step by step:\n"
    "1. Read the document carefully.\n"
    "2. Read the Aspect list carefully.\n"
    "3. For each aspect, identify all distinct factual claims, propositions, or ideas.\n"
    "4. Each ACU should express only one idea.\n"
    "5. Each ACU should be independent of surrounding text.\n"
    "6. Each ACU should be written in clear and concise language.\n"
    "7. Rewrite each idea as a minimal, standalone statement.\n"
    "8. Do not include reasoning steps or explanations, only the extracted statements.\n"
    "9. Output the ACUs in a list, where each item is one ACU string.\n"
    "10. Return only the file as output.";

const char* const kReorderSystem =
    "You are an expert at reordering documents for them to follow a logical and "
    "coherent flow.";

const char* const kReorderUser =
    "Ensure every sentence appears exactly once (none omitted or duplicated). Do not "
    "add new content. The reordered output should be a single continuous text, not an "
    "itemized list.";

const char* const kParagraphSystem =
    "You are an expert at reading documents and summarizing the key points into one "
    "coherent paragraph.";

const char* const kParagraphUser =
    "Given the following sentences, write a single coherent paragraph (not in bullet "
    "points or itemized. The first sentence of the paragraph must be the first "
    "sentence of the input document, and the last sentence of the paragraph must be "
    "the last sentence of the input document. Do not omit or duplicate any sentences. "
    "Use natural transitions and make it flow well.";

const char* const kEvaluateSystem =
    "You are an expert at evaluating text for coherence and coverage.";

const char* const kEvaluateUser =
    "Given the original text (representing a set of core ideas) and a rewritten "
    "paragraph, score the paragraph for:\n"
    "1. Coherence (logical flow, readability, and overall structure, ranging from 0.0 "
    "to 1.0)\n"
    "2. Coverage (how completely it includes all key ideas/sentences from the "
    "original text, ranging from 0.0 to 1.0)\n"
    "Return the two scores as two numbers separated by a space (e.g., '0.9 1.0'). If "
    "the paragraph contains significantly fewer or more sentences than the original "
    "text, or if it changes the core meaning, score coverage lower. Do not provide "
    "any other text besides the two scores.";

const char* const kVanilla =
    "You are an expert text summarizer tasked with providing summaries of documents. "
    "Please provide a summary of the text. Do not itemize the summary.";

namespace {
std::string substitute(std::string tmpl, const std::string& slot, const std::string& value) {
  auto pos = tmpl.find(slot);
  if (pos != std::string::npos) tmpl.replace(pos, slot.size(), value);
  return tmpl;
}
}  // namespace

ChatRequest aspect_request(const std::string& joined_documents, const std::string& model_id) {
  ChatRequest req;
  req.system_prompt = kAspectSystem;
  req.user_prompt = substitute(kAspectUser, "{Input}", joined_documents);
  req.model_id = model_id;
  req.tag = PromptTag::Aspect;
  return req;
}

ChatRequest acu_request(const std::string& joined_documents, const std::string& aspect,
                        const std::string& model_id) {
  ChatRequest req;
  req.system_prompt = kAcuSystem;
  req.user_prompt = std::string(kAcuUser) + "\n\nDocument:\n" + joined_documents +
                    "\n\nAspect:\n" + aspect;
  req.model_id = model_id;
  req.tag = PromptTag::Acu;
  return req;
}

ChatRequest reorder_request(const std::string& continuous_text, const std::string& model_id) {
  ChatRequest req;
  req.system_prompt = kReorderSystem;
  req.user_prompt = std::string(kReorderUser) + "\n\n" + continuous_text;
  req.model_id = model_id;
  req.tag = PromptTag::Reorder;
  return req;
}

ChatRequest paragraph_request(const std::string& ordered_sentences,
                              const std::string& model_id) {
  ChatRequest req;
  req.system_prompt = kParagraphSystem;
  req.user_prompt = std::string(kParagraphUser) + "\n\n" + ordered_sentences;
  req.model_id = model_id;
  req.tag = PromptTag::Paragraph;
  return req;
}

ChatRequest evaluate_request(const std::string& source_text, const std::string& paragraph,
                             const std::string& model_id) {
  ChatRequest req;
  req.system_prompt = kEvaluateSystem;
  req.user_prompt = std::string(kEvaluateUser) + "\n\nOriginal text:\n" + source_text +
                    "\n\nParagraph:\n" + paragraph;
  req.model_id = model_id;
  req.tag = PromptTag::Evaluate;
  return req;
}

ChatRequest vanilla_request(const std::string& joined_documents, const std::string& model_id) {
  ChatRequest req;
  req.user_prompt = std::string(kVanilla) + "\n\n" + joined_documents;
  req.model_id = model_id;
  req.tag = PromptTag::Vanilla;
  return req;
}

ChatRequest aspect_metric_request(const std::string& document, const std::string& model_id) {
  ChatRequest req;
  req.system_prompt = kAspectSystem;
  req.user_prompt = substitute(kAspectUser, "{Input}", document);
  req.model_id = model_id;
  req.tag = PromptTag::AspectMetric;
  return req;
}

}  // namespace prompts
}  // namespace threadsumm
