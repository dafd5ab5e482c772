#pragma once

#include <string>

#include "threadsumm/gateway.hpp"

namespace threadsumm {
namespace prompts {

// Stored templates. These are versioned verbatim; the acceptance suite
// pins their checksums, so any edit here must be deliberate.
extern const char* const kAspectSystem;
extern const char* const kAspectUser;  // contains the {Input} slot
extern const char* const kAcuSystem;
extern const char* const kAcuUser;
extern const char* const kReorderSystem;
extern const char* const kReorderUser;
extern const char* const kParagraphSystem;
extern const char* const kParagraphUser;
extern const char* const kEvaluateSystem;
extern const char* const kEvaluateUser;
extern const char* const kVanilla;

// Request builders: substitute/append the payload without touching the
// stored template text.
ChatRequest aspect_request(const std::string& joined_documents, const std::string& model_id);
ChatRequest acu_request(const std::string& joined_documents, const std::string& aspect,
                        const std::string& model_id);
ChatRequest reorder_request(const std::string& continuous_text, const std::string& model_id);
ChatRequest paragraph_request(const std::string& ordered_sentences,
                              const std::string& model_id);
ChatRequest evaluate_request(const std::string& source_text, const std::string& paragraph,
                             const std::string& model_id);
ChatRequest vanilla_request(const std::string& joined_documents, const std::string& model_id);
ChatRequest aspect_metric_request(const std::string& document, const std::string& model_id);

}  // namespace prompts
}  // namespace threadsumm
