#pragma once

#include <string>

#include "threadsumm/composition.hpp"
#include "threadsumm/gateway.hpp"
#include "threadsumm/manifest.hpp"
#include "threadsumm/planning.hpp"
#include "threadsumm/thread_model.hpp"

namespace threadsumm {

struct PipelineConfig {
  PlanningOptions planning;
  CompositionOptions composition;
  ToTConfig tot;
  bool baseline_vanilla = false;
};

// Full run: planning -> ToT composition (-> optional vanilla baseline),
// with every stage artifact and provider call recorded into `manifest`.
// The gateway's call listener is pointed at the manifest for the duration.
void run_pipeline(Gateway& gateway, const DocumentSet& input, const PipelineConfig& cfg,
                  RunManifest& manifest);

const char* to_string(ScoreCombiner combiner);
ScoreCombiner combiner_from_string(const std::string& name);

nlohmann::json tot_config_to_json(const ToTConfig& cfg);
ToTConfig tot_config_from_json(const nlohmann::json& j);

}  // namespace threadsumm
