#include "threadsumm/pipeline.hpp"

#include "threadsumm/error.hpp"

namespace threadsumm {

const char* to_string(ScoreCombiner combiner) {
  switch (combiner) {
    case ScoreCombiner::Mean: return "mean";
    case ScoreCombiner::Min: return "min";
    case ScoreCombiner::Max: return "max";
    case ScoreCombiner::Weighted: return "weighted";
  }
  return "mean";
}

ScoreCombiner combiner_from_string(const std::string& name) {
  if (name == "mean") return ScoreCombiner::Mean;
  if (name == "min") return ScoreCombiner::Min;
  if (name == "max") return ScoreCombiner::Max;
  if (name == "weighted") return ScoreCombiner::Weighted;
  throw Error(ErrorKind::Config, "unknown score combiner '" + name + "'");
}

nlohmann::json tot_config_to_json(const ToTConfig& cfg) {
  return {
      {"steps", cfg.steps},
      {"reorder_proposals", cfg.reorder_proposals},
      {"paragraph_proposals", cfg.paragraph_proposals},
      {"score_retry_limit", cfg.score_retry_limit},
      {"combiner", to_string(cfg.combiner)},
      {"coherence_weight", cfg.coherence_weight},
  };
}

ToTConfig tot_config_from_json(const nlohmann::json& j) {
  ToTConfig cfg;
  cfg.steps = j.value("steps", 3);
  cfg.reorder_proposals = j.value("reorder_proposals", 1);
  cfg.paragraph_proposals = j.value("paragraph_proposals", 2);
  cfg.score_retry_limit = j.value("score_retry_limit", 2);
  cfg.combiner = combiner_from_string(j.value("combiner", "mean"));
  cfg.coherence_weight = j.value("coherence_weight", 0.5);
  return cfg;
}

void run_pipeline(Gateway& gateway, const DocumentSet& input, const PipelineConfig& cfg,
                  RunManifest& manifest) {
  gateway.set_listener([&manifest](const CallRecord& rec) { manifest.record_call(rec); });

  manifest.input = input;
  manifest.splitter_id = kSplitterId;

  auto planning = plan(gateway, input, cfg.planning, &manifest.warnings);
  manifest.aspects = planning.aspects;
  manifest.acus = planning.acus;

  try {
    auto result = tot_search(gateway, input, planning.acus, cfg.tot, cfg.composition);
    manifest.trace = std::move(result.trace);
    manifest.summary = std::move(result.summary);
  } catch (const StepError& e) {
    manifest.trace = e.trace();
    gateway.set_listener(nullptr);
    throw;
  }

  if (cfg.baseline_vanilla)
    manifest.vanilla_summary = vanilla_summarize(gateway, input, cfg.planning.model_id);

  gateway.set_listener(nullptr);
}

}  // namespace threadsumm
