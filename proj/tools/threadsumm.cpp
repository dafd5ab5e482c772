#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "threadsumm/composition.hpp"
#include "threadsumm/config.hpp"
#include "threadsumm/error.hpp"
#include "threadsumm/manifest.hpp"
#include "threadsumm/metrics.hpp"
#include "threadsumm/pipeline.hpp"
#include "threadsumm/planning.hpp"
#include "threadsumm/report.hpp"
#include "threadsumm/thread_model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace threadsumm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write file: " + path.string());
  out << content;
}

DocumentSet load_document_set(const std::string& path, const std::string& format,
                              const std::string& delimiter) {
  std::string raw = read_file(path);
  if (format == "tree") return flatten(parse_thread_tree(raw));
  return parse_flat(raw, delimiter);
}

std::string resolve_config_path(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("THREADSUMM_CONFIG"); env && *env) return env;
  throw Error(ErrorKind::Config,
              "no config file: pass --config or set THREADSUMM_CONFIG");
}

struct SummarizeArgs {
  std::string input;
  std::string format = "tree";
  std::string delimiter = "</s>";
  std::string config_path;
  std::string out_dir;
  std::string replay_path;
  std::string run_id;
  std::string provider;  // overrides the config's generator id
  std::string baseline;
  std::string combiner = "mean";
  int steps = 3;
  int reorder_proposals = 1;
  int paragraph_proposals = 2;
};

int cmd_summarize(const SummarizeArgs& args) {
  DocumentSet input;
  std::shared_ptr<Gateway> gateway;
  PipelineConfig pipeline_cfg;
  json config_snapshot;

  if (!args.replay_path.empty()) {
    RunManifest prior = RunManifest::load(args.replay_path);
    input = prior.input;
    config_snapshot = prior.config;
    pipeline_cfg.tot = tot_config_from_json(prior.config.value("tot", json::object()));
    pipeline_cfg.planning.model_id = prior.config.value("generator_model", "");
    pipeline_cfg.composition.model_id = pipeline_cfg.planning.model_id;
    pipeline_cfg.baseline_vanilla = prior.config.value("baseline", false);
    std::string gen_pid = prior.config.value("generator_provider", "");
    std::string scorer_pid = prior.config.value("scorer_provider", gen_pid);
    gateway = std::make_shared<Gateway>(replay_chat_provider(prior, gen_pid),
                                        replay_embedding_provider(prior));
    if (!scorer_pid.empty() && scorer_pid != gen_pid)
      gateway->set_scorer(replay_chat_provider(prior, scorer_pid));
  } else {
    if (args.input.empty())
      throw Error(ErrorKind::Config, "summarize requires --input (or --replay)");
    if (!fs::exists(args.input))
      throw Error(ErrorKind::Config, "input file does not exist: " + args.input);
    input = load_document_set(args.input, args.format, args.delimiter);

    GatewayConfig gw_cfg = load_gateway_config(resolve_config_path(args.config_path));
    if (!args.provider.empty()) gw_cfg.generator = args.provider;
    gateway = make_gateway(gw_cfg);

    const auto& gen = gw_cfg.find(gw_cfg.generator);
    pipeline_cfg.planning.model_id = gen.model_id;
    pipeline_cfg.composition.model_id = gen.model_id;
    pipeline_cfg.tot.steps = args.steps;
    pipeline_cfg.tot.reorder_proposals = args.reorder_proposals;
    pipeline_cfg.tot.paragraph_proposals = args.paragraph_proposals;
    pipeline_cfg.tot.combiner = combiner_from_string(args.combiner);
    pipeline_cfg.baseline_vanilla = args.baseline == "vanilla";

    config_snapshot = {
        {"generator_provider", gw_cfg.generator},
        {"generator_model", gen.model_id},
        {"scorer_provider", gw_cfg.scorer.empty() ? gw_cfg.generator : gw_cfg.scorer},
        {"embedder_provider", gw_cfg.embedder},
        {"tot", tot_config_to_json(pipeline_cfg.tot)},
        {"format", args.format},
        {"delimiter", args.delimiter},
        {"baseline", pipeline_cfg.baseline_vanilla},
    };
  }

  RunManifest manifest;
  manifest.input_fingerprint = sha256_hex(json(input.documents).dump());
  manifest.run_id =
      args.run_id.empty() ? make_run_id(manifest.input_fingerprint) : args.run_id;
  manifest.created_at = current_timestamp();
  manifest.config = config_snapshot;

  fs::path run_dir = fs::path(args.out_dir) / manifest.run_id;
  fs::create_directories(run_dir / "reports");

  try {
    run_pipeline(*gateway, input, pipeline_cfg, manifest);
  } catch (const std::exception& e) {
    manifest.warnings.push_back(std::string("run aborted: ") + e.what());
    manifest.save((run_dir / "manifest.json").string());
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "partial manifest: " << (run_dir / "manifest.json").string() << "\n";
    return kExitFailure;
  }

  manifest.save((run_dir / "manifest.json").string());
  write_file(run_dir / "summary.txt", manifest.summary + "\n");
  write_file(run_dir / "trace.json", trace_to_json(manifest.trace).dump(2) + "\n");
  if (!manifest.vanilla_summary.empty())
    write_file(run_dir / "vanilla_summary.txt", manifest.vanilla_summary + "\n");

  std::cout << run_dir.string() << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string summary_path;
  std::string source_path;
  std::string reference_path;
  bool docasref = false;
  std::string format = "flat";
  std::string delimiter = "</s>";
  std::string metrics = "rouge1,aspects,opinion,position,length";
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t opinion_k = 5;
  double opinion_t = 0.6;
  double quantile_cutoff = 0.10;
  bool metrics_explicit = false;
};

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

int cmd_evaluate(const EvaluateArgs& args) {
  auto requested = split_csv_list(args.metrics);
  auto wants = [&](const std::string& m) {
    return std::find(requested.begin(), requested.end(), m) != requested.end();
  };

  if (wants("rouge1") && args.reference_path.empty() && !args.docasref) {
    if (args.metrics_explicit)
      throw Error(ErrorKind::Config,
                  "rouge1 needs --reference or --docasref");
    // Default metric set: silently drop rouge1 when no reference exists.
    requested.erase(std::remove(requested.begin(), requested.end(), "rouge1"),
                    requested.end());
  }

  std::string summary = read_file(args.summary_path);
  DocumentSet source = load_document_set(args.source_path, args.format, args.delimiter);

  std::shared_ptr<Gateway> gateway;
  std::string metric_model_id;
  auto need_gateway = [&]() -> Gateway& {
    if (!gateway) {
      GatewayConfig cfg = load_gateway_config(resolve_config_path(args.config_path));
      gateway = make_gateway(cfg);
      metric_model_id = cfg.find(cfg.generator).model_id;
    }
    return *gateway;
  };

  json report;
  report["summary_path"] = args.summary_path;
  report["source_path"] = args.source_path;
  report["metrics"] = json::object();
  // Reserved slots for externally computed consistency scores.
  report["metrics"]["qags"] = nullptr;
  report["metrics"]["summac"] = nullptr;
  report["errors"] = json::object();
  report["details"] = json::object();

  int succeeded = 0;
  auto run_metric = [&](const std::string& name, auto&& fn) {
    if (!wants(name)) return;
    try {
      fn();
      ++succeeded;
    } catch (const std::exception& e) {
      report["errors"][name] = e.what();
    }
  };

  run_metric("rouge1", [&] {
    double score = args.docasref
                       ? rouge1_recall_docasref(summary, source)
                       : rouge1_recall(summary, read_file(args.reference_path));
    report["metrics"]["rouge1_recall"] = score;
    report["details"]["rouge1_mode"] = args.docasref ? "docasref" : "reference";
  });

  run_metric("aspects", [&] {
    AspectOverlapOptions opts;
    auto& gw = need_gateway();
    opts.model_id = metric_model_id;
    auto rep = aspect_overlap(gw, source, summary, opts);
    report["metrics"]["aspect_overlap"] = rep.score;
    report["details"]["aspects"] = {
        {"source", rep.source_aspects},
        {"summary", rep.summary_aspects},
        {"common", rep.common},
    };
    write_file(fs::path(args.out_dir) / "aspects.svg",
               coverage_bar_svg({{"aspect overlap", rep.score}}));
  });

  auto source_units = split_sentences(source);
  auto summary_sentences = split_sentences(summary);

  run_metric("opinion", [&] {
    OpinionCoverageOptions opts;
    opts.k = args.opinion_k;
    opts.threshold = args.opinion_t;
    opts.seed = args.seed;
    std::vector<std::string> warnings;
    double score =
        opinion_coverage(need_gateway(), source_units, summary_sentences, opts, &warnings);
    report["metrics"]["opinion_coverage"] = score;
    if (!warnings.empty()) report["details"]["opinion_warnings"] = warnings;
  });

  run_metric("position", [&] {
    auto rep = position_representation(need_gateway(), source_units, summary_sentences,
                                       args.quantile_cutoff);
    report["metrics"]["position_not_represented"] = rep.not_represented_indices.size();
    report["details"]["position"] = {
        {"threshold_used", rep.threshold_used},
        {"not_represented_indices", rep.not_represented_indices},
        {"sentence_count", rep.sentences.size()},
    };
    write_file(fs::path(args.out_dir) / "position.svg", position_scatter_svg(rep));
  });

  run_metric("length", [&] {
    auto stats = length_stats(summary);
    report["metrics"]["word_count"] = stats.word_count;
    report["metrics"]["sentence_count"] = stats.sentence_count;
  });

  fs::create_directories(args.out_dir);
  write_file(fs::path(args.out_dir) / "report.json", report.dump(2) + "\n");

  // Single-row CSV mirror of the numeric metrics.
  std::vector<std::string> names;
  std::vector<std::string> values;
  for (const auto& [k, v] : report["metrics"].items()) {
    names.push_back(k);
    values.push_back(v.is_null() ? "" : v.dump());
  }
  write_file(fs::path(args.out_dir) / "report.csv",
             comparison_csv(names, {{args.summary_path, values}}));

  return succeeded > 0 ? kExitOk : kExitFailure;
}

int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& out_path) {
  // Column union across runs, in first-seen order.
  std::vector<std::string> metric_names;
  std::vector<std::pair<std::string, json>> loaded;
  for (const auto& dir : run_dirs) {
    fs::path report_path = fs::path(dir) / "reports" / "report.json";
    if (!fs::exists(report_path)) report_path = fs::path(dir) / "report.json";
    json rep;
    try {
      rep = json::parse(read_file(report_path.string()));
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << dir << ": " << e.what() << "\n";
      continue;
    }
    const json metrics = rep.value("metrics", json::object());
    for (const auto& [k, v] : metrics.items())
      if (std::find(metric_names.begin(), metric_names.end(), k) == metric_names.end())
        metric_names.push_back(k);
    loaded.emplace_back(dir, std::move(rep));
  }

  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  for (const auto& [dir, rep] : loaded) {
    std::vector<std::string> values;
    const auto metrics = rep.value("metrics", json::object());
    for (const auto& name : metric_names) {
      if (metrics.contains(name) && !metrics[name].is_null())
        values.push_back(metrics[name].dump());
      else
        values.push_back("");
    }
    rows.emplace_back(dir, std::move(values));
  }

  std::string csv = comparison_csv(metric_names, rows);
  if (out_path.empty())
    std::cout << csv;
  else
    write_file(out_path, csv);
  return kExitOk;
}

int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::Config ? kExitUsage : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ThreadSumm: multi-stage summarization of nested discussion threads"};
  app.require_subcommand(1);

  SummarizeArgs sum;
  auto* summarize = app.add_subcommand("summarize", "Run the full pipeline on a thread");
  summarize->add_option("--input", sum.input, "Input thread file");
  summarize->add_option("--format", sum.format, "Input format")
      ->check(CLI::IsMember({"tree", "flat"}));
  summarize->add_option("--delimiter", sum.delimiter, "Flat-format delimiter token");
  summarize->add_option("--config", sum.config_path, "Provider config JSON");
  summarize->add_option("--out", sum.out_dir, "Runs root directory")->required();
  summarize->add_option("--replay", sum.replay_path,
                        "Replay a stored manifest (no network)");
  summarize->add_option("--run-id", sum.run_id, "Override the generated run id");
  summarize->add_option("--provider", sum.provider, "Generator provider id override");
  summarize->add_option("--baseline", sum.baseline, "Also run a baseline (vanilla)")
      ->check(CLI::IsMember({"vanilla"}));
  summarize->add_option("--steps", sum.steps, "Search steps");
  summarize->add_option("--reorder-proposals", sum.reorder_proposals,
                        "Reordering proposals per step");
  summarize->add_option("--paragraph-proposals", sum.paragraph_proposals,
                        "Paragraph proposals per ordering");
  summarize->add_option("--combiner", sum.combiner, "Score combiner")
      ->check(CLI::IsMember({"mean", "min", "max", "weighted"}));

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score a summary against its source");
  evaluate->add_option("--summary", ev.summary_path, "Summary text file")->required();
  evaluate->add_option("--source", ev.source_path, "Source document file")->required();
  evaluate->add_option("--reference", ev.reference_path, "Reference summary for rouge1");
  evaluate->add_flag("--docasref", ev.docasref, "Use the source as the rouge1 reference");
  evaluate->add_option("--format", ev.format, "Source format")
      ->check(CLI::IsMember({"tree", "flat"}));
  evaluate->add_option("--delimiter", ev.delimiter, "Flat-format delimiter token");
  auto* metrics_opt =
      evaluate->add_option("--metrics", ev.metrics,
                           "Comma list: rouge1,aspects,opinion,position,length");
  evaluate->add_option("--config", ev.config_path, "Provider config JSON");
  evaluate->add_option("--seed", ev.seed, "Clustering seed");
  evaluate->add_option("--k", ev.opinion_k, "Opinion cluster count");
  evaluate->add_option("--t", ev.opinion_t, "Opinion similarity threshold");
  evaluate->add_option("--quantile-cutoff", ev.quantile_cutoff,
                       "Position-report quantile cutoff");
  evaluate->add_option("--out", ev.out_dir, "Report output directory")->required();

  std::vector<std::string> compare_dirs;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Tabulate metric reports across runs");
  compare->add_option("dirs", compare_dirs, "Run directories")->expected(-2);
  compare->add_option("--out", compare_out, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (summarize->parsed()) return cmd_summarize(sum);
    if (evaluate->parsed()) {
      ev.metrics_explicit = metrics_opt->count() > 0;
      return cmd_evaluate(ev);
    }
    if (compare->parsed()) return cmd_compare(compare_dirs, compare_out);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
