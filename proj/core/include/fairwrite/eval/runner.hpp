#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairwrite/eval/datasets.hpp"
#include "fairwrite/providers/classifier.hpp"
#include "fairwrite/rewriter.hpp"

namespace fairwrite::eval {

/// Aggregated result of one evaluation run. Proportions are in [0, 1],
/// stereotype scores and toxicity means in [0, 100].
struct MetricReport {
  std::string task;
  std::string model_id;
  std::string attribute;
  std::map<std::string, double> metrics;
  std::map<std::string, std::int64_t> counts;
  std::vector<nlohmann::json> per_instance;  // sorted by input index
  std::vector<std::string> notes;
  bool truncated = false;
};

struct EvalOptions {
  std::size_t workers = 1;
  /// The run fails when more than this fraction of attempted instances error.
  double max_error_fraction = 0.10;
  /// Polled between instances; when set, the run stops and is marked truncated.
  const std::atomic<bool>* cancel = nullptr;
};

/// Prompt shown to the model for each task.
std::string stereoset_prompt(const StereoSetInstance& instance);
std::string winobias_prompt(const WinoBiasInstance& instance);
std::string bold_prompt(const BoldPrompt& prompt);

MetricReport run_stereoset(const std::vector<StereoSetInstance>& instances,
                           std::string_view attribute, const DebiasPipeline& pipeline,
                           const EvalOptions& options = {});
MetricReport run_winobias(const std::vector<WinoBiasInstance>& instances,
                          std::string_view attribute, const DebiasPipeline& pipeline,
                          const EvalOptions& options = {});
/// Needs toxicity, regard and sentiment from `classifier`; fails fast with a
/// ConfigError naming the first missing kind.
MetricReport run_bold(const std::vector<BoldPrompt>& prompts, std::string_view attribute,
                      const DebiasPipeline& pipeline, Classifier* classifier,
                      const EvalOptions& options = {});

/// Loads the dataset for `task` (multiple_choice -> StereoSet,
/// pronoun_choice -> WinoBias, chat_rewrite -> BOLD) and runs it.
MetricReport run_eval(TaskMode task, const std::filesystem::path& dataset,
                      std::string_view attribute, const DebiasPipeline& pipeline,
                      Classifier* classifier, const EvalOptions& options = {});

nlohmann::json to_json(const MetricReport& report);
/// Pretty JSON plus trailing newline; byte-stable for equal reports.
std::string render_report_json(const MetricReport& report);
/// Aligned-columns table in the shape of the published result tables.
std::string render_table(const MetricReport& report);

}  // namespace fairwrite::eval
