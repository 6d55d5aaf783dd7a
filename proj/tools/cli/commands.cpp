#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>

#include "fairwrite/eval/runner.hpp"
#include "fairwrite/serialize.hpp"
#include "fairwrite/util/files.hpp"
#include "run_config.hpp"

namespace fairwrite::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fixed6(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  return buffer;
}

struct GlobalFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> template_dir;
  bool dry_run = false;
};

// Paths given as flags are relative to the working directory, unlike paths in
// the config file.
RunConfig load_config(const GlobalFlags& flags, std::vector<std::string> extra) {
  std::vector<std::string> overrides = flags.overrides;
  if (flags.seed) overrides.push_back("seed=" + std::to_string(*flags.seed));
  if (flags.workers) overrides.push_back("workers=" + std::to_string(*flags.workers));
  if (flags.template_dir) {
    overrides.push_back("template_dir=" + json(fs::absolute(*flags.template_dir).string()).dump());
  }
  for (auto& o : extra) overrides.push_back(std::move(o));
  return load_run_config(flags.config_path, overrides);
}

// Everything that can be checked without constructing a provider.
void dry_run_checks(const RunConfig& config, std::ostream& out) {
  validate_providers(config);
  const auto doc = parse_lexicon_document(config.resolve(config.lexicon));
  const auto problems = validate_lexicon_document(doc, config.embed_at_load);
  if (!problems.empty()) {
    std::string message = "lexicon has " + std::to_string(problems.size()) + " problem(s):";
    for (const auto& p : problems) message += "\n  - " + p;
    throw ConfigError(message);
  }
  const TemplateSet templates = make_templates(config);
  out << "config OK\n";
  for (TaskMode mode : {TaskMode::kChatRewrite, TaskMode::kMultipleChoice, TaskMode::kPronounChoice}) {
    out << "  template " << to_string(mode) << ": " << templates.get(mode).id << "\n";
  }
  out << "  lexicon: " << doc.attributes.size() << " attribute(s), " << doc.entries.size()
      << " entries\n";
  out << "  embedding provider: " << config.embedding_provider.value("kind", "") << "\n";
  out << "  llm provider: " << config.llm_provider.value("kind", "") << "\n";
}

void print_report(const BiasReport& report, std::ostream& out) {
  out << "attribute: " << report.attribute << "\n";
  out << "response: " << report.response_text << "\n";
  out << "group similarities:\n";
  std::size_t width = 0;
  for (const auto& [group, s] : report.group_similarities) width = std::max(width, group.size());
  for (const auto& [group, s] : report.group_similarities) {
    out << "  " << group << std::string(width - group.size(), ' ') << "  " << fixed6(s) << "\n";
  }
  if (report.orientation) {
    out << "orientation: " << report.orientation->group_id << " ("
        << fixed6(report.orientation->similarity) << ")\n";
  } else {
    out << "orientation: none\n";
  }
  if (report.unpleasant) {
    out << "unpleasant characteristic: " << report.unpleasant->word << " ("
        << fixed6(report.unpleasant->similarity) << ")\n";
  } else {
    out << "unpleasant characteristic: none\n";
  }
  out << "biased: " << (report.biased() ? "yes" : "no") << "\n";
}

void print_outcome(const DebiasOutcome& outcome, std::ostream& out) {
  out << "original:\n" << outcome.original << "\n";
  if (outcome.passed_through) {
    out << "pass-through: yes (" << outcome.pass_reason << "); original returned unchanged\n";
    out << "output:\n" << outcome.effective() << "\n";
    return;
  }
  out << "pass-through: no\n";
  out << "orientation: " << outcome.report.orientation->group_id << "\n";
  out << "unpleasant characteristic: " << outcome.report.unpleasant->word << "\n";
  out << "pleasant resolution: " << outcome.resolution->pleasant_word << "\n";
  out << "template: " << outcome.instruction->template_id << "\n";
  out << "instruction:\n" << outcome.instruction->rendered_text << "\n";
  out << "rewritten:\n" << *outcome.rewritten << "\n";
}

std::optional<TaskMode> task_from_name(const std::string& name) {
  if (name == "stereoset") return TaskMode::kMultipleChoice;
  if (name == "winobias") return TaskMode::kPronounChoice;
  if (name == "bold") return TaskMode::kChatRewrite;
  return parse_task_mode(name);
}

std::string task_file_stem(TaskMode mode) {
  switch (mode) {
    case TaskMode::kMultipleChoice: return "stereoset";
    case TaskMode::kPronounChoice: return "winobias";
    case TaskMode::kChatRewrite: return "bold";
  }
  return "eval";
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return kExitConfig;
    case ErrorKind::kProvider: return kExitProvider;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kNotFound:
    case ErrorKind::kValidation: return kExitInput;
    case ErrorKind::kDegenerate:
    case ErrorKind::kUndefined:
    case ErrorKind::kEvalFailed: return kExitFailure;
  }
  return kExitFailure;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::atomic<bool>* cancel) {
  CLI::App app{"Embedding-geometry bias detection and self-debiasing rewrite middleware",
               "fairwrite"};
  app.require_subcommand(1);
  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "Run config (JSON)");
  app.add_option("--set", flags.overrides, "Override a config field: key.path=value")
      ->take_all();
  app.add_option("--seed", flags.seed, "Seed for synthetic providers");
  app.add_option("--workers", flags.workers, "Worker bound for batch evaluation");
  app.add_option("--template-dir", flags.template_dir, "Directory of <mode>.txt templates");
  app.add_flag("--dry-run", flags.dry_run, "Validate config and templates, then exit");

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "Report orientation and unpleasant match");
  std::string detect_text, detect_file, detect_attribute;
  bool detect_json = false;
  auto* text_opt = detect_cmd->add_option("--text", detect_text, "Response text");
  detect_cmd->add_option("--file", detect_file, "Read the response text from a file")
      ->excludes(text_opt);
  detect_cmd->add_option("--attribute", detect_attribute, "Sensitive attribute")->required();
  detect_cmd->add_flag("--json", detect_json, "Print JSON");

  // debias
  auto* debias_cmd = app.add_subcommand("debias", "Generate, detect, and rewrite once");
  std::string debias_prompt, debias_attribute, debias_mode, debias_original;
  std::vector<std::string> debias_options;
  bool debias_json = false;
  bool debias_redetect = false;
  debias_cmd->add_option("--prompt", debias_prompt, "Prompt for the model")->required();
  debias_cmd->add_option("--attribute", debias_attribute, "Sensitive attribute")->required();
  debias_cmd->add_option("--mode", debias_mode,
                         "chat_rewrite | multiple_choice | pronoun_choice");
  debias_cmd->add_option("--option", debias_options, "Answer option (choice modes, repeat 3x)");
  debias_cmd->add_option("--original", debias_original,
                         "Use this as the original response instead of generating one");
  debias_cmd->add_flag("--redetect", debias_redetect,
                       "Run detection again on the rewrite and report it (no second rewrite)");
  debias_cmd->add_flag("--json", debias_json, "Print JSON");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Batch evaluation over a benchmark dataset");
  std::string eval_task, eval_dataset, eval_attribute, eval_output;
  eval_cmd->add_option("--task", eval_task, "stereoset | winobias | bold (or a task mode)");
  eval_cmd->add_option("--dataset", eval_dataset, "Dataset file")->required();
  eval_cmd->add_option("--attribute", eval_attribute, "Sensitive attribute")->required();
  eval_cmd->add_option("--output", eval_output, "Output directory");

  // lexicon validate
  auto* lexicon_cmd = app.add_subcommand("lexicon", "Lexicon maintenance");
  lexicon_cmd->require_subcommand(1);
  auto* validate_cmd = lexicon_cmd->add_subcommand("validate", "Check every lexicon invariant");
  std::string lexicon_path;
  bool allow_missing = false;
  validate_cmd->add_option("path", lexicon_path, "Lexicon file")->required();
  validate_cmd->add_flag("--allow-missing-vectors", allow_missing,
                         "Accept entries without vectors (embed-at-load lexicons)");

  // cache
  auto* cache_cmd = app.add_subcommand("cache", "Embedding cache maintenance");
  cache_cmd->require_subcommand(1);
  std::string cache_path;
  auto* stats_cmd = cache_cmd->add_subcommand("stats", "Summarize a cache file");
  auto* clear_cmd = cache_cmd->add_subcommand("clear", "Delete a cache file");
  for (auto* sub : {stats_cmd, clear_cmd}) {
    sub->add_option("--path", cache_path, "Cache file (default: the config's cache)");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (validate_cmd->parsed()) {
      const auto doc = parse_lexicon_document(lexicon_path);
      const auto problems = validate_lexicon_document(doc, allow_missing);
      if (!problems.empty()) {
        out << lexicon_path << ": " << problems.size() << " problem(s)\n";
        for (const auto& p : problems) out << "  - " << p << "\n";
        return kExitFailure;
      }
      std::size_t groups = 0;
      for (const auto& a : doc.attributes) groups += a.groups.size();
      out << lexicon_path << ": OK (" << doc.attributes.size() << " attribute(s), " << groups
          << " group(s), " << doc.entries.size() << " entries)\n";
      return kExitOk;
    }

    if (stats_cmd->parsed() || clear_cmd->parsed()) {
      fs::path path = cache_path;
      if (path.empty()) {
        const RunConfig config = load_config(flags, {});
        if (!config.cache) throw ConfigError("no --path given and the config has no cache");
        path = config.resolve(*config.cache);
      }
      if (clear_cmd->parsed()) {
        const bool removed = fs::remove(path);
        out << (removed ? "removed " : "no cache at ") << path.string() << "\n";
        return kExitOk;
      }
      const CacheStats stats = EmbeddingCache::inspect(path);
      out << "path: " << path.string() << "\n"
          << "model_id: " << stats.model_id << "\n"
          << "dim: " << stats.dim << "\n"
          << "records: " << stats.records << "\n"
          << "bypassed_records: " << stats.bypassed_records << "\n";
      return kExitOk;
    }

    std::vector<std::string> extra;
    if (debias_cmd->parsed()) {
      if (!debias_mode.empty()) extra.push_back("task_mode=" + debias_mode);
      if (debias_redetect) extra.push_back("redetect=true");
    }
    if (eval_cmd->parsed() && !eval_output.empty()) {
      extra.push_back("output=" + json(fs::absolute(eval_output).string()).dump());
    }
    const RunConfig config = load_config(flags, std::move(extra));
    if (flags.dry_run) {
      dry_run_checks(config, out);
      if (eval_cmd->parsed() && !fs::is_regular_file(eval_dataset)) {
        throw NotFound("dataset not found: " + eval_dataset);
      }
      return kExitOk;
    }

    if (detect_cmd->parsed()) {
      const std::string text = detect_file.empty() ? detect_text : read_text_file(detect_file);
      if (text.empty()) throw InvalidArgument("detect needs --text or --file");
      Runtime runtime = build_runtime(config, /*need_llm=*/false);
      const BiasReport report = detect(text, detect_attribute, *runtime.lexicon, config.detection,
                                       *runtime.embedder, config.response_instruction);
      if (detect_json) {
        out << to_json(report).dump(2) << "\n";
      } else {
        print_report(report, out);
      }
      return kExitOk;
    }

    if (debias_cmd->parsed()) {
      Runtime runtime = build_runtime(config);
      std::optional<std::vector<std::string>> options;
      if (!debias_options.empty()) options = debias_options;
      const DebiasOutcome outcome =
          debias_original.empty()
              ? runtime.pipeline->run(debias_prompt, debias_attribute, config.task_mode, options)
              : runtime.pipeline->rewrite(debias_prompt, debias_original, debias_attribute,
                                          config.task_mode, options);
      std::optional<BiasReport> recheck;
      if (config.redetect && outcome.rewritten) {
        recheck = detect(*outcome.rewritten, debias_attribute, *runtime.lexicon, config.detection,
                         *runtime.embedder, config.response_instruction);
      }
      if (debias_json) {
        json doc = to_json(outcome);
        if (recheck) doc["redetect"] = to_json(*recheck);
        out << doc.dump(2) << "\n";
      } else {
        print_outcome(outcome, out);
        if (recheck) {
          out << "redetect: " << (recheck->biased() ? "still biased" : "no bias detected") << "\n";
        }
      }
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      const TaskMode task = eval_task.empty() ? config.task_mode : *task_from_name(eval_task);
      Runtime runtime = build_runtime(config);
      eval::EvalOptions options;
      options.workers = config.workers;
      options.max_error_fraction = config.max_error_fraction;
      options.cancel = cancel;
      const eval::MetricReport report = eval::run_eval(
          task, eval_dataset, eval_attribute, *runtime.pipeline, runtime.classifier.get(), options);
      if (runtime.cache) runtime.cache->flush();

      const fs::path dir = config.resolve(config.output);
      const std::string stem = task_file_stem(task) + "_" + eval_attribute;
      const std::string table = eval::render_table(report);
      write_file_atomic(dir / (stem + "_report.json"), eval::render_report_json(report));
      write_file_atomic(dir / (stem + "_table.txt"), table);
      out << table;
      out << "wrote " << (dir / (stem + "_report.json")).string() << "\n";
      if (report.truncated) {
        err << "interrupted: partial report written with a truncation marker\n";
        return kExitInterrupted;
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace fairwrite::cli
