#include "fairwrite/eval/runner.hpp"

#include <atomic>

#include <gtest/gtest.h>

#include "run_config.hpp"
#include "support.hpp"

namespace fairwrite::eval {
namespace {

using testing_support::hermetic_dir;

/// Delegates to another model; fails prompts containing `poison` and raises
/// `cancel` once `cancel_after` calls have been made.
class WrappedChat : public ChatModel {
 public:
  explicit WrappedChat(ChatModel& inner) : inner_(inner) {}
  std::string generate(std::span<const ChatMessage> messages) override {
    const auto n = ++calls_;
    if (cancel_ != nullptr && n >= cancel_after_) cancel_->store(true);
    if (!poison_.empty() && messages.back().content.find(poison_) != std::string::npos) {
      throw ProviderError("injected outage", true);
    }
    return inner_.generate(messages);
  }
  const std::string& model_id() const override { return inner_.model_id(); }

  std::string poison_;
  std::atomic<bool>* cancel_ = nullptr;
  int cancel_after_ = 0;

 private:
  ChatModel& inner_;
  std::atomic<int> calls_{0};
};

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = cli::load_run_config(hermetic_dir() / "config.json", {});
    runtime_ = cli::build_runtime(config_);
  }
  DebiasPipeline pipeline_with(ChatModel& llm) const {
    return DebiasPipeline(*runtime_.lexicon, config_.detection, *runtime_.embedder, llm,
                          *runtime_.templates, config_.response_instruction);
  }

  cli::RunConfig config_;
  cli::Runtime runtime_;
};

TEST_F(RunnerTest, ReportIsIndependentOfWorkerCount) {
  const auto instances = load_winobias(hermetic_dir() / "winobias_20.jsonl");
  std::string reference;
  for (std::size_t workers : {1u, 2u, 8u}) {
    EvalOptions options;
    options.workers = workers;
    const std::string rendered =
        render_report_json(run_winobias(instances, "gender", *runtime_.pipeline, options));
    if (reference.empty()) {
      reference = rendered;
    } else {
      EXPECT_EQ(rendered, reference) << "workers=" << workers;
    }
  }
}

TEST_F(RunnerTest, OtherAttributesAreSkipped) {
  const auto instances = load_stereoset(hermetic_dir() / "stereoset_20.json");
  const MetricReport report = run_stereoset(instances, "gender", *runtime_.pipeline);
  EXPECT_EQ(report.counts.at("instances"), 20);
  EXPECT_EQ(report.counts.at("evaluated"), 8);
  EXPECT_EQ(report.counts.at("skipped"), 12);
  EXPECT_EQ(report.counts.at("errors"), 0);
  EXPECT_EQ(report.per_instance.size(), 20u);
  std::size_t skipped_rows = 0;
  for (const auto& row : report.per_instance) skipped_rows += row["status"] == "skipped";
  EXPECT_EQ(skipped_rows, 12u);
  EXPECT_TRUE(report.metrics.contains("ss_reduction"));
}

TEST_F(RunnerTest, ErrorsWithinBudgetAreCounted) {
  auto instances = load_winobias(hermetic_dir() / "winobias_20.jsonl");
  instances[3].sentence_with_blank = "POISON " + instances[3].sentence_with_blank;
  WrappedChat llm(*runtime_.llm);
  llm.poison_ = "POISON";
  EvalOptions options;
  options.workers = 4;
  const MetricReport report = run_winobias(instances, "gender", pipeline_with(llm), options);
  EXPECT_EQ(report.counts.at("errors"), 1);
  EXPECT_EQ(report.counts.at("evaluated"), 19);
  EXPECT_EQ(report.per_instance[3]["status"], "error");
  const auto& metrics = report.metrics;
  EXPECT_NEAR(metrics.at("p_male_after") + metrics.at("p_female_after") +
                  metrics.at("p_neutral_after"),
              1.0, 1e-12);
}

TEST_F(RunnerTest, ErrorBudgetExceededFailsTheRun) {
  auto instances = load_winobias(hermetic_dir() / "winobias_20.jsonl");
  for (std::size_t i = 0; i < 3; ++i) {
    instances[i].sentence_with_blank = "POISON " + instances[i].sentence_with_blank;
  }
  WrappedChat llm(*runtime_.llm);
  llm.poison_ = "POISON";
  EXPECT_THROW(run_winobias(instances, "gender", pipeline_with(llm)), EvalFailed);
  EvalOptions lenient;
  lenient.max_error_fraction = 0.2;
  EXPECT_NO_THROW(run_winobias(instances, "gender", pipeline_with(llm), lenient));
}

TEST_F(RunnerTest, CancellationTruncates) {
  const auto instances = load_winobias(hermetic_dir() / "winobias_20.jsonl");
  std::atomic<bool> cancel{false};
  WrappedChat llm(*runtime_.llm);
  llm.cancel_ = &cancel;
  llm.cancel_after_ = 5;
  EvalOptions options;
  options.cancel = &cancel;
  const MetricReport report = run_winobias(instances, "gender", pipeline_with(llm), options);
  EXPECT_TRUE(report.truncated);
  EXPECT_GT(report.counts.at("not_run"), 0);
  EXPECT_EQ(report.counts.at("evaluated") + report.counts.at("not_run"), 20);
}

TEST_F(RunnerTest, BoldNeedsAllClassifiers) {
  const auto prompts = load_bold(hermetic_dir() / "gender_prompt.json");
  RoutingClassifier partial;
  partial.route(ClassifierKind::kToxicity, runtime_.classifier);
  try {
    run_bold(prompts, "gender", *runtime_.pipeline, &partial);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'regard'"), std::string::npos);
  }
  EXPECT_THROW(run_bold(prompts, "gender", *runtime_.pipeline, nullptr), ConfigError);
  const MetricReport report = run_bold(prompts, "gender", *runtime_.pipeline, runtime_.classifier.get());
  EXPECT_GT(report.metrics.at("toxicity_reduction_pct"), 0.0);
  EXPECT_EQ(report.counts.at("rewritten") + report.counts.at("passed_through"), 20);
}

TEST_F(RunnerTest, PromptsAndTable) {
  const auto instances = load_stereoset(hermetic_dir() / "stereoset_20.json");
  const std::string prompt = stereoset_prompt(instances[0]);
  EXPECT_NE(prompt.find("Context: " + instances[0].context), std::string::npos);
  EXPECT_NE(prompt.find("A. " + instances[0].options[0].text), std::string::npos);
  BoldPrompt bold{"Jane is", "gender", 2};
  EXPECT_EQ(bold_prompt(bold), "Complete the following text: Jane is");
  const MetricReport report = run_stereoset(instances, "race", *runtime_.pipeline);
  const std::string table = render_table(report);
  EXPECT_NE(table.find("race"), std::string::npos);
  const auto doc = to_json(report);
  EXPECT_EQ(doc["task"], "stereoset");
  EXPECT_EQ(render_report_json(report).back(), '\n');
}

}  // namespace
}  // namespace fairwrite::eval
