#include "fairwrite/rewriter.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "fairwrite/serialize.hpp"
#include "support.hpp"

namespace fairwrite {
namespace {

using testing_support::axis_lexicon;
using testing_support::MapEmbedder;
using testing_support::TempDir;

const std::vector<std::string> kOptions{"He/his", "She/her", "They/them"};

MapEmbedder demo_embedder() {
  return MapEmbedder(3, {{"He was bossy.", Embedding{1.0, 0.0, 0.15}},
                         {"The weather is nice.", Embedding{0.0, 0.0, 1.0}},
                         {"He/his", Embedding{1.0, 0.0, 0.15}},
                         {"He was there.", Embedding{0.9, 0.0, -0.9}},
                         {"They were kind.", Embedding{0.0, 0.0, -1.0}}});
}

TEST(RenderTemplateTest, SubstitutesOnceWithoutRescanning) {
  const std::string out =
      render_template("{unpleasant} -> {pleasant}: {original}",
                      {{"unpleasant", "bossy"}, {"pleasant", "fair"}, {"original", "{pleasant}"}});
  EXPECT_EQ(out, "bossy -> fair: {pleasant}");
}

TEST(RenderTemplateTest, UnknownPlaceholderIsConfigError) {
  EXPECT_THROW(render_template("hi {nme}", {}), ConfigError);
  // Non-placeholder braces stay literal.
  EXPECT_EQ(render_template("{\"json\": 1} {} {A}", {}), "{\"json\": 1} {} {A}");
}

TEST(RenderOptionsTest, LettersInOrder) {
  EXPECT_EQ(render_options(kOptions), "A. He/his\nB. She/her\nC. They/them");
}

TEST(TemplateSetTest, DefaultsArePinnedAndStateTheDirective) {
  const TemplateSet set = TemplateSet::defaults();
  EXPECT_EQ(set.get(TaskMode::kChatRewrite).id, "chat_rewrite/v1");
  EXPECT_EQ(set.get(TaskMode::kMultipleChoice).id, "multiple_choice/v1");
  EXPECT_EQ(set.get(TaskMode::kPronounChoice).id, "pronoun_choice/v1");
  for (TaskMode mode : {TaskMode::kChatRewrite, TaskMode::kMultipleChoice, TaskMode::kPronounChoice}) {
    EXPECT_NE(set.get(mode).text.find("while maintaining semantic integrity"), std::string::npos);
  }
}

TEST(TemplateSetTest, MissingMandatoryPlaceholderRejected) {
  TemplateSet set = TemplateSet::defaults();
  EXPECT_THROW(set.set(TaskMode::kChatRewrite, {"x", "Rewrite {original} with {pleasant}"}),
               ConfigError);
  EXPECT_THROW(set.set(TaskMode::kMultipleChoice,
                       {"x", "{unpleasant} {pleasant} {original} but no options"}),
               ConfigError);
  EXPECT_NO_THROW(set.set(TaskMode::kChatRewrite, {"x", "{unpleasant}{pleasant}{original}"}));
}

TEST(TemplateSetTest, DirectoryOverridesOnlyGivenModes) {
  TempDir dir;
  testing_support::write_file(dir / "chat_rewrite.txt",
                              "Swap {unpleasant} for {pleasant}:\n{original}\n");
  const TemplateSet set = TemplateSet::from_directory(dir.path());
  EXPECT_EQ(set.get(TaskMode::kChatRewrite).text, "Swap {unpleasant} for {pleasant}:\n{original}");
  EXPECT_EQ(set.get(TaskMode::kChatRewrite).id.rfind("chat_rewrite/file:", 0), 0u);
  EXPECT_EQ(set.get(TaskMode::kMultipleChoice).id, "multiple_choice/v1");
  EXPECT_THROW(TemplateSet::from_directory(dir / "missing"), ConfigError);
}

TEST(TaskModeTest, RoundTrip) {
  for (TaskMode mode : {TaskMode::kChatRewrite, TaskMode::kMultipleChoice, TaskMode::kPronounChoice}) {
    EXPECT_EQ(parse_task_mode(to_string(mode)), mode);
  }
  EXPECT_THROW(parse_task_mode("essay"), InvalidArgument);
  EXPECT_FALSE(is_choice_mode(TaskMode::kChatRewrite));
  EXPECT_TRUE(is_choice_mode(TaskMode::kPronounChoice));
}

TEST(PipelineTest, BiasedResponseIsRewrittenOnce) {
  const Lexicon lex = axis_lexicon();
  MapEmbedder embedder = demo_embedder();
  ScriptedChatModel llm({"He was bossy.", "They were kind."});
  DebiasPipeline pipeline(lex, {}, embedder, llm);
  const DebiasOutcome out = pipeline.run("Describe the manager.", "gender", TaskMode::kChatRewrite);
  EXPECT_FALSE(out.passed_through);
  ASSERT_TRUE(out.rewritten.has_value());
  EXPECT_EQ(*out.rewritten, "They were kind.");
  EXPECT_EQ(out.effective(), "They were kind.");
  EXPECT_EQ(out.resolution->pleasant_word, "fair");
  const auto transcript = llm.transcript();
  ASSERT_EQ(transcript.size(), 2u);
  EXPECT_EQ(transcript[0].back().content, "Describe the manager.");
  const std::string& instruction = transcript[1].back().content;
  EXPECT_EQ(instruction, out.instruction->rendered_text);
  EXPECT_NE(instruction.find("\"male\""), std::string::npos);
  EXPECT_NE(instruction.find("\"bossy\""), std::string::npos);
  EXPECT_NE(instruction.find("\"fair\""), std::string::npos);
  EXPECT_NE(instruction.find("He was bossy."), std::string::npos);
  // No re-detection of the rewrite.
  EXPECT_EQ(embedder.seen(), std::vector<std::string>{"He was bossy."});
}

TEST(PipelineTest, PassThroughReturnsOriginalBytes) {
  const Lexicon lex = axis_lexicon();
  MapEmbedder embedder = demo_embedder();
  ScriptedChatModel llm({"The weather is nice.", "He was there."});
  DebiasPipeline pipeline(lex, {}, embedder, llm);
  const DebiasOutcome none = pipeline.run("p", "gender", TaskMode::kChatRewrite);
  EXPECT_TRUE(none.passed_through);
  EXPECT_EQ(none.pass_reason, "no orientation");
  EXPECT_EQ(none.effective(), "The weather is nice.");
  EXPECT_FALSE(none.instruction.has_value());

  const DebiasOutcome weak = pipeline.run("p", "gender", TaskMode::kChatRewrite);
  EXPECT_TRUE(weak.passed_through);
  EXPECT_EQ(weak.pass_reason, "no orientation");
  EXPECT_EQ(llm.transcript().size(), 2u);  // no rewrite calls
}

TEST(PipelineTest, OrientedWithoutUnpleasantMatchPassesThrough) {
  const Lexicon lex = axis_lexicon();
  MapEmbedder embedder(3, {{"x", Embedding{1.0, 0.0, -0.1}}});
  EchoChatModel llm;
  DetectionConfig cfg;
  cfg.epsilon_unpleasant = 0.999;
  const DebiasOutcome out = DebiasPipeline(lex, cfg, embedder, llm)
                                .rewrite("p", "x", "gender", TaskMode::kChatRewrite);
  EXPECT_TRUE(out.passed_through);
  EXPECT_EQ(out.pass_reason, "no unpleasant characteristic");
}

TEST(PipelineTest, DegenerateRepairPassesThroughWithReason) {
  const Lexicon lex = axis_lexicon();
  MapEmbedder embedder(3, {{"x", Embedding{2.0, 0.0, 0.4}}});
  EchoChatModel llm;
  const DebiasOutcome out =
      DebiasPipeline(lex, {}, embedder, llm).rewrite("p", "x", "gender", TaskMode::kChatRewrite);
  EXPECT_TRUE(out.passed_through);
  EXPECT_EQ(out.pass_reason.rfind("no resolution: ", 0), 0u);
  EXPECT_EQ(out.effective(), "x");
}

TEST(PipelineTest, ChoiceModesNeedThreeOptions) {
  const Lexicon lex = axis_lexicon();
  MapEmbedder embedder = demo_embedder();
  ScriptedChatModel llm({"He/his", "They/them"});
  DebiasPipeline pipeline(lex, {}, embedder, llm);
  EXPECT_THROW(pipeline.run("p", "gender", TaskMode::kPronounChoice), InvalidArgument);
  EXPECT_THROW(pipeline.run("p", "gender", TaskMode::kPronounChoice,
                            std::vector<std::string>{"a", "b"}),
               InvalidArgument);
  const DebiasOutcome out =
      pipeline.run("Fill the blank: ___ went home.", "gender", TaskMode::kPronounChoice, kOptions);
  ASSERT_FALSE(out.passed_through);
  EXPECT_EQ(*out.rewritten, "They/them");
  const std::string& text = out.instruction->rendered_text;
  EXPECT_NE(text.find("A. He/his\nB. She/her\nC. They/them"), std::string::npos);
  EXPECT_NE(text.find("Fill the blank: ___ went home."), std::string::npos);
  EXPECT_NE(text.find("gender-neutral"), std::string::npos);
}

TEST(PipelineTest, EmptyModelTextIsProviderError) {
  const Lexicon lex = axis_lexicon();
  MapEmbedder embedder = demo_embedder();
  ScriptedChatModel blank({"  \n"});
  EXPECT_THROW(DebiasPipeline(lex, {}, embedder, blank).run("p", "gender", TaskMode::kChatRewrite),
               ProviderError);
  ScriptedChatModel blank_rewrite({"He was bossy.", ""});
  EXPECT_THROW(
      DebiasPipeline(lex, {}, embedder, blank_rewrite).run("p", "gender", TaskMode::kChatRewrite),
      ProviderError);
}

TEST(PipelineTest, UnknownAttributeFailsBeforeGenerating) {
  const Lexicon lex = axis_lexicon();
  MapEmbedder embedder = demo_embedder();
  ScriptedChatModel llm({"He was bossy."});
  EXPECT_THROW(DebiasPipeline(lex, {}, embedder, llm).run("p", "age", TaskMode::kChatRewrite),
               NotFound);
  EXPECT_TRUE(llm.transcript().empty());
}

TEST(SerializeTest, OutcomeJsonIsStable) {
  const Lexicon lex = axis_lexicon();
  MapEmbedder embedder = demo_embedder();
  auto run_once = [&] {
    ScriptedChatModel llm({"He was bossy.", "They were kind."});
    return to_json(DebiasPipeline(lex, {}, embedder, llm).run("p", "gender", TaskMode::kChatRewrite))
        .dump(2);
  };
  const std::string first = run_once();
  EXPECT_EQ(first, run_once());
  const auto doc = nlohmann::json::parse(first);
  EXPECT_EQ(doc["resolution"]["pleasant_word"], "fair");
  EXPECT_EQ(doc["instruction"]["template_id"], "chat_rewrite/v1");
  EXPECT_FALSE(doc["report"].contains("response_embedding"));
  EXPECT_EQ(round6(-1e-9), 0.0);
  EXPECT_FALSE(std::signbit(round6(-1e-9)));
}

}  // namespace
}  // namespace fairwrite
