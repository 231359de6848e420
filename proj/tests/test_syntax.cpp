#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "notional/pipeline.hpp"
#include "notional/syntax.hpp"
#include "support/conll_text.hpp"
#include "support/paths.hpp"

using namespace notional;
using conll_text::document;

namespace {

std::size_t node_labelled(const Sentence& s, std::string_view label, std::size_t nth = 0) {
  for (std::size_t i = 0; i < s.tree.nodes.size(); ++i)
    if (s.tree.nodes[i].label == label && nth-- == 0) return i;
  ADD_FAILURE() << "no node " << label;
  return 0;
}

Mention mention_at(const Document& doc, Span span) {
  Mention m;
  m.sentence_index = doc.sentence_index_of(span.start);
  m.span = span;
  m.head_token = mention_head(doc.sentences[m.sentence_index], span, HeadRuleTable::defaults());
  return m;
}

const HeadRuleTable& rules() { return HeadRuleTable::defaults(); }

}  // namespace

TEST(FindHead, NounHeadsNounPhrase) {
  auto doc = document({{{"the", "DT", "(TOP(NP*"}, {"government", "NN", "*))"}}});
  const auto& s = doc.sentences[0];
  EXPECT_EQ(find_head(s, node_labelled(s, "NP"), rules()), 1u);
}

TEST(FindHead, PostmodifierDoesNotHead) {
  auto doc = document({{{"the", "DT", "(TOP(NP(NP*"},
                        {"majority", "NN", "*)"},
                        {"of", "IN", "(PP*"},
                        {"voters", "NNS", "(NP*))))"}}});
  const auto& s = doc.sentences[0];
  EXPECT_EQ(find_head(s, node_labelled(s, "NP"), rules()), 1u);
}

TEST(FindHead, VerbHeadsVerbPhrase) {
  auto doc = document({{{"CNN", "NNP", "(TOP(S(NP*)"},
                        {"is", "VBZ", "(VP*"},
                        {"my", "PRP$", "(NP*"},
                        {"wire", "NN", "*"},
                        {"service", "NN", "*))))"}}});
  const auto& s = doc.sentences[0];
  EXPECT_EQ(find_head(s, node_labelled(s, "VP"), rules()), 1u);
  EXPECT_EQ(find_head(s, node_labelled(s, "S"), rules()), 1u);
}

TEST(FindHead, AuxiliaryPassesHeadToComplement) {
  auto doc = document({{{"they", "PRP", "(TOP(S(NP*)"},
                        {"were", "VBD", "(VP*"},
                        {"repelled", "VBN", "(VP*))))"}}});
  const auto& s = doc.sentences[0];
  EXPECT_EQ(find_head(s, node_labelled(s, "VP"), rules()), 2u);
}

TEST(FindHead, HeadIsInsideSpanAndStable) {
  RunConfig cfg;
  cfg.corpus = paths::fixtures() / "corpus";
  cfg.log = nullptr;
  for (const auto& doc : load_corpus(cfg))
    for (const auto& s : doc.sentences)
      for (std::size_t i = 0; i < s.tree.nodes.size(); ++i) {
        const auto h = find_head(s, i, rules());
        EXPECT_TRUE(s.tree.nodes[i].span.contains(h));
        EXPECT_EQ(h, s.tree.nodes[i].head_token);
        EXPECT_EQ(find_head(s, i, rules()), h);
      }
}

TEST(HeadRules, ShippedFileEqualsBuiltIn) {
  EXPECT_TRUE(HeadRuleTable::load(paths::data() / "head_rules.txt") == HeadRuleTable::defaults());
}

TEST(HeadRules, RejectsBadDirection) {
  EXPECT_THROW(HeadRuleTable::parse("NP\tsideways\tNN\n"), FormatError);
}

TEST(Governor, CopularSubject) {
  auto doc = document({{{"CNN", "NNP", "(TOP(S(NP*)"},
                        {"is", "VBZ", "(VP*"},
                        {"my", "PRP$", "(NP*"},
                        {"wire", "NN", "*"},
                        {"service", "NN", "*))))"}}});
  auto g = governor_of(mention_at(doc, {0, 0}), doc);
  ASSERT_TRUE(g.governor_token);
  EXPECT_EQ(doc.token(*g.governor_token).form, "is");
  EXPECT_EQ(g.function_fine, FineFunction::nsubj);
  EXPECT_EQ(g.function_coarse, CoarseFunction::subj);
}

TEST(Governor, PossessivePronoun) {
  auto doc = document({{{"add", "VB", "(TOP(VP*"},
                        {"Nuggets", "NNPS", "(NP*"},
                        {"games", "NNS", "*)"},
                        {"to", "IN", "(PP*"},
                        {"their", "PRP$", "(NP*"},
                        {"offerings", "NNS", "*))))"}}});
  auto g = governor_of(mention_at(doc, {4, 4}), doc);
  ASSERT_TRUE(g.governor_token);
  EXPECT_EQ(doc.token(*g.governor_token).form, "offerings");
  EXPECT_TRUE(g.governor_pos.starts_with("NN"));
  EXPECT_EQ(g.function_fine, FineFunction::poss);
  EXPECT_EQ(g.function_coarse, CoarseFunction::poss);
}

TEST(Governor, PassiveSubject) {
  auto doc = document({{{"each", "DT", "(TOP(NP(NP*"},
                        {"time", "NN", "*)"},
                        {"they", "PRP", "(SBAR(S(NP*)"},
                        {"were", "VBD", "(VP*"},
                        {"repelled", "VBN", "(VP*))))))"}}});
  auto g = governor_of(mention_at(doc, {2, 2}), doc);
  ASSERT_TRUE(g.governor_token);
  EXPECT_EQ(doc.token(*g.governor_token).form, "repelled");
  EXPECT_EQ(g.function_fine, FineFunction::nsubjpass);
  EXPECT_EQ(g.function_coarse, CoarseFunction::subj);
}

TEST(Governor, ObjectsAndPrepositionalObjects) {
  auto doc = document({{{"she", "PRP", "(TOP(S(NP*)"},
                        {"gave", "VBD", "(VP*"},
                        {"them", "PRP", "(NP*)"},
                        {"the", "DT", "(NP*"},
                        {"plan", "NN", "*)"},
                        {"in", "IN", "(PP*"},
                        {"May", "NNP", "(NP*)))))"}}});
  EXPECT_EQ(governor_of(mention_at(doc, {2, 2}), doc).function_fine, FineFunction::iobj);
  EXPECT_EQ(governor_of(mention_at(doc, {3, 4}), doc).function_fine, FineFunction::dobj);
  auto pobj = governor_of(mention_at(doc, {6, 6}), doc);
  EXPECT_EQ(pobj.function_fine, FineFunction::pobj);
  EXPECT_EQ(doc.token(*pobj.governor_token).form, "in");
}

TEST(Governor, RootMentionHasNoGovernor) {
  auto doc = document({{{"the", "DT", "(TOP(NP*"}, {"committee", "NN", "*))"}}});
  auto g = governor_of(mention_at(doc, {0, 1}), doc);
  EXPECT_FALSE(g.governor_token);
  EXPECT_EQ(g.function_fine, FineFunction::root);
  EXPECT_EQ(g.function_coarse, CoarseFunction::root);
}

TEST(Functions, CoarseningTable) {
  EXPECT_EQ(coarsen(FineFunction::nsubj), CoarseFunction::subj);
  EXPECT_EQ(coarsen(FineFunction::nsubjpass), CoarseFunction::subj);
  EXPECT_EQ(coarsen(FineFunction::dobj), CoarseFunction::obj);
  EXPECT_EQ(coarsen(FineFunction::iobj), CoarseFunction::obj);
  EXPECT_EQ(coarsen(FineFunction::pobj), CoarseFunction::obj);
  EXPECT_EQ(coarsen(FineFunction::poss), CoarseFunction::poss);
  EXPECT_EQ(coarsen(FineFunction::ccomp), CoarseFunction::clausal);
  EXPECT_EQ(coarsen(FineFunction::advcl), CoarseFunction::clausal);
  EXPECT_EQ(coarsen(FineFunction::csubj), CoarseFunction::clausal);
  EXPECT_EQ(coarsen(FineFunction::conj), CoarseFunction::other);
  EXPECT_EQ(coarsen(FineFunction::appos), CoarseFunction::other);
  EXPECT_EQ(coarsen(FineFunction::other), CoarseFunction::other);
  EXPECT_EQ(coarsen(FineFunction::root), CoarseFunction::root);
  for (auto f : kAllFineFunctions) EXPECT_EQ(parse_fine_function(to_string(f)), f);
}

TEST(CollapsePos, PresentTensesMerge) {
  EXPECT_EQ(collapse_pos("VBZ"), "VBpres");
  EXPECT_EQ(collapse_pos("VBP"), "VBpres");
  EXPECT_EQ(collapse_pos("VBD"), "VBD");
  EXPECT_EQ(collapse_pos("NN"), "NN");
}

TEST(FixtureCorpus, GovernorInvariants) {
  RunConfig cfg;
  cfg.corpus = paths::fixtures() / "corpus";
  cfg.log = nullptr;
  std::size_t checked = 0;
  for (const auto& doc : load_corpus(cfg))
    for (const auto& chain : doc.chains)
      for (const auto& m : chain.mentions) {
        auto g = governor_of(m, doc);
        EXPECT_EQ(g.function_coarse, coarsen(g.function_fine));
        if (!g.governor_token) {
          EXPECT_EQ(g.function_fine, FineFunction::root);
          continue;
        }
        if (g.function_fine != FineFunction::poss) {
          EXPECT_FALSE(m.span.contains(*g.governor_token)) << doc.doc_id;
        }
        ++checked;
      }
  EXPECT_GT(checked, 40u);
}
