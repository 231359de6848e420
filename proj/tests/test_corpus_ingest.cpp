#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "notional/conll.hpp"
#include "notional/genre.hpp"
#include "support/conll_text.hpp"
#include "support/paths.hpp"

using namespace notional;
namespace fs = std::filesystem;

namespace {

using conll_text::Row;

std::string conll(const conll_text::Sentences& s, const std::string& id = "nw/wsj/00/wsj_0001") {
  return conll_text::render(s, id);
}

std::vector<std::vector<Row>> government_sentence() {
  return {{{"the", "DT", "(TOP(S(NP*", "(3"},
           {"government", "NN", "*)", "3)"},
           {"said", "VBD", "(VP*", "-", "*", "say"},
           {"it", "PRP", "(SBAR(S(NP*)", "(3)"},
           {"agreed", "VBD", "(VP*))))", "-", "*", "agree"},
           {".", ".", "*))"}}};
}

std::vector<fs::path> fixture_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(paths::fixtures() / "corpus"))
    if (e.is_regular_file()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(ParseConll, SingleTokenMention) {
  auto doc = parse_conll(conll(government_sentence()), "d");
  ASSERT_EQ(doc.chains.size(), 1u);
  const auto& ms = doc.chains[0].mentions;
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_EQ(ms[1].entity_id, 3);
  EXPECT_EQ(ms[1].span, (Span{3, 3}));
  EXPECT_EQ(ms[0].span, (Span{0, 1}));
  EXPECT_EQ(ms[0].ordinal_in_chain, 0u);
  EXPECT_EQ(ms[1].ordinal_in_chain, 1u);
}

TEST(ParseConll, NounPhraseUnderClause) {
  auto doc = parse_conll(conll({{{"the", "DT", "(TOP(S(NP*"}, {"government", "NN", "*)"}, {"left", "VBD", "(VP*)))"}}}),
                         "d");
  const auto& tree = doc.sentences[0].tree;
  auto np = std::find_if(tree.nodes.begin(), tree.nodes.end(), [](const ConstituentNode& n) { return n.label == "NP"; });
  ASSERT_NE(np, tree.nodes.end());
  EXPECT_EQ(np->span, (Span{0, 1}));
  ASSERT_TRUE(np->parent);
  EXPECT_EQ(tree.node(*np->parent).label, "S");
}

TEST(ParseConll, NoCorefMeansNoChains) {
  auto doc = parse_conll(conll({{{"it", "PRP", "(TOP(S(NP*)"}, {"rains", "VBZ", "(VP*)))"}}}), "d");
  EXPECT_TRUE(doc.chains.empty());
  EXPECT_EQ(doc.token_count, 2u);
}

TEST(ParseConll, LemmaAndSpeakerDashesAreEmpty) {
  auto doc = parse_conll(conll(government_sentence()), "d");
  EXPECT_EQ(doc.token(2).lemma, "say");
  EXPECT_EQ(doc.token(0).lemma, "");
  EXPECT_EQ(doc.token(0).speaker, "");
}

TEST(ParseConll, UnbalancedParseNamesLine) {
  auto rows = government_sentence();
  rows[0][5].parse = "*)";  // one close missing
  try {
    parse_conll(conll(rows), "d");
    FAIL() << "expected MalformedParseError";
  } catch (const MalformedParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
  }
}

TEST(ParseConll, ExtraCloseIsMalformed) {
  auto rows = government_sentence();
  rows[0][5].parse = "*)))";
  EXPECT_THROW(parse_conll(conll(rows), "d"), MalformedParseError);
}

TEST(ParseConll, UnbalancedCorefNamesEntityAndSentence) {
  auto rows = government_sentence();
  rows.push_back({{"they", "PRP", "(TOP(S(NP*)", "(9"}, {"left", "VBD", "(VP*)))"}});
  try {
    parse_conll(conll(rows), "d");
    FAIL() << "expected MalformedCorefError";
  } catch (const MalformedCorefError& e) {
    EXPECT_EQ(e.entity_id(), 9);
    EXPECT_EQ(e.sentence(), 1u);
  }
}

TEST(ParseConll, CloseWithoutOpen) {
  auto rows = government_sentence();
  rows[0][0].coref = "-";
  EXPECT_THROW(parse_conll(conll(rows), "d"), MalformedCorefError);
}

TEST(ParseConll, WrongColumnCount) {
  std::string text = "a\t0\t0\tit\tPRP\t(TOP*)\t-\t-\n";
  EXPECT_THROW(parse_conll(text, "d"), FormatError);
  std::string ragged = conll(government_sentence());
  ragged.insert(ragged.find("\tagree\t"), "\textra");
  EXPECT_THROW(parse_conll(ragged, "d"), FormatError);
}

TEST(ParseConll, ChainsArePartScoped) {
  std::string id = "wb/eng/00/eng_9999";
  std::string part0 = conll({{{"the", "DT", "(TOP(S(NP*", "(1"}, {"team", "NN", "*)", "1)"}, {"won", "VBD", "(VP*)))"}}}, id);
  std::string part1 = conll({{{"they", "PRP", "(TOP(S(NP*)", "(1)"}, {"lost", "VBD", "(VP*)))"}}}, id);
  auto doc = parse_conll(part0 + part1, id);
  EXPECT_EQ(doc.part_ids.size(), 2u);
  EXPECT_EQ(doc.token_count, 5u);
  ASSERT_EQ(doc.chains.size(), 2u);
  EXPECT_EQ(doc.chains[0].part, 0u);
  EXPECT_EQ(doc.chains[1].part, 1u);
  EXPECT_EQ(doc.chains[1].mentions[0].span, (Span{3, 3}));
  EXPECT_EQ(doc.sentences[1].part, 1u);
}

TEST(ParseConll, NamedEntitiesAreRead) {
  auto doc = parse_conll(
      conll({{{"CNN", "NNP", "(TOP(S(NP*)", "-", "(ORG)"}, {"is", "VBZ", "(VP*", "-", "*"}, {"here", "RB", "(ADVP*))))", "-", "*"}}}),
      "d");
  ASSERT_EQ(doc.sentences[0].entities.size(), 1u);
  EXPECT_EQ(doc.sentences[0].entities[0].type, "ORG");
  EXPECT_EQ(doc.sentences[0].entities[0].span, (Span{0, 0}));
}

TEST(HeaderDocId, ReadsBeginLine) {
  EXPECT_EQ(header_doc_id("#begin document (bc/cnn/00/cnn_0001); part 000\n"), "bc/cnn/00/cnn_0001");
  EXPECT_FALSE(header_doc_id("x\n"));
}

TEST(AssignGenre, DefaultMapExamples) {
  const auto map = GenreMap::defaults();
  EXPECT_EQ(assign_genre("nw/wsj/00/wsj_0001", map), Genre::news);
  EXPECT_EQ(assign_genre("pt/nt/40/40_matthew", map), Genre::bible);
  EXPECT_EQ(assign_genre("bc/cnn/00/cnn_0001", map), Genre::bc_conv);
  EXPECT_EQ(assign_genre("bn/abc/00/abc_0004", map), Genre::bc_news);
  EXPECT_EQ(assign_genre("tc/ch/00/ch_0005", map), Genre::phone);
  EXPECT_EQ(assign_genre("wb/eng/00/eng_0007", map), Genre::web);
}

TEST(AssignGenre, LongestPrefixWins) {
  const auto map = GenreMap::defaults();
  EXPECT_EQ(assign_genre("nw/p2.5_a2e/00/p2.5_a2e_0016", map), Genre::translations);
  EXPECT_EQ(assign_genre("wb/c2e/00/c2e_0017", map), Genre::translations);
}

TEST(AssignGenre, UnmappedThrows) {
  try {
    assign_genre("zz/unknown/doc", GenreMap::defaults());
    FAIL();
  } catch (const UnmappedDocumentError& e) {
    EXPECT_EQ(e.doc_id(), "zz/unknown/doc");
  }
}

TEST(GenreMap, ParsesFileAndRejectsUnknownGenre) {
  auto map = GenreMap::parse("# comment\nzz/\tweb\n\nzz/special/\tbible\n");
  EXPECT_EQ(assign_genre("zz/x", map), Genre::web);
  EXPECT_EQ(assign_genre("zz/special/x", map), Genre::bible);
  EXPECT_THROW(GenreMap::parse("zz/\tpoetry\n"), FormatError);
  EXPECT_THROW(GenreMap::parse("zz/ web\n"), FormatError);
}

TEST(GenreMap, ShippedFileMatchesDefaults) {
  auto shipped = GenreMap::load(paths::data() / "genre_map.tsv");
  for (const auto& f : fixture_files()) {
    auto id = *header_doc_id(text::read_file(f));
    EXPECT_EQ(assign_genre(id, shipped), assign_genre(id, GenreMap::defaults())) << id;
  }
}

// Every well-formed fixture file reproduces its parse and coreference
// columns byte for byte from the parsed structures.
TEST(FixtureCorpus, RoundTripsParseAndCorefColumns) {
  for (const auto& f : fixture_files()) {
    const auto content = text::read_file(f);
    const auto doc = parse_conll(content, "x");
    std::size_t t = 0;
    for (auto line : text::lines(content)) {
      auto trimmed = text::trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      auto cols = text::split_ws(trimmed);
      ASSERT_LT(t, doc.token_count) << f;
      const auto& sent = doc.sentence_of(t);
      const auto& tok = doc.token(t);
      EXPECT_EQ(reconstruct_parse_bit(sent, tok.index_in_sentence), cols[5]) << f << " token " << t;
      EXPECT_EQ(coref_column(tok), cols.back()) << f << " token " << t;
      ++t;
    }
    EXPECT_EQ(t, doc.token_count) << f;
  }
}

TEST(FixtureCorpus, MentionCountEqualsOpenBrackets) {
  for (const auto& f : fixture_files()) {
    const auto content = text::read_file(f);
    std::size_t opens = 0;
    for (auto line : text::lines(content)) {
      auto trimmed = text::trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      auto col = text::split_ws(trimmed).back();
      opens += static_cast<std::size_t>(std::count(col.begin(), col.end(), '('));
    }
    const auto doc = parse_conll(content, "x");
    std::size_t mentions = 0;
    for (const auto& c : doc.chains) mentions += c.mentions.size();
    EXPECT_EQ(mentions, opens) << f;
  }
}

TEST(FixtureCorpus, StructuralInvariants) {
  for (const auto& f : fixture_files()) {
    const auto doc = parse_conll(text::read_file(f), "x");
    std::size_t expected = 0;
    for (const auto& s : doc.sentences) {
      for (const auto& tok : s.tokens) EXPECT_EQ(tok.index_in_document, expected++);
      for (const auto& n : s.tree.nodes) {
        if (n.is_leaf()) continue;
        // children tile the parent span in order
        std::size_t next = n.span.start;
        for (auto c : n.children) {
          EXPECT_EQ(s.tree.node(c).span.start, next);
          next = s.tree.node(c).span.end + 1;
        }
        EXPECT_EQ(next, n.span.end + 1);
      }
    }
    EXPECT_EQ(expected, doc.token_count);
    for (const auto& c : doc.chains)
      for (std::size_t i = 0; i < c.mentions.size(); ++i) {
        EXPECT_EQ(c.mentions[i].ordinal_in_chain, i);
        if (i) {
          EXPECT_LT(c.mentions[i - 1].span, c.mentions[i].span);
        }
      }
  }
}

TEST(FixtureCorpus, GenreAssignmentIsTotalAndCoversAllGenres) {
  std::set<Genre> seen;
  for (const auto& f : fixture_files()) {
    auto id = header_doc_id(text::read_file(f));
    ASSERT_TRUE(id) << f;
    seen.insert(assign_genre(*id, GenreMap::defaults()));
  }
  EXPECT_EQ(seen.size(), kAllGenres.size());
}
