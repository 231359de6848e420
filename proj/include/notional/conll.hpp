#pragma once

// CoNLL-2012 coreference format reader.
//
// Columns per token row: doc id, part, word index, word, POS, parse bit,
// predicate lemma, frameset, word sense, speaker, named entity, zero or more
// predicate-argument columns, coreference. Sentences are separated by blank
// lines, parts by `#begin document (<id>); part NNN` / `#end document`.
//
// All spans are inclusive and expressed in document token indices; parts of a
// multi-part document are concatenated into one token stream.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "notional/errors.hpp"
#include "notional/genre.hpp"
#include "notional/text.hpp"

namespace notional {

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start + 1; }
  bool contains(std::size_t i) const { return start <= i && i <= end; }
  bool contains(const Span& o) const { return start <= o.start && o.end <= end; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

inline std::string to_string(const Span& s) {
  return std::to_string(s.start) + "-" + std::to_string(s.end);
}

inline std::optional<Span> parse_span(std::string_view s) {
  auto dash = s.find('-');
  if (dash == std::string_view::npos) return std::nullopt;
  auto a = text::parse_int(s.substr(0, dash));
  auto b = text::parse_int(s.substr(dash + 1));
  if (!a || !b || *a < 0 || *b < *a) return std::nullopt;
  return Span{static_cast<std::size_t>(*a), static_cast<std::size_t>(*b)};
}

enum class Boundary { open, close, open_close };

struct CorefTag {
  int entity_id = 0;
  Boundary boundary = Boundary::open_close;
  friend bool operator==(const CorefTag&, const CorefTag&) = default;
};

struct Token {
  std::size_t index_in_sentence = 0;
  std::size_t index_in_document = 0;
  std::string form;
  std::string pos;
  std::string parse_bit;
  std::string lemma;    // predicate lemma column; empty when "-"
  std::string speaker;  // empty when "-"
  std::string ner_tag;
  std::vector<CorefTag> coref_tags;
};

inline constexpr std::size_t kNoToken = static_cast<std::size_t>(-1);

struct ConstituentNode {
  std::string label;
  Span span;
  std::vector<std::size_t> children;
  std::optional<std::size_t> parent;
  std::size_t head_token = kNoToken;

  bool is_leaf() const { return children.empty(); }
};

/// Node arena for one sentence. `leaves[i]` is the leaf node of the sentence's
/// i-th token.
struct ParseTree {
  std::vector<ConstituentNode> nodes;
  std::size_t root = 0;
  std::vector<std::size_t> leaves;

  const ConstituentNode& node(std::size_t i) const { return nodes[i]; }
};

struct NamedEntity {
  std::string type;
  Span span;
};

struct Sentence {
  std::size_t part = 0;
  std::vector<Token> tokens;
  ParseTree tree;
  std::vector<NamedEntity> entities;

  Span span() const { return {tokens.front().index_in_document, tokens.back().index_in_document}; }
};

struct Mention {
  int entity_id = 0;
  std::size_t part = 0;
  std::size_t sentence_index = 0;
  Span span;
  std::size_t head_token = kNoToken;
  std::size_t ordinal_in_chain = 0;
};

/// Chains are part-scoped: the same entity id in two parts is two chains.
struct CorefChain {
  std::size_t part = 0;
  int entity_id = 0;
  std::vector<Mention> mentions;
};

struct Document {
  std::string doc_id;
  std::optional<Genre> genre;
  std::vector<std::string> part_ids;
  std::vector<Sentence> sentences;
  std::size_t token_count = 0;
  std::vector<CorefChain> chains;

  std::size_t sentence_index_of(std::size_t doc_token) const {
    auto it = std::upper_bound(sentence_starts_.begin(), sentence_starts_.end(), doc_token);
    return static_cast<std::size_t>(it - sentence_starts_.begin()) - 1;
  }
  const Sentence& sentence_of(std::size_t doc_token) const { return sentences[sentence_index_of(doc_token)]; }
  const Token& token(std::size_t doc_token) const {
    const auto& s = sentence_of(doc_token);
    return s.tokens[doc_token - s.tokens.front().index_in_document];
  }
  /// Surface forms of a span joined by single spaces.
  std::string surface(const Span& span) const {
    std::string out;
    for (std::size_t i = span.start; i <= span.end; ++i) {
      if (i > span.start) out += ' ';
      out += token(i).form;
    }
    return out;
  }

  void index_sentences() {
    sentence_starts_.clear();
    for (const auto& s : sentences) sentence_starts_.push_back(s.tokens.front().index_in_document);
  }

 private:
  std::vector<std::size_t> sentence_starts_;
};

namespace conll_detail {

struct Row {
  std::size_t line = 0;
  std::vector<std::string_view> cols;
};

inline constexpr std::size_t kMinColumns = 12;

inline ParseTree build_tree(const std::vector<Row>& rows, std::vector<Token>& tokens) {
  ParseTree tree;
  std::vector<std::size_t> stack;
  bool have_root = false;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const std::string& bit = tokens[t].parse_bit;
    const std::size_t line = rows[t].line;
    const std::size_t doc_index = tokens[t].index_in_document;
    bool seen_leaf = false;
    std::size_t i = 0;
    while (i < bit.size()) {
      char c = bit[i];
      if (c == '(') {
        std::size_t j = i + 1;
        while (j < bit.size() && bit[j] != '(' && bit[j] != '*' && bit[j] != ')') ++j;
        if (j == i + 1) throw MalformedParseError(line, "constituent without label in '" + bit + "'");
        if (seen_leaf) throw MalformedParseError(line, "constituent opens after the leaf in '" + bit + "'");
        ConstituentNode node;
        node.label = bit.substr(i + 1, j - i - 1);
        node.span = {doc_index, doc_index};
        if (!stack.empty()) {
          node.parent = stack.back();
        } else if (have_root) {
          throw MalformedParseError(line, "second root constituent");
        }
        have_root = true;
        tree.nodes.push_back(std::move(node));
        std::size_t id = tree.nodes.size() - 1;
        if (!stack.empty()) tree.nodes[stack.back()].children.push_back(id);
        else tree.root = id;
        stack.push_back(id);
        i = j;
      } else if (c == '*') {
        if (seen_leaf) throw MalformedParseError(line, "more than one '*' in '" + bit + "'");
        if (stack.empty()) throw MalformedParseError(line, "token outside any constituent");
        seen_leaf = true;
        ConstituentNode leaf;
        leaf.label = tokens[t].pos;
        leaf.span = {doc_index, doc_index};
        leaf.parent = stack.back();
        leaf.head_token = doc_index;
        tree.nodes.push_back(std::move(leaf));
        std::size_t id = tree.nodes.size() - 1;
        tree.nodes[stack.back()].children.push_back(id);
        tree.leaves.push_back(id);
        ++i;
      } else if (c == ')') {
        if (!seen_leaf) throw MalformedParseError(line, "')' before the leaf in '" + bit + "'");
        if (stack.empty()) throw MalformedParseError(line, "unbalanced ')'");
        tree.nodes[stack.back()].span.end = doc_index;
        stack.pop_back();
        ++i;
      } else {
        throw MalformedParseError(line, std::string("unexpected character '") + c + "' in parse bit");
      }
    }
    if (!seen_leaf) throw MalformedParseError(line, "missing '*' in parse bit '" + bit + "'");
  }
  if (!stack.empty())
    throw MalformedParseError(rows.back().line, std::to_string(stack.size()) + " unclosed constituent(s)");
  return tree;
}

inline std::vector<NamedEntity> read_entities(const std::vector<Row>& rows, const std::vector<Token>& tokens) {
  std::vector<NamedEntity> out;
  std::optional<NamedEntity> open;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    std::string_view tag = tokens[t].ner_tag;
    std::size_t idx = tokens[t].index_in_document;
    if (!tag.empty() && tag.front() == '(') {
      if (open) throw FormatError("line " + std::to_string(rows[t].line) + ": nested named entity");
      auto stop = tag.find_first_of("*)");
      open = NamedEntity{std::string(tag.substr(1, stop == std::string_view::npos ? tag.npos : stop - 1)),
                         {idx, idx}};
    }
    if (!tag.empty() && tag.back() == ')') {
      if (!open) throw FormatError("line " + std::to_string(rows[t].line) + ": unbalanced named entity");
      open->span.end = idx;
      out.push_back(*open);
      open.reset();
    }
  }
  if (open) throw FormatError("line " + std::to_string(rows.back().line) + ": unclosed named entity");
  return out;
}

inline std::vector<CorefTag> read_coref(std::string_view col, std::size_t line) {
  std::vector<CorefTag> tags;
  if (col == "-") return tags;
  for (auto piece : text::split(col, '|')) {
    bool opens = !piece.empty() && piece.front() == '(';
    bool closes = !piece.empty() && piece.back() == ')';
    auto digits = piece.substr(opens ? 1 : 0);
    if (closes) digits.remove_suffix(1);
    auto id = text::parse_int(digits);
    if (!id || (!opens && !closes))
      throw FormatError("line " + std::to_string(line) + ": bad coreference field '" + std::string(col) + "'");
    tags.push_back({static_cast<int>(*id),
                    opens && closes ? Boundary::open_close : (opens ? Boundary::open : Boundary::close)});
  }
  return tags;
}

}  // namespace conll_detail

/// Parses one file into a Document. The genre is left unset; see load_document.
inline Document parse_conll(std::string_view file_text, std::string doc_id) {
  using namespace conll_detail;
  Document doc;
  doc.doc_id = std::move(doc_id);

  std::vector<Mention> mentions;
  std::vector<Row> pending;
  std::size_t part = 0;
  std::size_t doc_index = 0;

  auto flush = [&]() {
    if (pending.empty()) return;
    Sentence sent;
    sent.part = part;
    const std::size_t ncols = pending.front().cols.size();
    const std::size_t sentence_index = doc.sentences.size();
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto& row = pending[i];
      if (row.cols.size() < kMinColumns)
        throw FormatError("line " + std::to_string(row.line) + ": expected at least " +
                          std::to_string(kMinColumns) + " columns, found " + std::to_string(row.cols.size()));
      if (row.cols.size() != ncols)
        throw FormatError("line " + std::to_string(row.line) + ": column count " +
                          std::to_string(row.cols.size()) + " differs from sentence's " + std::to_string(ncols));
      auto word_index = text::parse_int(row.cols[2]);
      if (!word_index || static_cast<std::size_t>(*word_index) != i)
        throw FormatError("line " + std::to_string(row.line) + ": word index " + std::string(row.cols[2]) +
                          " out of sequence");
      Token tok;
      tok.index_in_sentence = i;
      tok.index_in_document = doc_index++;
      tok.form = row.cols[3];
      tok.pos = row.cols[4];
      tok.parse_bit = row.cols[5];
      if (row.cols[6] != "-") tok.lemma = row.cols[6];
      if (row.cols[9] != "-") tok.speaker = row.cols[9];
      tok.ner_tag = row.cols[10];
      tok.coref_tags = read_coref(row.cols.back(), row.line);
      sent.tokens.push_back(std::move(tok));
    }
    sent.tree = build_tree(pending, sent.tokens);
    sent.entities = read_entities(pending, sent.tokens);

    std::map<int, std::vector<std::size_t>> open;
    for (const auto& tok : sent.tokens) {
      for (const auto& tag : tok.coref_tags) {
        const std::size_t idx = tok.index_in_document;
        if (tag.boundary == Boundary::open) {
          open[tag.entity_id].push_back(idx);
          continue;
        }
        std::size_t start = idx;
        if (tag.boundary == Boundary::close) {
          auto it = open.find(tag.entity_id);
          if (it == open.end() || it->second.empty())
            throw MalformedCorefError(tag.entity_id, sentence_index, "close without open");
          start = it->second.back();
          it->second.pop_back();
        }
        mentions.push_back({tag.entity_id, part, sentence_index, {start, idx}, kNoToken, 0});
      }
    }
    for (const auto& [entity, starts] : open)
      if (!starts.empty()) throw MalformedCorefError(entity, sentence_index, "open without close");

    doc.sentences.push_back(std::move(sent));
    pending.clear();
  };

  std::size_t line_no = 0;
  for (auto line : text::lines(file_text)) {
    ++line_no;
    auto t = text::trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    if (t.starts_with("#begin document")) {
      flush();
      part = doc.part_ids.size();
      doc.part_ids.emplace_back(text::trim(t.substr(std::string_view("#begin document").size())));
      continue;
    }
    if (t.starts_with("#end document")) {
      flush();
      continue;
    }
    if (t.front() == '#') continue;
    pending.push_back({line_no, text::split_ws(t)});
  }
  flush();

  doc.token_count = doc_index;
  if (doc.sentences.empty()) return doc;
  doc.index_sentences();

  std::map<std::pair<std::size_t, int>, CorefChain> by_entity;
  for (const auto& m : mentions) {
    auto& chain = by_entity[{m.part, m.entity_id}];
    chain.part = m.part;
    chain.entity_id = m.entity_id;
    chain.mentions.push_back(m);
  }
  for (auto& [key, chain] : by_entity) {
    auto& ms = chain.mentions;
    std::sort(ms.begin(), ms.end(), [](const Mention& a, const Mention& b) { return a.span < b.span; });
    ms.erase(std::unique(ms.begin(), ms.end(), [](const Mention& a, const Mention& b) { return a.span == b.span; }),
             ms.end());
    for (std::size_t i = 0; i < ms.size(); ++i) ms[i].ordinal_in_chain = i;
    doc.chains.push_back(std::move(chain));
  }
  std::sort(doc.chains.begin(), doc.chains.end(), [](const CorefChain& a, const CorefChain& b) {
    return a.mentions.front().span < b.mentions.front().span;
  });
  return doc;
}

/// Document id from the first `#begin document (<id>)` line, if any.
inline std::optional<std::string> header_doc_id(std::string_view file_text) {
  for (auto line : text::lines(file_text)) {
    auto t = text::trim(line);
    if (!t.starts_with("#begin document")) continue;
    auto open = t.find('(');
    auto close = t.find(')', open);
    if (open == std::string_view::npos || close == std::string_view::npos) return std::nullopt;
    return std::string(t.substr(open + 1, close - open - 1));
  }
  return std::nullopt;
}

inline Document load_document(std::string_view file_text, std::string doc_id, const GenreMap& genres) {
  Document doc = parse_conll(file_text, std::move(doc_id));
  doc.genre = assign_genre(doc.doc_id, genres);
  return doc;
}

/// Parse bit of a token rebuilt from the constituent tree.
inline std::string reconstruct_parse_bit(const Sentence& sent, std::size_t index_in_sentence) {
  const auto& tree = sent.tree;
  std::vector<std::size_t> path;
  for (std::optional<std::size_t> n = tree.node(tree.leaves[index_in_sentence]).parent; n; n = tree.node(*n).parent)
    path.push_back(*n);
  const std::size_t idx = sent.tokens[index_in_sentence].index_in_document;
  std::string out;
  for (auto it = path.rbegin(); it != path.rend(); ++it)
    if (tree.node(*it).span.start == idx) out += "(" + tree.node(*it).label;
  out += '*';
  for (std::size_t n : path)
    if (tree.node(n).span.end == idx) out += ')';
  return out;
}

inline std::string coref_column(const Token& tok) {
  if (tok.coref_tags.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < tok.coref_tags.size(); ++i) {
    if (i) out += '|';
    const auto& tag = tok.coref_tags[i];
    auto id = std::to_string(tag.entity_id);
    switch (tag.boundary) {
      case Boundary::open: out += "(" + id; break;
      case Boundary::close: out += id + ")"; break;
      case Boundary::open_close: out += "(" + id + ")"; break;
    }
  }
  return out;
}

}  // namespace notional
