#pragma once

// Lexical heads by head percolation, and per-mention governor and
// grammatical-function labels derived from the constituent configuration.

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "notional/conll.hpp"
#include "notional/errors.hpp"
#include "notional/text.hpp"

namespace notional {

enum class SearchOrder {
  left,      // for each label in priority order, scan children left to right
  right,     // for each label in priority order, scan children right to left
  leftdis,   // scan children left to right, first child with any listed label
  rightdis,  // scan children right to left, first child with any listed label
};

struct HeadRule {
  SearchOrder order = SearchOrder::left;
  std::vector<std::string> labels;
};

/// Per phrase label, an ordered list of passes; the first pass that matches a
/// child picks the head child. Labels without an entry take the rightmost
/// non-punctuation child.
class HeadRuleTable {
 public:
  /// Format: `LABEL<TAB>left|right|leftdis|rightdis<TAB>CHILD CHILD ...`.
  /// Repeated labels add passes in file order.
  static HeadRuleTable parse(std::string_view content) {
    HeadRuleTable table;
    std::size_t line_no = 0;
    for (auto line : text::lines(content)) {
      ++line_no;
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      auto cells = text::split(t, '\t');
      if (cells.size() < 2 || cells.size() > 3)
        throw FormatError("head rules line " + std::to_string(line_no) + ": expected LABEL, direction, children");
      HeadRule rule;
      auto dir = text::trim(cells[1]);
      if (dir == "left") rule.order = SearchOrder::left;
      else if (dir == "right") rule.order = SearchOrder::right;
      else if (dir == "leftdis") rule.order = SearchOrder::leftdis;
      else if (dir == "rightdis") rule.order = SearchOrder::rightdis;
      else throw FormatError("head rules line " + std::to_string(line_no) + ": unknown direction '" + std::string(dir) + "'");
      if (cells.size() == 3)
        for (auto lab : text::split_ws(cells[2])) rule.labels.emplace_back(lab);
      table.rules_[std::string(text::trim(cells[0]))].push_back(std::move(rule));
    }
    return table;
  }

  static HeadRuleTable load(const std::filesystem::path& path) { return parse(text::read_file(path)); }

  static const HeadRuleTable& defaults() {
    static const HeadRuleTable table = parse(kDefaultRules);
    return table;
  }

  const std::vector<HeadRule>* find(std::string_view label) const {
    auto it = rules_.find(std::string(label));
    return it == rules_.end() ? nullptr : &it->second;
  }

  bool operator==(const HeadRuleTable& o) const {
    if (rules_.size() != o.rules_.size()) return false;
    for (const auto& [label, passes] : rules_) {
      auto other = o.find(label);
      if (!other || other->size() != passes.size()) return false;
      for (std::size_t i = 0; i < passes.size(); ++i)
        if (passes[i].order != (*other)[i].order || passes[i].labels != (*other)[i].labels) return false;
    }
    return true;
  }

  // Penn Treebank head table in the Collins tradition. The NP rule never picks
  // a possessive 's so that possessor NPs keep their noun as head.
  static constexpr std::string_view kDefaultRules =
      "ADJP\tleft\tNNS QP NN $ ADVP JJ VBN VBG ADJP JJR NP JJS DT FW RBR RBS SBAR RB\n"
      "ADVP\tright\tRB RBR RBS FW ADVP TO CD JJR JJ IN NP JJS NN\n"
      "CONJP\tright\tCC RB IN\n"
      "FRAG\tright\n"
      "INTJ\tleft\n"
      "LST\tright\tLS :\n"
      "NAC\tleft\tNN NNS NNP NNPS NP NAC EX $ CD QP PRP VBG JJ JJS JJR ADJP FW\n"
      "NML\trightdis\tNN NNP NNPS NNS NML JJR\n"
      "NP\trightdis\tNN NNP NNPS NNS NML NX JJR\n"
      "NP\tleft\tNP PRP\n"
      "NP\trightdis\t$ ADJP PRN\n"
      "NP\tright\tCD\n"
      "NP\trightdis\tJJ JJS RB QP DT EX WP\n"
      "NX\tleft\n"
      "PP\tleft\tIN TO VBG VBN RP FW\n"
      "PRN\tleft\n"
      "PRT\tright\tRP\n"
      "QP\tleft\t$ IN NNS NN JJ RB DT CD NCD QP JJR JJS\n"
      "RRC\tright\tVP NP ADVP ADJP PP\n"
      "S\tleft\tTO IN VP S SBAR ADJP UCP NP\n"
      "SBAR\tleft\tWHNP WHPP WHADVP WHADJP IN DT S SQ SINV SBAR FRAG\n"
      "SBARQ\tleft\tSQ S SINV SBARQ FRAG\n"
      "SINV\tleft\tVBZ VBD VBP VB MD VP S SINV ADJP NP\n"
      "SQ\tleft\tVBZ VBD VBP VB MD VP SQ\n"
      "TOP\tleft\tS SINV SQ SBARQ FRAG NP\n"
      "UCP\tright\n"
      "VP\tleft\tTO VBD VBN MD VBZ VB VBG VBP VP ADJP NN NNS NP\n"
      "WHADJP\tleft\tCC WRB JJ ADJP\n"
      "WHADVP\tright\tCC WRB\n"
      "WHNP\tleft\tWDT WP WP$ WHADJP WHPP WHNP\n"
      "WHPP\tright\tIN TO FW\n";

 private:
  std::map<std::string, std::vector<HeadRule>, std::less<>> rules_;
};

namespace syntax_detail {

inline bool is_punct(std::string_view label) {
  static const std::set<std::string_view> p = {".", ",", ":", "``", "''", "-LRB-", "-RRB-", "HYPH", "NFP"};
  return p.contains(label);
}

/// Strips function tags and indices (NP-SBJ-1 -> NP) but keeps -LRB- style labels.
inline std::string_view base_label(std::string_view label) {
  if (label.empty() || label.front() == '-') return label;
  auto cut = label.find_first_of("-=");
  return cut == std::string_view::npos ? label : label.substr(0, cut);
}

inline bool is_auxiliary_form(std::string_view lower_form) {
  static const std::set<std::string_view> aux = {
      "be",  "is",   "are",  "was",  "were", "am",     "been",  "being",  "'s",  "'re", "'m",
      "have", "has", "had",  "having", "'ve", "'d",    "do",    "does",   "did", "get", "gets",
      "got", "gotten", "getting", "to", "will", "would", "shall", "should", "can", "could", "may",
      "might", "must", "'ll"};
  return aux.contains(lower_form);
}

inline bool is_passive_auxiliary(std::string_view lower_form) {
  static const std::set<std::string_view> aux = {"be",  "is",  "are",  "was",    "were",   "am",
                                                 "been", "being", "'s", "'re", "'m", "get", "gets",
                                                 "got", "gotten", "getting"};
  return aux.contains(lower_form);
}

inline const Token& leaf_token(const Sentence& sent, const ConstituentNode& leaf) {
  return sent.tokens[leaf.span.start - sent.tokens.front().index_in_document];
}

inline std::size_t choose_head_child(const Sentence& sent, const ConstituentNode& node, const HeadRuleTable& rules) {
  const auto& tree = sent.tree;
  const auto& kids = node.children;
  auto label_of = [&](std::size_t k) { return base_label(tree.node(k).label); };

  auto fallback = [&](bool from_left) {
    if (from_left) {
      for (std::size_t k : kids)
        if (!is_punct(label_of(k))) return k;
      return kids.front();
    }
    for (auto it = kids.rbegin(); it != kids.rend(); ++it)
      if (!is_punct(label_of(*it))) return *it;
    return kids.back();
  };

  std::optional<std::size_t> chosen;
  const auto* passes = rules.find(base_label(node.label));
  if (!passes || passes->empty()) {
    chosen = fallback(false);
  } else {
    for (const auto& pass : *passes) {
      switch (pass.order) {
        case SearchOrder::left:
        case SearchOrder::right:
          for (const auto& want : pass.labels) {
            if (pass.order == SearchOrder::left) {
              for (std::size_t k : kids)
                if (label_of(k) == want) { chosen = k; break; }
            } else {
              for (auto it = kids.rbegin(); it != kids.rend(); ++it)
                if (label_of(*it) == want) { chosen = *it; break; }
            }
            if (chosen) break;
          }
          break;
        case SearchOrder::leftdis:
          for (std::size_t k : kids)
            if (std::find(pass.labels.begin(), pass.labels.end(), label_of(k)) != pass.labels.end()) { chosen = k; break; }
          break;
        case SearchOrder::rightdis:
          for (auto it = kids.rbegin(); it != kids.rend(); ++it)
            if (std::find(pass.labels.begin(), pass.labels.end(), label_of(*it)) != pass.labels.end()) { chosen = *it; break; }
          break;
      }
      if (chosen) break;
    }
    if (!chosen) {
      auto first = passes->front().order;
      chosen = fallback(first == SearchOrder::left || first == SearchOrder::leftdis);
    }
  }

  // Auxiliaries, modals and infinitival "to" pass the head to their VP complement.
  if (base_label(node.label) == "VP" && tree.node(*chosen).is_leaf()) {
    const auto& leaf = tree.node(*chosen);
    const auto form = text::to_lower(leaf_token(sent, leaf).form);
    if (is_auxiliary_form(form) || leaf.label == "MD" || leaf.label == "TO") {
      auto at = std::find(kids.begin(), kids.end(), *chosen);
      for (auto it = at + 1; it != kids.end(); ++it)
        if (label_of(*it) == "VP") return *it;
    }
  }
  return *chosen;
}

inline std::size_t find_head_rec(const Sentence& sent, std::size_t node, const HeadRuleTable& rules) {
  const auto& n = sent.tree.node(node);
  if (n.is_leaf()) return n.span.start;
  return find_head_rec(sent, choose_head_child(sent, n, rules), rules);
}

}  // namespace syntax_detail

/// Lexical head (document token index) of a constituent; always inside its span.
inline std::size_t find_head(const Sentence& sent, std::size_t node, const HeadRuleTable& rules) {
  return syntax_detail::find_head_rec(sent, node, rules);
}

/// Lowest node whose span contains `span`.
inline std::size_t covering_node(const Sentence& sent, const Span& span) {
  const auto& tree = sent.tree;
  std::size_t n = tree.leaves[span.start - sent.tokens.front().index_in_document];
  while (!tree.node(n).span.contains(span) && tree.node(n).parent) n = *tree.node(n).parent;
  return n;
}

inline std::size_t mention_head(const Sentence& sent, const Span& span, const HeadRuleTable& rules) {
  std::size_t node = covering_node(sent, span);
  std::size_t head = find_head(sent, node, rules);
  if (span.contains(head)) return head;
  // Mention is not a constituent: take its last nominal token.
  for (std::size_t i = span.end + 1; i-- > span.start;) {
    const auto& pos = sent.tokens[i - sent.tokens.front().index_in_document].pos;
    if (pos.starts_with("NN") || pos == "PRP") return i;
  }
  return span.end;
}

/// Fills head_token on every constituent and every mention.
inline void annotate_heads(Document& doc, const HeadRuleTable& rules) {
  for (auto& sent : doc.sentences)
    for (std::size_t i = 0; i < sent.tree.nodes.size(); ++i)
      sent.tree.nodes[i].head_token = find_head(sent, i, rules);
  for (auto& chain : doc.chains)
    for (auto& m : chain.mentions) m.head_token = mention_head(doc.sentences[m.sentence_index], m.span, rules);
}

enum class FineFunction { nsubj, nsubjpass, dobj, iobj, poss, pobj, csubj, ccomp, advcl, conj, appos, other, root };
enum class CoarseFunction { subj, obj, poss, clausal, other, root };

inline std::string_view to_string(FineFunction f) {
  switch (f) {
    case FineFunction::nsubj: return "nsubj";
    case FineFunction::nsubjpass: return "nsubjpass";
    case FineFunction::dobj: return "dobj";
    case FineFunction::iobj: return "iobj";
    case FineFunction::poss: return "poss";
    case FineFunction::pobj: return "pobj";
    case FineFunction::csubj: return "csubj";
    case FineFunction::ccomp: return "ccomp";
    case FineFunction::advcl: return "advcl";
    case FineFunction::conj: return "conj";
    case FineFunction::appos: return "appos";
    case FineFunction::other: return "other";
    case FineFunction::root: return "root";
  }
  return "?";
}

inline std::string_view to_string(CoarseFunction f) {
  switch (f) {
    case CoarseFunction::subj: return "subj";
    case CoarseFunction::obj: return "obj";
    case CoarseFunction::poss: return "poss";
    case CoarseFunction::clausal: return "clausal";
    case CoarseFunction::other: return "other";
    case CoarseFunction::root: return "root";
  }
  return "?";
}

inline constexpr std::array<FineFunction, 13> kAllFineFunctions = {
    FineFunction::nsubj, FineFunction::nsubjpass, FineFunction::dobj,  FineFunction::iobj,  FineFunction::poss,
    FineFunction::pobj,  FineFunction::csubj,     FineFunction::ccomp, FineFunction::advcl, FineFunction::conj,
    FineFunction::appos, FineFunction::other,     FineFunction::root};

inline std::optional<FineFunction> parse_fine_function(std::string_view s) {
  for (auto f : kAllFineFunctions)
    if (to_string(f) == s) return f;
  return std::nullopt;
}

/// csubj joins ccomp and advcl under `clausal`.
inline CoarseFunction coarsen(FineFunction f) {
  switch (f) {
    case FineFunction::nsubj:
    case FineFunction::nsubjpass: return CoarseFunction::subj;
    case FineFunction::dobj:
    case FineFunction::iobj:
    case FineFunction::pobj: return CoarseFunction::obj;
    case FineFunction::poss: return CoarseFunction::poss;
    case FineFunction::csubj:
    case FineFunction::ccomp:
    case FineFunction::advcl: return CoarseFunction::clausal;
    case FineFunction::root: return CoarseFunction::root;
    default: return CoarseFunction::other;
  }
}

/// VBP and VBZ become VBpres; every other tag is unchanged.
inline std::string collapse_pos(std::string_view tag) {
  if (tag == "VBP" || tag == "VBZ") return "VBpres";
  return std::string(tag);
}

struct GovernorInfo {
  std::optional<std::size_t> governor_token;
  std::string governor_pos;
  FineFunction function_fine = FineFunction::root;
  CoarseFunction function_coarse = CoarseFunction::root;
};

namespace syntax_detail {

inline bool is_clause(std::string_view l) {
  return l == "S" || l == "SQ" || l == "SINV" || l == "SBARQ";
}

inline bool is_nominal(const ConstituentNode& n) {
  static const std::set<std::string_view> phrases = {"NP", "NML", "NX", "WHNP"};
  static const std::set<std::string_view> tags = {"PRP", "PRP$", "WP", "WP$", "NN", "NNS", "NNP",
                                                  "NNPS", "CD", "DT", "EX"};
  return n.is_leaf() ? tags.contains(n.label) : phrases.contains(base_label(n.label));
}

inline bool is_possessor(const Sentence& sent, const ConstituentNode& n) {
  if (n.is_leaf()) return n.label == "PRP$" || n.label == "WP$";
  if (base_label(n.label) != "NP") return false;
  const auto& last = sent.tree.node(n.children.back());
  return last.is_leaf() && last.label == "POS";
}

inline bool is_passive(const Sentence& sent, std::size_t governor) {
  const auto& tree = sent.tree;
  std::size_t node = tree.leaves[governor - sent.tokens.front().index_in_document];
  if (tree.node(node).label != "VBN") return false;
  while (auto parent = tree.node(node).parent) {
    const auto& p = tree.node(*parent);
    if (base_label(p.label) != "VP") break;
    for (std::size_t k : p.children) {
      if (k == node) break;
      const auto& sib = tree.node(k);
      if (sib.is_leaf() && is_passive_auxiliary(text::to_lower(leaf_token(sent, sib).form))) return true;
    }
    node = *parent;
  }
  return false;
}

inline FineFunction label_function(const Sentence& sent, std::size_t m, std::size_t p, std::size_t governor) {
  const auto& tree = sent.tree;
  const auto& mn = tree.node(m);
  const auto& pn = tree.node(p);
  const auto mlab = base_label(mn.label);
  const auto plab = base_label(pn.label);
  const auto& kids = pn.children;
  const std::size_t mi = static_cast<std::size_t>(std::find(kids.begin(), kids.end(), m) - kids.begin());
  std::size_t hi = 0;
  while (hi < kids.size() && !tree.node(kids[hi]).span.contains(governor)) ++hi;

  if (is_possessor(sent, mn)) return FineFunction::poss;

  if (mlab == "SBAR" || is_clause(mlab)) {
    if (mlab == "SBAR" && !mn.children.empty()) {
      const auto& first = tree.node(mn.children.front());
      if (base_label(first.label) == "WHADVP") return FineFunction::advcl;
      if (first.is_leaf() && first.label == "IN") {
        auto c = text::to_lower(leaf_token(sent, first).form);
        if (c != "that" && c != "whether" && c != "if") return FineFunction::advcl;
      }
    }
    if (plab == "VP") return FineFunction::ccomp;
    if (is_clause(plab) && mi < hi) return FineFunction::csubj;
    return FineFunction::advcl;
  }

  if (!is_nominal(mn)) {
    for (std::size_t i = 0; i < mi; ++i)
      if (tree.node(kids[i]).label == "CC" || base_label(tree.node(kids[i]).label) == "CONJP") return FineFunction::conj;
    return FineFunction::other;
  }

  if (plab == "PP" || plab == "WHPP") return FineFunction::pobj;

  if (is_clause(plab)) {
    bool subject = mi < hi;
    if (!subject && (plab == "SQ" || plab == "SINV")) {
      std::size_t first_np = kids.size();
      for (std::size_t i = 0; i < kids.size(); ++i)
        if (is_nominal(tree.node(kids[i]))) { first_np = i; break; }
      subject = first_np == mi;
    }
    if (!subject) return FineFunction::other;
    return is_passive(sent, governor) ? FineFunction::nsubjpass : FineFunction::nsubj;
  }

  if (plab == "VP") {
    if (mi < hi) return FineFunction::other;
    std::vector<std::size_t> objects;
    for (std::size_t i = hi + 1; i < kids.size(); ++i)
      if (is_nominal(tree.node(kids[i]))) objects.push_back(i);
    if (objects.size() >= 2 && objects.front() == mi) return FineFunction::iobj;
    return FineFunction::dobj;
  }

  for (std::size_t i = 0; i < mi; ++i)
    if (tree.node(kids[i]).label == "CC" || base_label(tree.node(kids[i]).label) == "CONJP") return FineFunction::conj;

  if (plab == "NP" || plab == "NML" || plab == "NX") {
    bool punct_before = mi > 0 && is_punct(tree.node(kids[mi - 1]).label);
    if (punct_before && is_nominal(tree.node(kids.front()))) return FineFunction::appos;
  }
  return FineFunction::other;
}

}  // namespace syntax_detail

/// Governor of a mention: the head of the first ancestor above the maximal
/// projection of the mention's head. Requires annotate_heads.
inline GovernorInfo governor_of(const Mention& mention, const Document& doc) {
  const auto& sent = doc.sentences[mention.sentence_index];
  const auto& tree = sent.tree;
  const std::size_t head = mention.head_token;
  std::size_t m = tree.leaves[head - sent.tokens.front().index_in_document];
  while (tree.node(m).parent && tree.node(*tree.node(m).parent).head_token == head) m = *tree.node(m).parent;

  GovernorInfo info;
  if (!tree.node(m).parent) return info;
  const std::size_t p = *tree.node(m).parent;
  const std::size_t gov = tree.node(p).head_token;
  info.governor_token = gov;
  info.governor_pos = doc.token(gov).pos;
  info.function_fine = syntax_detail::label_function(sent, m, p, gov);
  info.function_coarse = coarsen(info.function_fine);
  return info;
}

}  // namespace notional
