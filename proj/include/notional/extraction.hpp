#pragma once

// Antecedent/anaphor pair selection, the attestation filter, and the feature
// inventory computed for each pair.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "notional/agreement.hpp"
#include "notional/conll.hpp"
#include "notional/errors.hpp"
#include "notional/lexicon.hpp"
#include "notional/syntax.hpp"
#include "notional/text.hpp"

namespace notional {

enum class PronounClass { plural, singular, second_person, none };

inline PronounClass classify_pronoun(std::string_view form) {
  static const std::set<std::string_view> plural = {"they", "them", "their", "theirs", "themselves",
                                                    "we",   "us",   "our",   "ours",   "ourselves"};
  static const std::set<std::string_view> singular = {"it",  "its",  "itself", "he", "him",  "his",
                                                      "himself", "she", "her", "hers", "herself", "i",
                                                      "me",  "my",   "mine",   "myself"};
  static const std::set<std::string_view> second = {"you", "your", "yours", "yourself", "yourselves"};
  const auto lower = text::to_lower(form);
  if (plural.contains(lower)) return PronounClass::plural;
  if (singular.contains(lower)) return PronounClass::singular;
  if (second.contains(lower)) return PronounClass::second_person;
  return PronounClass::none;
}

/// 1 or 3 for first/third person pronouns.
inline int pronoun_person(std::string_view form) {
  static const std::set<std::string_view> first = {"i",  "me", "my",  "mine", "myself",
                                                   "we", "us", "our", "ours", "ourselves"};
  return first.contains(text::to_lower(form)) ? 1 : 3;
}

struct AgreementPair {
  std::string doc_id;
  Genre genre = Genre::news;
  Mention antecedent;
  Mention anaphor;
  Agreement label = Agreement::strict;
  std::string anaphor_form;
  std::string antecedent_head_form;  // lowercased
  std::optional<bool> type_iii;
};

/// Manually curated (doc_id, span) records; a pair is dropped when either of
/// its mentions has an excluded span.
class ExclusionList {
 public:
  void add(std::string doc_id, Span span) { items_.insert({std::move(doc_id), span}); }
  bool excludes(std::string_view doc_id, const Span& span) const {
    return items_.contains({std::string(doc_id), span});
  }
  std::size_t size() const { return items_.size(); }

  /// `doc_id<TAB>start-end` rows.
  static ExclusionList parse(std::string_view content) {
    ExclusionList list;
    std::size_t line_no = 0;
    for (auto line : text::lines(content)) {
      ++line_no;
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#' || t.starts_with("doc_id\t")) continue;
      auto cells = text::split(t, '\t');
      auto span = cells.size() == 2 ? parse_span(text::trim(cells[1])) : std::nullopt;
      if (!span) throw FormatError("exclusion list line " + std::to_string(line_no) + ": expected doc_id<TAB>start-end");
      list.add(std::string(text::trim(cells[0])), *span);
    }
    return list;
  }

 private:
  std::set<std::pair<std::string, Span>> items_;
};

/// Pairs each NN/NNP-headed mention with the next mention of its chain when
/// that mention is a single first or third person pronoun. Requires
/// annotate_heads and an assigned genre.
inline std::vector<AgreementPair> extract_pairs(const Document& doc, const ExclusionList& exclusions) {
  std::vector<AgreementPair> out;
  if (!doc.genre) throw Error("document " + doc.doc_id + " has no genre");
  for (const auto& chain : doc.chains) {
    for (std::size_t i = 0; i + 1 < chain.mentions.size(); ++i) {
      const auto& ante = chain.mentions[i];
      const auto& ana = chain.mentions[i + 1];
      const auto& head_pos = doc.token(ante.head_token).pos;
      if (head_pos != "NN" && head_pos != "NNP") continue;
      if (ana.span.size() != 1) continue;
      const auto& form = doc.token(ana.span.start).form;
      auto cls = classify_pronoun(form);
      if (cls == PronounClass::none || cls == PronounClass::second_person) continue;
      if (exclusions.excludes(doc.doc_id, ante.span) || exclusions.excludes(doc.doc_id, ana.span)) continue;
      AgreementPair pair;
      pair.doc_id = doc.doc_id;
      pair.genre = *doc.genre;
      pair.antecedent = ante;
      pair.anaphor = ana;
      pair.label = cls == PronounClass::plural ? Agreement::notional : Agreement::strict;
      pair.anaphor_form = form;
      pair.antecedent_head_form = text::to_lower(doc.token(ante.head_token).form);
      out.push_back(std::move(pair));
    }
  }
  std::sort(out.begin(), out.end(), [](const AgreementPair& a, const AgreementPair& b) {
    return std::tie(a.anaphor.span, a.antecedent.span) < std::tie(b.anaphor.span, b.antecedent.span);
  });
  return out;
}

/// Keeps exactly the pairs whose antecedent head form has at least one
/// notional pair in `pairs`. Order of the survivors is preserved.
inline std::vector<AgreementPair> attestation_filter(const std::vector<AgreementPair>& pairs) {
  std::set<std::string> attested;
  for (const auto& p : pairs)
    if (p.label == Agreement::notional) attested.insert(p.antecedent_head_form);
  std::vector<AgreementPair> out;
  for (const auto& p : pairs)
    if (attested.contains(p.antecedent_head_form)) out.push_back(p);
  return out;
}

enum class Article { def, indef, dem, none };

inline std::string_view to_string(Article a) {
  switch (a) {
    case Article::def: return "def";
    case Article::indef: return "indef";
    case Article::dem: return "dem";
    case Article::none: return "none";
  }
  return "?";
}

/// From the first DT token of the span.
inline Article article_of(const Document& doc, const Span& span) {
  for (std::size_t i = span.start; i <= span.end; ++i) {
    const auto& tok = doc.token(i);
    if (tok.pos != "DT") continue;
    auto w = text::to_lower(tok.form);
    if (w == "the") return Article::def;
    if (w == "a" || w == "an") return Article::indef;
    if (w == "this" || w == "that" || w == "these" || w == "those") return Article::dem;
    return Article::none;
  }
  return Article::none;
}

/// Parent class slot values when the governor is neither a verb nor a noun,
/// or when the mention has no governor.
inline constexpr std::string_view kNoClass = "NONE";
inline constexpr std::string_view kRootPos = "ROOT";

struct FeatureVector {
  int n_person = 3;
  CoarseFunction n_func = CoarseFunction::other;
  std::string n_parent_pos;
  std::string n_parent_class;
  double n_position_pct = 0;

  FineFunction t_func = FineFunction::other;
  std::string t_parent_pos;
  std::string t_parent_class;
  EntityType t_entity = EntityType::ABSTRACT;
  Article t_art = Article::none;
  bool t_given = false;
  bool t_generic = false;
  std::size_t t_length_tokens = 0;
  std::size_t t_length_chars = 0;
  double t_position_pct = 0;

  std::size_t distance_tokens = 0;
  std::size_t doc_length_tokens = 0;
  Genre genre = Genre::news;

  // Optional slots, emitted only when requested.
  std::string modality;
  EntitySource t_entity_source = EntitySource::fallback;
};

inline const std::vector<std::string>& core_feature_names() {
  static const std::vector<std::string> names = {
      "n_person",      "n_func",        "n_parent_pos",   "n_parent_class",  "n_position_pct",
      "t_func",        "t_parent_pos",  "t_parent_class", "t_entity",        "t_art",
      "t_infstat",     "t_generic",     "t_length_tokens", "t_length_chars", "t_position_pct",
      "distance_tokens", "doc_length_tokens", "genre"};
  return names;
}

inline const std::vector<std::string>& optional_feature_names() {
  static const std::vector<std::string> names = {"modality", "t_entity_source"};
  return names;
}

inline bool is_numeric_feature(std::string_view name) {
  static const std::set<std::string_view> numeric = {"n_position_pct",  "t_length_tokens", "t_length_chars",
                                                     "t_position_pct",  "distance_tokens", "doc_length_tokens"};
  return numeric.contains(name);
}

/// Percentages are written with four decimals; counts as integers.
inline std::string feature_value(const FeatureVector& fv, std::string_view name) {
  if (name == "n_person") return std::to_string(fv.n_person);
  if (name == "n_func") return std::string(to_string(fv.n_func));
  if (name == "n_parent_pos") return fv.n_parent_pos;
  if (name == "n_parent_class") return fv.n_parent_class;
  if (name == "n_position_pct") return text::fixed(fv.n_position_pct, 4);
  if (name == "t_func") return std::string(to_string(fv.t_func));
  if (name == "t_parent_pos") return fv.t_parent_pos;
  if (name == "t_parent_class") return fv.t_parent_class;
  if (name == "t_entity") return std::string(to_string(fv.t_entity));
  if (name == "t_art") return std::string(to_string(fv.t_art));
  if (name == "t_infstat") return fv.t_given ? "given" : "new";
  if (name == "t_generic") return fv.t_generic ? "true" : "false";
  if (name == "t_length_tokens") return std::to_string(fv.t_length_tokens);
  if (name == "t_length_chars") return std::to_string(fv.t_length_chars);
  if (name == "t_position_pct") return text::fixed(fv.t_position_pct, 4);
  if (name == "distance_tokens") return std::to_string(fv.distance_tokens);
  if (name == "doc_length_tokens") return std::to_string(fv.doc_length_tokens);
  if (name == "genre") return std::string(to_string(fv.genre));
  if (name == "modality") return fv.modality;
  if (name == "t_entity_source") return std::string(to_string(fv.t_entity_source));
  throw SchemaError(std::string(name), "unknown feature");
}

/// Two-pass featurizer: count() the resolved verb classes of every pair's
/// governors over the whole pair set, then featurize() each pair.
class Featurizer {
 public:
  explicit Featurizer(const Lexicons& lex) : lex_(lex) {}

  void count(const AgreementPair& pair, const Document& doc) {
    for (const Mention* m : {&pair.antecedent, &pair.anaphor}) {
      auto gov = governor_of(*m, doc);
      if (!gov.governor_token || !gov.governor_pos.starts_with("VB")) continue;
      if (auto cls = lex_.verbs.resolve(verb_lemma(doc.token(*gov.governor_token), lex_.verbs))) ++counts_[*cls];
    }
  }

  const ClassCounts& class_counts() const { return counts_; }

  FeatureVector featurize(const AgreementPair& pair, const Document& doc) const {
    FeatureVector fv;
    const auto& ante = pair.antecedent;
    const auto& ana = pair.anaphor;
    const double n_tokens = static_cast<double>(doc.token_count);

    auto ana_gov = governor_of(ana, doc);
    fv.n_person = pronoun_person(pair.anaphor_form);
    fv.n_func = ana_gov.function_coarse;
    fv.n_parent_pos = ana_gov.governor_token ? collapse_pos(ana_gov.governor_pos) : std::string(kRootPos);
    fv.n_parent_class = parent_class(ana_gov, doc);
    fv.n_position_pct = 100.0 * static_cast<double>(ana.head_token) / n_tokens;

    auto ante_gov = governor_of(ante, doc);
    fv.t_func = ante_gov.function_fine;
    fv.t_parent_pos = ante_gov.governor_token ? ante_gov.governor_pos : std::string(kRootPos);
    fv.t_parent_class = parent_class(ante_gov, doc);
    auto ent = entity_type(ante, doc, lex_.entities);
    fv.t_entity = ent.type;
    fv.t_entity_source = ent.source;
    fv.t_art = article_of(doc, ante.span);
    fv.t_given = ante.ordinal_in_chain > 0;
    fv.t_generic = lex_.generic.contains(text::to_lower(doc.token(ante.head_token).form));
    fv.t_length_tokens = ante.span.size();
    fv.t_length_chars = doc.surface(ante.span).size();
    fv.t_position_pct = 100.0 * static_cast<double>(ante.head_token) / n_tokens;

    fv.distance_tokens = ana.head_token - ante.head_token;
    fv.doc_length_tokens = doc.token_count;
    fv.genre = pair.genre;
    fv.modality = is_spoken(pair.genre) ? "spoken" : "written";
    return fv;
  }

 private:
  std::string parent_class(const GovernorInfo& gov, const Document& doc) const {
    if (!gov.governor_token) return std::string(kNoClass);
    if (gov.governor_pos.starts_with("VB"))
      return verb_class(verb_lemma(doc.token(*gov.governor_token), lex_.verbs), lex_.verbs, counts_);
    if (gov.governor_pos.starts_with("NN"))
      return "ENT:" + std::string(to_string(entity_type_at(doc, *gov.governor_token, lex_.entities).type));
    return std::string(kNoClass);
  }

  const Lexicons& lex_;
  ClassCounts counts_;
};

// ---- TSV files -----------------------------------------------------------

inline const std::vector<std::string>& pair_columns() {
  static const std::vector<std::string> cols = {"doc_id",       "genre",        "antecedent_span", "head_form",
                                                "anaphor_span", "anaphor_form", "label",           "type_iii"};
  return cols;
}

inline text::Table pairs_table(const std::vector<AgreementPair>& pairs) {
  text::Table t;
  t.header = pair_columns();
  for (const auto& p : pairs) {
    t.rows.push_back({p.doc_id, std::string(to_string(p.genre)), to_string(p.antecedent.span), p.antecedent_head_form,
                      to_string(p.anaphor.span), p.anaphor_form, std::string(to_string(p.label)),
                      p.type_iii ? (*p.type_iii ? "yes" : "no") : "_"});
  }
  return t;
}

/// Rebuilds pairs from a pairs table against loaded documents; both spans
/// must be mentions of one chain.
inline std::vector<AgreementPair> read_pairs(const text::Table& t, const std::vector<Document>& docs) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : docs) by_id[d.doc_id] = &d;
  const auto c_doc = t.require("doc_id"), c_genre = t.require("genre"), c_ante = t.require("antecedent_span"),
             c_ana = t.require("anaphor_span"), c_form = t.require("anaphor_form"), c_label = t.require("label");
  const auto c_type = t.column("type_iii");
  std::vector<AgreementPair> out;
  for (const auto& row : t.rows) {
    auto doc_it = by_id.find(row[c_doc]);
    if (doc_it == by_id.end()) throw SchemaError("doc_id", "unknown document '" + row[c_doc] + "'");
    const Document& doc = *doc_it->second;
    auto genre = parse_genre(row[c_genre]);
    if (!genre) throw SchemaError("genre", "unknown genre '" + row[c_genre] + "'");
    auto label = parse_agreement(row[c_label]);
    if (!label) throw SchemaError("label", "expected strict or notional, got '" + row[c_label] + "'");
    auto ante_span = parse_span(row[c_ante]);
    auto ana_span = parse_span(row[c_ana]);
    if (!ante_span) throw SchemaError("antecedent_span", "bad span '" + row[c_ante] + "'");
    if (!ana_span) throw SchemaError("anaphor_span", "bad span '" + row[c_ana] + "'");

    AgreementPair pair;
    bool found = false;
    for (const auto& chain : doc.chains) {
      for (std::size_t i = 0; i + 1 < chain.mentions.size(); ++i) {
        if (chain.mentions[i].span == *ante_span && chain.mentions[i + 1].span == *ana_span) {
          pair.antecedent = chain.mentions[i];
          pair.anaphor = chain.mentions[i + 1];
          found = true;
        }
      }
    }
    if (!found)
      throw SchemaError("anaphor_span", "no adjacent chain mentions " + row[c_ante] + " / " + row[c_ana] + " in " +
                                            doc.doc_id);
    pair.doc_id = doc.doc_id;
    pair.genre = *genre;
    pair.label = *label;
    pair.anaphor_form = row[c_form];
    pair.antecedent_head_form = text::to_lower(doc.token(pair.antecedent.head_token).form);
    if (c_type && row[*c_type] != "_") pair.type_iii = row[*c_type] == "yes";
    out.push_back(std::move(pair));
  }
  return out;
}

inline std::string pair_id(const AgreementPair& p) {
  return p.doc_id + ":" + to_string(p.antecedent.span) + ":" + to_string(p.anaphor.span);
}

/// Features file: pair_id, the feature columns, label.
inline text::Table features_table(const std::vector<AgreementPair>& pairs, const std::vector<FeatureVector>& fvs,
                                  const std::vector<std::string>& extra) {
  text::Table t;
  t.header.push_back("pair_id");
  auto names = core_feature_names();
  names.insert(names.end(), extra.begin(), extra.end());
  for (const auto& n : names) t.header.push_back(n);
  t.header.push_back("label");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<std::string> row{pair_id(pairs[i])};
    for (const auto& n : names) row.push_back(feature_value(fvs[i], n));
    row.emplace_back(to_string(pairs[i].label));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace notional
