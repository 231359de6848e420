#pragma once

// Lexical resources for featurization: verb semantic classes, entity types for
// noun heads and gold named-entity tags, and the generic-word list.

#include <array>
#include <cstdlib>
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

inline constexpr std::string_view kOtherClass = "OTHER";

struct VerbClassEntry {
  std::string class_name;
  int rank = 1;  // 1 = the lemma's most frequent class
};

class VerbClassLexicon {
 public:
  std::size_t min_class_count = 60;

  VerbClassLexicon() : merge_map_({{"LONG", "DESIRE"}, {"WANT", "DESIRE"}, {"WISH", "DESIRE"}}) {}

  void add(std::string lemma, std::string class_name, int rank) {
    entries_[std::move(lemma)].push_back({std::move(class_name), rank});
  }

  void set_merge(std::string class_name, std::string superclass) {
    merge_map_[std::move(class_name)] = std::move(superclass);
  }

  const std::map<std::string, std::string>& merge_map() const { return merge_map_; }

  bool contains(std::string_view lemma) const { return entries_.contains(std::string(lemma)); }

  /// Majority class of the lemma after merging, before the frequency
  /// collapse. Nullopt when the lemma is unknown.
  std::optional<std::string> resolve(std::string_view lemma) const {
    auto it = entries_.find(std::string(lemma));
    if (it == entries_.end() || it->second.empty()) return std::nullopt;
    const VerbClassEntry* best = &it->second.front();
    for (const auto& e : it->second)
      if (e.rank < best->rank || (e.rank == best->rank && e.class_name < best->class_name)) best = &e;
    auto merged = merge_map_.find(best->class_name);
    return merged == merge_map_.end() ? best->class_name : merged->second;
  }

  /// `lemma<TAB>class<TAB>rank` rows; optional header starting with "lemma".
  static VerbClassLexicon parse(std::string_view content) {
    VerbClassLexicon lex;
    std::size_t line_no = 0;
    for (auto line : text::lines(content)) {
      ++line_no;
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#' || t.starts_with("lemma\t")) continue;
      auto cells = text::split(t, '\t');
      auto rank = cells.size() == 3 ? text::parse_int(cells[2]) : std::nullopt;
      if (!rank) throw FormatError("verb class lexicon line " + std::to_string(line_no) + ": expected lemma, class, rank");
      lex.add(text::to_lower(text::trim(cells[0])), std::string(text::trim(cells[1])), static_cast<int>(*rank));
    }
    return lex;
  }

  /// `class<TAB>superclass` rows, added to the built-in merges.
  void parse_merges(std::string_view content) {
    for (auto line : text::lines(content)) {
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      auto cells = text::split(t, '\t');
      if (cells.size() != 2) throw FormatError("verb class merge map: expected class<TAB>superclass");
      set_merge(std::string(text::trim(cells[0])), std::string(text::trim(cells[1])));
    }
  }

 private:
  std::map<std::string, std::vector<VerbClassEntry>> entries_;
  std::map<std::string, std::string> merge_map_;
};

/// Frequencies of resolved verb classes over the extracted pairs.
using ClassCounts = std::map<std::string, std::size_t, std::less<>>;

/// Majority class, merged, then replaced by OTHER when attested fewer than
/// min_class_count times in `counts`. Unknown lemmas are OTHER.
inline std::string verb_class(std::string_view lemma, const VerbClassLexicon& lex, const ClassCounts& counts) {
  auto cls = lex.resolve(lemma);
  if (!cls) return std::string(kOtherClass);
  auto it = counts.find(*cls);
  if (it == counts.end() || it->second < lex.min_class_count) return std::string(kOtherClass);
  return *cls;
}

namespace lexicon_detail {

inline const std::map<std::string_view, std::string_view>& irregular_verbs() {
  static const std::map<std::string_view, std::string_view> m = {
      {"is", "be"},        {"are", "be"},       {"was", "be"},       {"were", "be"},      {"am", "be"},
      {"been", "be"},      {"being", "be"},     {"'s", "be"},        {"'re", "be"},       {"'m", "be"},
      {"has", "have"},     {"had", "have"},     {"having", "have"},  {"'ve", "have"},     {"does", "do"},
      {"did", "do"},       {"done", "do"},      {"said", "say"},     {"says", "say"},     {"went", "go"},
      {"gone", "go"},      {"goes", "go"},      {"made", "make"},    {"told", "tell"},    {"took", "take"},
      {"taken", "take"},   {"got", "get"},      {"gotten", "get"},   {"gave", "give"},    {"given", "give"},
      {"came", "come"},    {"saw", "see"},      {"seen", "see"},     {"knew", "know"},    {"known", "know"},
      {"thought", "think"}, {"found", "find"},  {"left", "leave"},   {"felt", "feel"},    {"kept", "keep"},
      {"brought", "bring"}, {"bought", "buy"},  {"began", "begin"},  {"begun", "begin"},  {"ran", "run"},
      {"wrote", "write"},  {"written", "write"}, {"held", "hold"},   {"stood", "stand"},  {"meant", "mean"},
      {"paid", "pay"},     {"sent", "send"},    {"built", "build"},  {"lost", "lose"},    {"spent", "spend"},
      {"led", "lead"},     {"won", "win"},      {"sold", "sell"},    {"met", "meet"},     {"sat", "sit"},
      {"spoke", "speak"},  {"spoken", "speak"}, {"heard", "hear"},   {"fell", "fall"},    {"fallen", "fall"},
      {"broke", "break"},  {"broken", "break"}, {"chose", "choose"}, {"chosen", "choose"}, {"grew", "grow"},
      {"grown", "grow"},   {"rose", "rise"},    {"risen", "rise"},   {"drove", "drive"},  {"driven", "drive"},
      {"ate", "eat"},      {"eaten", "eat"},    {"understood", "understand"}, {"taught", "teach"},
      {"caught", "catch"}, {"fought", "fight"}, {"sought", "seek"},  {"struck", "strike"}, {"won't", "will"},
      {"'ll", "will"},     {"ca", "can"},       {"wo", "will"},      {"'d", "would"},     {"became", "become"},
      {"forgot", "forget"}, {"forgotten", "forget"}, {"hid", "hide"}, {"hidden", "hide"}, {"shot", "shoot"},
      {"fed", "feed"},     {"fled", "flee"},    {"laid", "lay"},     {"lain", "lie"},
      {"slept", "sleep"},  {"swore", "swear"},  {"sworn", "swear"},  {"threw", "throw"},  {"thrown", "throw"},
      {"wore", "wear"},    {"worn", "wear"},    {"bore", "bear"},    {"born", "bear"},    {"drew", "draw"},
      {"drawn", "draw"},   {"flew", "fly"},     {"flown", "fly"},    {"froze", "freeze"}, {"frozen", "freeze"},
      {"rode", "ride"},    {"ridden", "ride"},  {"sang", "sing"},    {"sung", "sing"},    {"shook", "shake"},
      {"shaken", "shake"}, {"stole", "steal"},  {"stolen", "steal"}, {"woke", "wake"},    {"woken", "wake"},
      {"wept", "weep"},    {"dealt", "deal"},   {"dug", "dig"},      {"hung", "hang"},    {"lent", "lend"},
      {"bent", "bend"},    {"sped", "speed"},
      {"stuck", "stick"},  {"swept", "sweep"},  {"spun", "spin"},    {"slid", "slide"},   {"clung", "cling"},
  };
  return m;
}

inline bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

/// Candidate lemmas for an inflected verb form, most likely first.
inline std::vector<std::string> verb_candidates(const std::string& form) {
  std::vector<std::string> out;
  auto irregular = irregular_verbs().find(form);
  if (irregular != irregular_verbs().end()) out.emplace_back(irregular->second);
  auto ends = [&](std::string_view suf) { return form.size() > suf.size() + 1 && form.ends_with(suf); };
  auto stem = [&](std::size_t cut) { return form.substr(0, form.size() - cut); };
  if (ends("ies")) out.push_back(stem(3) + "y");
  if (ends("ied")) out.push_back(stem(3) + "y");
  if (ends("es")) out.push_back(stem(2));
  if (ends("s") && !ends("ss")) out.push_back(stem(1));
  if (ends("ed")) {
    out.push_back(stem(2));
    out.push_back(stem(1));
    auto s = stem(2);
    if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2] && !is_vowel(s.back())) out.push_back(s.substr(0, s.size() - 1));
  }
  if (ends("ing")) {
    auto s = stem(3);
    out.push_back(s);
    out.push_back(s + "e");
    if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2] && !is_vowel(s.back())) out.push_back(s.substr(0, s.size() - 1));
  }
  out.push_back(form);
  return out;
}

}  // namespace lexicon_detail

/// Lemma of a verb token: the corpus lemma column when present, otherwise the
/// first inflection candidate known to the lexicon, otherwise the most likely
/// candidate.
inline std::string verb_lemma(const Token& tok, const VerbClassLexicon& lex) {
  if (!tok.lemma.empty()) return text::to_lower(tok.lemma);
  auto candidates = lexicon_detail::verb_candidates(text::to_lower(tok.form));
  for (const auto& c : candidates)
    if (lex.contains(c)) return c;
  return candidates.front();
}

enum class EntityType { PERSON, ORGANIZATION, PLACE, OBJECT, TIME, QUANTITY, ABSTRACT, EVENT };

inline constexpr std::array<EntityType, 8> kAllEntityTypes = {
    EntityType::PERSON, EntityType::ORGANIZATION, EntityType::PLACE,    EntityType::OBJECT,
    EntityType::TIME,   EntityType::QUANTITY,     EntityType::ABSTRACT, EntityType::EVENT};

inline std::string_view to_string(EntityType t) {
  switch (t) {
    case EntityType::PERSON: return "PERSON";
    case EntityType::ORGANIZATION: return "ORGANIZATION";
    case EntityType::PLACE: return "PLACE";
    case EntityType::OBJECT: return "OBJECT";
    case EntityType::TIME: return "TIME";
    case EntityType::QUANTITY: return "QUANTITY";
    case EntityType::ABSTRACT: return "ABSTRACT";
    case EntityType::EVENT: return "EVENT";
  }
  return "?";
}

inline std::optional<EntityType> parse_entity_type(std::string_view s) {
  for (auto t : kAllEntityTypes)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

/// Which rule produced an entity type.
enum class EntitySource { ner, measure, lexicon, fallback };

inline std::string_view to_string(EntitySource s) {
  switch (s) {
    case EntitySource::ner: return "ner";
    case EntitySource::measure: return "measure";
    case EntitySource::lexicon: return "lexicon";
    case EntitySource::fallback: return "fallback";
  }
  return "?";
}

class EntityTypeLexicon {
 public:
  EntityTypeLexicon()
      : ner_map_({{"PERSON", EntityType::PERSON},         {"NORP", EntityType::PERSON},
                  {"ORG", EntityType::ORGANIZATION},      {"GPE", EntityType::PLACE},
                  {"LOC", EntityType::PLACE},             {"FAC", EntityType::PLACE},
                  {"PRODUCT", EntityType::OBJECT},        {"WORK_OF_ART", EntityType::OBJECT},
                  {"LAW", EntityType::ABSTRACT},          {"LANGUAGE", EntityType::ABSTRACT},
                  {"EVENT", EntityType::EVENT},           {"DATE", EntityType::TIME},
                  {"TIME", EntityType::TIME},             {"PERCENT", EntityType::QUANTITY},
                  {"MONEY", EntityType::QUANTITY},        {"QUANTITY", EntityType::QUANTITY},
                  {"ORDINAL", EntityType::QUANTITY},      {"CARDINAL", EntityType::QUANTITY}}) {}

  void add(std::string lemma, EntityType type) { lemmas_[std::move(lemma)] = type; }
  void set_ner(std::string tag, EntityType type) { ner_map_[std::move(tag)] = type; }

  std::optional<EntityType> lookup(std::string_view lemma) const {
    auto it = lemmas_.find(std::string(lemma));
    if (it == lemmas_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<EntityType> from_ner(std::string_view tag) const {
    auto it = ner_map_.find(std::string(tag));
    if (it == ner_map_.end()) return std::nullopt;
    return it->second;
  }

  /// Lowercased form, then singular guesses for plural-looking forms.
  std::optional<EntityType> lookup_noun(std::string_view form) const {
    auto lower = text::to_lower(form);
    if (auto t = lookup(lower)) return t;
    if (lower.size() > 3 && lower.ends_with("ies"))
      if (auto t = lookup(lower.substr(0, lower.size() - 3) + "y")) return t;
    if (lower.size() > 2 && lower.ends_with("es"))
      if (auto t = lookup(lower.substr(0, lower.size() - 2))) return t;
    if (lower.size() > 1 && lower.ends_with("s"))
      if (auto t = lookup(lower.substr(0, lower.size() - 1))) return t;
    return std::nullopt;
  }

  /// `lemma<TAB>TYPE` rows.
  static EntityTypeLexicon parse(std::string_view content) {
    EntityTypeLexicon lex;
    std::size_t line_no = 0;
    for (auto line : text::lines(content)) {
      ++line_no;
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#' || t.starts_with("lemma\t")) continue;
      auto cells = text::split(t, '\t');
      auto type = cells.size() == 2 ? parse_entity_type(text::trim(cells[1])) : std::nullopt;
      if (!type) throw FormatError("entity lexicon line " + std::to_string(line_no) + ": expected lemma<TAB>TYPE");
      lex.add(text::to_lower(text::trim(cells[0])), *type);
    }
    return lex;
  }

  /// `NER_TAG<TAB>TYPE` rows overriding the built-in map.
  void parse_ner_map(std::string_view content) {
    for (auto line : text::lines(content)) {
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      auto cells = text::split(t, '\t');
      auto type = cells.size() == 2 ? parse_entity_type(text::trim(cells[1])) : std::nullopt;
      if (!type) throw FormatError("NER map: expected TAG<TAB>TYPE");
      set_ner(std::string(text::trim(cells[0])), *type);
    }
  }

 private:
  std::map<std::string, EntityType> lemmas_;
  std::map<std::string, EntityType> ner_map_;
};

struct EntityAssignment {
  EntityType type = EntityType::ABSTRACT;
  EntitySource source = EntitySource::fallback;
};

namespace lexicon_detail {

inline bool is_unit_noun(std::string_view lower) {
  static const std::set<std::string_view> units = {
      "seconds", "minutes", "hours",  "days",   "weeks",   "months",  "years",      "decades",
      "centuries", "nights", "times", "miles",  "meters",  "metres",  "kilometers", "feet",
      "inches",  "pounds",   "ounces", "tons",  "dollars", "cents",   "percent",    "acres",
      "gallons", "liters",   "litres", "points", "degrees", "grams",  "kilograms",  "yards"};
  return units.contains(lower);
}

}  // namespace lexicon_detail

/// Entity type of the noun at `head` (document index). Precedence: a gold
/// named entity covering the head, then a measure construction
/// (head + "of" + plural time/unit noun), then the lexicon, then ABSTRACT.
inline EntityAssignment entity_type_at(const Document& doc, std::size_t head, const EntityTypeLexicon& lex) {
  const auto& sent = doc.sentence_of(head);
  for (const auto& ne : sent.entities)
    if (ne.span.contains(head))
      if (auto t = lex.from_ner(ne.type)) return {*t, EntitySource::ner};

  const std::size_t last = sent.span().end;
  if (head < last && text::to_lower(doc.token(head + 1).form) == "of") {
    for (std::size_t i = head + 2; i <= last && i <= head + 5; ++i) {
      const auto& tok = doc.token(i);
      if (tok.pos == "DT" || tok.pos == "JJ" || tok.pos == "CD" || tok.pos == "PRP$") continue;
      if (tok.pos == "NNS") {
        auto lower = text::to_lower(tok.form);
        auto t = lex.lookup_noun(lower);
        if (lexicon_detail::is_unit_noun(lower) || t == EntityType::TIME || t == EntityType::QUANTITY)
          return {EntityType::QUANTITY, EntitySource::measure};
      }
      break;
    }
  }

  if (auto t = lex.lookup_noun(doc.token(head).form)) return {*t, EntitySource::lexicon};
  return {EntityType::ABSTRACT, EntitySource::fallback};
}

inline EntityAssignment entity_type(const Mention& mention, const Document& doc, const EntityTypeLexicon& lex) {
  return entity_type_at(doc, mention.head_token, lex);
}

inline std::set<std::string> default_generic_words() {
  return {"anyone", "someone", "somebody", "anybody", "everybody", "everyone", "nobody", "no-one", "one"};
}

struct Lexicons {
  VerbClassLexicon verbs;
  EntityTypeLexicon entities;
  std::set<std::string> generic = default_generic_words();

  /// Reads whichever of these exist in `dir`: verb_classes.tsv,
  /// verb_class_merge.tsv, entities.tsv, ner_map.tsv, generic.txt (which
  /// extends the built-in generic list).
  static Lexicons load(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("lexicon directory not found: " + dir.string());
    Lexicons lex;
    if (fs::exists(dir / "verb_classes.tsv")) lex.verbs = VerbClassLexicon::parse(text::read_file(dir / "verb_classes.tsv"));
    if (fs::exists(dir / "verb_class_merge.tsv")) lex.verbs.parse_merges(text::read_file(dir / "verb_class_merge.tsv"));
    if (fs::exists(dir / "entities.tsv")) lex.entities = EntityTypeLexicon::parse(text::read_file(dir / "entities.tsv"));
    if (fs::exists(dir / "ner_map.tsv")) lex.entities.parse_ner_map(text::read_file(dir / "ner_map.tsv"));
    if (fs::exists(dir / "generic.txt")) {
      const std::string content = text::read_file(dir / "generic.txt");
      for (auto line : text::lines(content)) {
        auto t = text::trim(line);
        if (!t.empty() && t.front() != '#') lex.generic.insert(text::to_lower(t));
      }
    }
    return lex;
  }
};

}  // namespace notional
