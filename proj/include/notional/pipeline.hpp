#pragma once

// Pipeline stages behind the command-line tool. Every stage reads and
// writes plain TSV/JSON files in the output directory.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "notional/analysis.hpp"
#include "notional/conll.hpp"
#include "notional/dataset.hpp"
#include "notional/evaluation.hpp"
#include "notional/extra_trees.hpp"
#include "notional/extraction.hpp"
#include "notional/genre.hpp"
#include "notional/lexicon.hpp"
#include "notional/model_selection.hpp"
#include "notional/syntax.hpp"
#include "notional/text.hpp"

namespace notional {

namespace fs = std::filesystem;

struct RunConfig {
  fs::path corpus;
  fs::path out = ".";
  std::optional<fs::path> input;  // overrides the stage's default input file
  std::optional<fs::path> lexicons;
  std::optional<fs::path> genre_map;
  std::optional<fs::path> exclusions;
  std::optional<fs::path> head_rules;
  std::optional<fs::path> grid;
  std::uint64_t seed = 42;
  double test_frac = 0.10;
  std::size_t folds = 5;
  bool header_meta = true;
  std::size_t min_verb_class_count = 60;
  std::vector<std::string> extra_features;
  unsigned threads = 0;
  std::size_t bins = 10;
  std::size_t min_pos_count = 25;
  std::ostream* log = &std::cerr;
};

namespace pipeline_detail {

inline std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string header_line(const RunConfig& cfg) {
  std::string s = "# seed=" + std::to_string(cfg.seed);
  if (cfg.header_meta) s += " generated=" + timestamp();
  return s;
}

inline void write_table(const RunConfig& cfg, const fs::path& path, text::Table t) {
  t.comments.insert(t.comments.begin(), header_line(cfg));
  text::write_file(path, t.str());
}

inline fs::path input_or(const RunConfig& cfg, const char* name) { return cfg.input ? *cfg.input : cfg.out / name; }

inline text::Table load_table(const fs::path& path) {
  if (!fs::exists(path)) throw Error("input file not found: " + path.string());
  return text::Table::load(path);
}

inline void warn(const RunConfig& cfg, const std::string& msg) {
  if (cfg.log) *cfg.log << "warning: " << msg << "\n";
}

}  // namespace pipeline_detail

inline Lexicons load_lexicons(const RunConfig& cfg) {
  std::optional<fs::path> dir = cfg.lexicons;
  if (!dir)
    if (const char* env = std::getenv("NOTIONAL_LEXICON_DIR"); env && *env) dir = fs::path(env);
  Lexicons lex = dir ? Lexicons::load(*dir) : Lexicons{};
  lex.verbs.min_class_count = cfg.min_verb_class_count;
  return lex;
}

inline bool is_conll_file(const fs::path& p) {
  return p.filename().string().ends_with("conll");
}

/// Parses every *conll file under the corpus directory and annotates heads.
/// Documents come back ordered by id. Documents with unmapped ids are skipped with a warning.
inline std::vector<Document> load_corpus(const RunConfig& cfg) {
  if (!fs::is_directory(cfg.corpus)) throw Error("corpus directory not readable: " + cfg.corpus.string());
  const GenreMap genres = cfg.genre_map ? GenreMap::load(*cfg.genre_map) : GenreMap::defaults();
  const HeadRuleTable rules = cfg.head_rules ? HeadRuleTable::load(*cfg.head_rules) : HeadRuleTable::defaults();

  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(cfg.corpus))
    if (e.is_regular_file() && is_conll_file(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<Document> docs;
  for (const auto& f : files) {
    const std::string content = text::read_file(f);
    std::string id = header_doc_id(content).value_or(fs::relative(f, cfg.corpus).replace_extension().generic_string());
    try {
      Document doc = load_document(content, id, genres);
      annotate_heads(doc, rules);
      docs.push_back(std::move(doc));
    } catch (const UnmappedDocumentError& e) {
      pipeline_detail::warn(cfg, std::string(e.what()) + "; skipped " + f.string());
    } catch (const Error& e) {
      throw Error(f.string() + ": " + e.what());
    }
  }
  std::stable_sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  return docs;
}

struct ExtractSummary {
  std::size_t documents = 0;
  std::size_t candidates = 0;  // before the attestation filter
  std::size_t pairs = 0;
  std::size_t notional = 0;

  double rate() const { return pairs ? static_cast<double>(notional) / static_cast<double>(pairs) : 0.0; }
};

inline std::vector<AgreementPair> extract_corpus(const std::vector<Document>& docs, const ExclusionList& exclusions,
                                                 std::size_t* candidates = nullptr) {
  std::vector<AgreementPair> all;
  for (const auto& d : docs) {
    auto p = extract_pairs(d, exclusions);
    all.insert(all.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  }
  if (candidates) *candidates = all.size();
  return attestation_filter(all);
}

inline ExtractSummary run_extract(const RunConfig& cfg) {
  const auto docs = load_corpus(cfg);
  const ExclusionList excl =
      cfg.exclusions ? ExclusionList::parse(text::read_file(*cfg.exclusions)) : ExclusionList{};
  ExtractSummary s;
  s.documents = docs.size();
  const auto pairs = extract_corpus(docs, excl, &s.candidates);
  s.pairs = pairs.size();
  for (const auto& p : pairs) s.notional += p.label == Agreement::notional;
  if (pairs.empty()) pipeline_detail::warn(cfg, "no pairs extracted");
  pipeline_detail::write_table(cfg, cfg.out / "pairs.tsv", pairs_table(pairs));
  return s;
}

/// Feature rows for already extracted pairs; verb-class frequencies are
/// counted over the whole pair set before any row is featurized.
inline text::Table featurize_pairs(const std::vector<AgreementPair>& pairs, const std::vector<Document>& docs,
                                   const Lexicons& lex, const std::vector<std::string>& extra) {
  for (const auto& e : extra)
    if (std::find(optional_feature_names().begin(), optional_feature_names().end(), e) ==
        optional_feature_names().end())
      throw SchemaError(e, "unknown optional feature");
  std::map<std::string, const Document*> by_id;
  for (const auto& d : docs) by_id[d.doc_id] = &d;
  Featurizer fz(lex);
  for (const auto& p : pairs) fz.count(p, *by_id.at(p.doc_id));
  std::vector<FeatureVector> fvs;
  for (const auto& p : pairs) fvs.push_back(fz.featurize(p, *by_id.at(p.doc_id)));
  return features_table(pairs, fvs, extra);
}

inline std::size_t run_featurize(const RunConfig& cfg) {
  const auto docs = load_corpus(cfg);
  const auto pairs = read_pairs(pipeline_detail::load_table(pipeline_detail::input_or(cfg, "pairs.tsv")), docs);
  auto t = featurize_pairs(pairs, docs, load_lexicons(cfg), cfg.extra_features);
  pipeline_detail::write_table(cfg, cfg.out / "features.tsv", t);
  return t.rows.size();
}

struct SplitSummary {
  std::size_t train = 0;
  std::size_t test = 0;
};

/// Stratifies on (genre, label).
inline SplitSummary run_split(const RunConfig& cfg) {
  const auto t = pipeline_detail::load_table(pipeline_detail::input_or(cfg, "features.tsv"));
  const auto g = t.require("genre");
  const auto l = t.require("label");
  std::vector<std::string> keys;
  for (const auto& row : t.rows) keys.push_back(row[g] + "|" + row[l]);
  const auto split = stratified_split(keys, cfg.test_frac, cfg.seed);
  text::Table train{{}, t.header, {}}, test{{}, t.header, {}};
  for (auto i : split.train) train.rows.push_back(t.rows[i]);
  for (auto i : split.test) test.rows.push_back(t.rows[i]);
  pipeline_detail::write_table(cfg, cfg.out / "train.tsv", train);
  pipeline_detail::write_table(cfg, cfg.out / "test.tsv", test);
  return {train.rows.size(), test.rows.size()};
}

inline std::string model_text(const RunConfig& cfg, const Forest& forest) {
  auto j = forest.to_json();
  if (cfg.header_meta) j["generated"] = pipeline_detail::timestamp();
  return j.dump(1) + "\n";
}

inline Forest load_model(const fs::path& path) {
  if (!fs::exists(path)) throw Error("model file not found: " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw EncodingError(std::string("malformed model file: ") + e.what());
  }
  return Forest::from_json(j);
}

inline GridResult run_train(const RunConfig& cfg) {
  const auto ft = FeatureTable::from_table(pipeline_detail::load_table(pipeline_detail::input_or(cfg, "train.tsv")));
  const Encoding enc = Encoding::fit(ft, is_numeric_feature);
  const Dataset data = Dataset::encode(ft, enc);
  const Grid grid = cfg.grid ? Grid::parse(text::read_file(*cfg.grid)) : Grid{};
  auto result = grid_search(data, grid, cfg.folds, cfg.seed, cfg.threads);
  text::write_file(cfg.out / "model.json", model_text(cfg, result.model));
  pipeline_detail::write_table(cfg, cfg.out / "cv.tsv", cv_table(result));
  return result;
}

inline EvalReport run_evaluate(const RunConfig& cfg) {
  const Forest forest = load_model(cfg.out / "model.json");
  const auto ft = FeatureTable::from_table(pipeline_detail::load_table(pipeline_detail::input_or(cfg, "test.tsv")));
  const Dataset test = Dataset::encode(ft, forest.encoding());
  EvalReport report = evaluate(forest, test);
  if (fs::exists(cfg.out / "features.tsv")) {
    const auto all = text::Table::load(cfg.out / "features.tsv");
    const auto l = all.require("label");
    std::size_t notional = 0;
    for (const auto& row : all.rows) notional += row[l] == "notional";
    if (!all.rows.empty()) report.corpus_baseline = majority_share(notional, all.rows.size() - notional);
  }
  auto j = report.to_json();
  j["seed"] = cfg.seed;
  if (cfg.header_meta) j["generated"] = pipeline_detail::timestamp();
  text::write_file(cfg.out / "eval.json", j.dump(1) + "\n");
  text::write_file(cfg.out / "eval.txt", pipeline_detail::header_line(cfg) + "\n" + report.render());
  return report;
}

inline ImportanceReport run_importances(const RunConfig& cfg) {
  const Forest forest = load_model(cfg.input ? *cfg.input : cfg.out / "model.json");
  const auto report = importances(forest);
  if (report.degenerate()) pipeline_detail::warn(cfg, "forest has no splits; all importances are zero");
  auto table = [](std::vector<FeatureImportance> rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const FeatureImportance& a, const FeatureImportance& b) { return a.mean > b.mean; });
    text::Table t;
    t.header = {"feature", "mean", "std"};
    for (const auto& r : rows) t.rows.push_back({r.name, text::fixed(r.mean, 6), text::fixed(r.std, 6)});
    return t;
  };
  pipeline_detail::write_table(cfg, cfg.out / "importances.tsv", table(report.grouped));
  pipeline_detail::write_table(cfg, cfg.out / "importances_encoded.tsv", table(report.encoded));
  return report;
}

inline std::size_t run_predict(const RunConfig& cfg) {
  const Forest forest = load_model(cfg.out / "model.json");
  const auto ft =
      FeatureTable::from_table(pipeline_detail::load_table(pipeline_detail::input_or(cfg, "test.tsv")), false);
  const auto& enc = forest.encoding();
  enc.check_compatible(ft.feature_names);
  text::Table out;
  out.header = {"pair_id", "predicted", "p_notional"};
  std::vector<double> x(enc.width());
  for (std::size_t i = 0; i < ft.size(); ++i) {
    enc.encode_row(ft.values[i], x);
    const auto p = forest.predict(x);
    out.rows.push_back({ft.ids[i], std::string(to_string(p.label)), text::fixed(p.probability, 6)});
  }
  pipeline_detail::write_table(cfg, cfg.out / "predictions.tsv", out);
  return out.rows.size();
}

inline const std::vector<std::string>& analysis_tables() {
  static const std::vector<std::string> t = {"genre", "pos", "entity", "deprel", "distance", "position"};
  return t;
}

/// Writes analysis_<name>.tsv and returns the written path.
inline fs::path run_analyze(const RunConfig& cfg, std::string_view name) {
  const auto ft = FeatureTable::from_table(pipeline_detail::load_table(pipeline_detail::input_or(cfg, "features.tsv")));
  const fs::path path = cfg.out / ("analysis_" + std::string(name) + ".tsv");
  text::Table t;
  if (name == "genre") {
    t = contingency(ft, "genre").table();
  } else if (name == "pos") {
    auto c = contingency(ft, "n_parent_pos").filtered(cfg.min_pos_count);
    c.sort_by_rate();
    t = c.table();
  } else if (name == "entity") {
    t = residuals(contingency(ft, "t_entity")).table();
  } else if (name == "deprel") {
    auto [ana, ante] = function_residuals(ft);
    auto a = ana.table(), b = ante.table();
    t.header = a.header;
    t.header[0] = "function";
    t.header.insert(t.header.begin(), "role");
    for (auto& r : a.rows) r.insert(r.begin(), "anaphor"), t.rows.push_back(r);
    for (auto& r : b.rows) r.insert(r.begin(), "antecedent"), t.rows.push_back(r);
  } else if (name == "distance") {
    t = bin_profile(numeric_column(ft, "distance_tokens", true), ft.labels, cfg.bins, "log_distance").table();
  } else if (name == "position") {
    t = bin_profile(numeric_column(ft, "n_position_pct"), ft.labels, cfg.bins, "anaphor_position_pct").table();
  } else {
    throw Error("unknown analysis table '" + std::string(name) + "'");
  }
  pipeline_detail::write_table(cfg, path, t);
  return path;
}

}  // namespace notional
