#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "notional/pipeline.hpp"

namespace {

using notional::RunConfig;

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  cmd->add_flag("!--no-header-meta", cfg.header_meta, "Omit timestamps from artifact headers");
}

void add_corpus(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--corpus", cfg.corpus, "Directory of CoNLL files")->required();
  cmd->add_option("--genre-map", cfg.genre_map, "prefix<TAB>genre file");
  cmd->add_option("--head-rules", cfg.head_rules, "Head percolation rule file");
}

void add_input(CLI::App* cmd, RunConfig& cfg, const std::string& what) {
  cmd->add_option("--input", cfg.input, what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Notional agreement pipeline"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string table;

  auto* extract = app.add_subcommand("extract", "Extract antecedent/pronoun pairs into pairs.tsv");
  add_common(extract, cfg);
  add_corpus(extract, cfg);
  extract->add_option("--exclusions", cfg.exclusions, "doc_id<TAB>span exclusion list");

  auto* featurize = app.add_subcommand("featurize", "Compute features.tsv from pairs.tsv");
  add_common(featurize, cfg);
  add_corpus(featurize, cfg);
  add_input(featurize, cfg, "Pairs file (default <out>/pairs.tsv)");
  featurize->add_option("--lexicons", cfg.lexicons, "Lexicon directory (default $NOTIONAL_LEXICON_DIR)");
  featurize->add_option("--min-verb-class-count", cfg.min_verb_class_count, "Rarer verb classes become OTHER")
      ->capture_default_str();
  featurize->add_option("--extra-features", cfg.extra_features, "Optional features: modality, t_entity_source")
      ->delimiter(',');

  auto* split = app.add_subcommand("split", "Stratified train.tsv/test.tsv split");
  add_common(split, cfg);
  add_input(split, cfg, "Features file (default <out>/features.tsv)");
  split->add_option("--test-frac", cfg.test_frac, "Test fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));

  auto* train = app.add_subcommand("train", "Grid search and fit model.json");
  add_common(train, cfg);
  add_input(train, cfg, "Training features (default <out>/train.tsv)");
  train->add_option("--grid", cfg.grid, "Grid JSON file");
  train->add_option("--folds", cfg.folds, "Cross-validation folds")->capture_default_str();
  train->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "Score model.json on test.tsv");
  add_common(evaluate, cfg);
  add_input(evaluate, cfg, "Test features (default <out>/test.tsv)");

  auto* imp = app.add_subcommand("importances", "Gini importances of model.json");
  add_common(imp, cfg);
  add_input(imp, cfg, "Model file (default <out>/model.json)");

  auto* predict = app.add_subcommand("predict", "Label a features file with model.json");
  add_common(predict, cfg);
  add_input(predict, cfg, "Features file (default <out>/test.tsv)");

  auto* analyze = app.add_subcommand("analyze", "Association tables from features.tsv");
  add_common(analyze, cfg);
  add_input(analyze, cfg, "Features file (default <out>/features.tsv)");
  analyze->add_option("--table", table, "Table to compute")->required()->check(
      CLI::IsMember(notional::analysis_tables()));
  analyze->add_option("--bins", cfg.bins, "Bins for distance/position")->capture_default_str();
  analyze->add_option("--min-count", cfg.min_pos_count, "Minimum rows per POS category")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) {
      auto s = notional::run_extract(cfg);
      std::printf("documents %zu\ncandidates %zu\npairs %zu\nnotional %zu (%.2f%%)\n", s.documents, s.candidates,
                  s.pairs, s.notional, 100.0 * s.rate());
    } else if (*featurize) {
      std::printf("featurized %zu pairs\n", notional::run_featurize(cfg));
    } else if (*split) {
      auto s = notional::run_split(cfg);
      std::printf("train %zu\ntest %zu\n", s.train, s.test);
    } else if (*train) {
      auto r = notional::run_train(cfg);
      std::printf("selected n_trees=%zu max_depth=%s max_features=%s\n", r.best.n_trees,
                  notional::depth_string(r.best.max_depth).c_str(), r.best.max_features.str().c_str());
    } else if (*evaluate) {
      std::cout << notional::run_evaluate(cfg).render();
    } else if (*imp) {
      auto r = notional::run_importances(cfg);
      for (const auto& f : r.grouped) std::printf("%-20s %.4f  %.4f\n", f.name.c_str(), f.mean, f.std);
    } else if (*predict) {
      std::printf("predicted %zu rows\n", notional::run_predict(cfg));
    } else if (*analyze) {
      std::cout << notional::text::read_file(notional::run_analyze(cfg, table));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
