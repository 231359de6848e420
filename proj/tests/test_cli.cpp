#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "notional/text.hpp"
#include "support/paths.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run cli(const fs::path& dir, const std::string& args) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = "'" + paths::cli().string() + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  Run r;
  const int rc = std::system(cmd.c_str());
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// File body without '#' comment lines.
std::string body(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, s;
  while (std::getline(in, line))
    if (!line.starts_with("#")) s += line + "\n";
  return s;
}

std::string corpus() { return q(paths::fixtures() / "corpus"); }

// Extract and featurize the fixture corpus into `dir`.
void featurized(const fs::path& dir) {
  ASSERT_EQ(cli(dir, "extract --corpus " + corpus() + " --exclusions " + q(paths::fixtures() / "exclusions.tsv") +
                         " --out " + q(dir))
                .status,
            0);
  ASSERT_EQ(cli(dir, "featurize --corpus " + corpus() + " --lexicons " + q(paths::fixtures() / "lexicons") +
                         " --min-verb-class-count 2 --out " + q(dir))
                .status,
            0);
}

// Featurized fixture plus a seed-7 split.
void split(const fs::path& dir) {
  featurized(dir);
  ASSERT_EQ(cli(dir, "split --seed 7 --out " + q(dir)).status, 0);
}

std::string train_args(const fs::path& dir, const std::string& grid = "grid_small.json") {
  return "train --seed 7 --folds 3 --no-header-meta --grid " + q(paths::fixtures() / grid) + " --out " + q(dir);
}

}  // namespace

TEST(Cli, ExtractAndFeaturizeMatchGold) {
  auto dir = paths::scratch("cli_gold");
  featurized(dir);
  EXPECT_EQ(body(dir / "pairs.tsv"), slurp(paths::fixtures() / "gold_pairs.tsv"));
  EXPECT_EQ(body(dir / "features.tsv"), slurp(paths::fixtures() / "gold_features.tsv"));
  EXPECT_TRUE(slurp(dir / "pairs.tsv").starts_with("# seed=42 generated="));
}

TEST(Cli, EmptyCorpusWarns) {
  auto dir = paths::scratch("cli_empty");
  fs::create_directories(dir / "corpus");
  auto r = cli(dir, "extract --corpus " + q(dir / "corpus") + " --out " + q(dir));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("pairs 0"), std::string::npos);
  EXPECT_NE(r.err.find("no pairs"), std::string::npos);
  EXPECT_EQ(body(dir / "pairs.tsv"),
            "doc_id\tgenre\tantecedent_span\thead_form\tanaphor_span\tanaphor_form\tlabel\ttype_iii\n");
}

TEST(Cli, MissingCorpusFails) {
  auto dir = paths::scratch("cli_missing");
  auto r = cli(dir, "extract --corpus " + q(dir / "nowhere") + " --out " + q(dir));
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UnknownSubcommandFails) {
  auto dir = paths::scratch("cli_usage");
  EXPECT_NE(cli(dir, "frobnicate").status, 0);
  EXPECT_NE(cli(dir, "").status, 0);
}

TEST(Cli, TrainIsReproducible) {
  auto dir = paths::scratch("cli_repro");
  split(dir);
  ASSERT_EQ(cli(dir, train_args(dir)).status, 0);
  const auto first = slurp(dir / "model.json");
  ASSERT_EQ(cli(dir, train_args(dir) + " --threads 1").status, 0);
  EXPECT_EQ(slurp(dir / "model.json"), first);
  EXPECT_EQ(first.find("generated"), std::string::npos);
  EXPECT_TRUE(slurp(dir / "cv.tsv").starts_with("# seed=7\n"));
}

TEST(Cli, CrossValidationMatchesFrozen) {
  auto dir = paths::scratch("cli_cv");
  split(dir);
  ASSERT_EQ(cli(dir, train_args(dir)).status, 0);
  EXPECT_EQ(slurp(dir / "cv.tsv"), slurp(paths::fixtures() / "expected_cv_seed7.tsv"));
}

TEST(Cli, SingleCellGrid) {
  auto dir = paths::scratch("cli_one");
  split(dir);
  auto r = cli(dir, train_args(dir, "grid_one.json"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("n_trees=7 max_depth=3 max_features=all"), std::string::npos);
  auto cv = notional::text::Table::load(dir / "cv.tsv");
  ASSERT_EQ(cv.rows.size(), 1u);
  EXPECT_EQ(cv.rows[0].back(), "yes");
}

TEST(Cli, EvaluateIsConsistent) {
  auto dir = paths::scratch("cli_eval");
  split(dir);
  ASSERT_EQ(cli(dir, train_args(dir)).status, 0);
  auto r = cli(dir, "evaluate --out " + q(dir));
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = nlohmann::json::parse(slurp(dir / "eval.json"));
  const auto& m = j["confusion"]["matrix"];
  const double n = m[0][0].get<double>() + m[0][1].get<double>() + m[1][0].get<double>() + m[1][1].get<double>();
  EXPECT_EQ(j["n"].get<double>(), n);
  EXPECT_EQ(n, static_cast<double>(notional::text::Table::load(dir / "test.tsv").rows.size()));
  EXPECT_NEAR(j["accuracy"].get<double>(), (m[0][0].get<double>() + m[1][1].get<double>()) / n, 1e-12);
  EXPECT_NEAR(j["majority_baseline_corpus"].get<double>(), 16.0 / 24.0, 1e-12);
  EXPECT_NE(r.out.find("accuracy"), std::string::npos);
}

TEST(Cli, EncodingMismatchFails) {
  auto dir = paths::scratch("cli_mismatch");
  split(dir);
  ASSERT_EQ(cli(dir, train_args(dir)).status, 0);
  auto t = notional::text::Table::load(dir / "test.tsv");
  for (auto& h : t.header)
    if (h == "t_art") h = "t_article";
  notional::text::write_file(dir / "renamed.tsv", t.str());
  auto r = cli(dir, "evaluate --input " + q(dir / "renamed.tsv") + " --out " + q(dir));
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(r.err.empty());
  EXPECT_NE(cli(dir, "predict --input " + q(dir / "renamed.tsv") + " --out " + q(dir)).status, 0);
}

TEST(Cli, PredictAndImportances) {
  auto dir = paths::scratch("cli_predict");
  split(dir);
  ASSERT_EQ(cli(dir, train_args(dir)).status, 0);
  ASSERT_EQ(cli(dir, "predict --input " + q(dir / "features.tsv") + " --out " + q(dir)).status, 0);
  auto p = notional::text::Table::load(dir / "predictions.tsv");
  EXPECT_EQ(p.rows.size(), 24u);
  for (const auto& row : p.rows) {
    const double prob = std::stod(row[2]);
    EXPECT_GE(prob, 0.0);
    EXPECT_LE(prob, 1.0);
    EXPECT_EQ(row[1], prob > 0.5 ? "notional" : "strict");
  }
  auto r = cli(dir, "importances --out " + q(dir));
  ASSERT_EQ(r.status, 0) << r.err;
  auto imp = notional::text::Table::load(dir / "importances.tsv");
  EXPECT_EQ(imp.rows.size(), 18u);
  double sum = 0;
  for (const auto& row : imp.rows) sum += std::stod(row[1]);
  if (r.err.find("no splits") == std::string::npos) {
    EXPECT_NEAR(sum, 1.0, 1e-5);
  }
}

TEST(Cli, AnalyzeTables) {
  auto dir = paths::scratch("cli_analyze");
  featurized(dir);
  for (const char* t : {"genre", "pos", "entity", "deprel", "distance", "position"}) {
    auto r = cli(dir, std::string("analyze --min-count 1 --bins 4 --table ") + t + " --out " + q(dir));
    EXPECT_EQ(r.status, 0) << t << ": " << r.err;
    EXPECT_TRUE(fs::exists(dir / ("analysis_" + std::string(t) + ".tsv"))) << t;
  }
  auto g = notional::text::Table::load(dir / "analysis_genre.tsv");
  std::size_t n = 0;
  for (const auto& row : g.rows)
    if (!row[0].starts_with("total_")) n += std::stoul(row[1]) + std::stoul(row[2]);
  EXPECT_EQ(n, 24u);
  EXPECT_NE(cli(dir, "analyze --table colour --out " + q(dir)).status, 0);
}
